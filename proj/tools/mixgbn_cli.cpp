// mixgbn command-line front end: simulate, sample, evaluate, predict.

#include <mixgbn/mixgbn.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Failure carrying the process exit code.
struct Failure {
  int code;
  std::string message;
};

void check(mixgbn_status s, const std::string& what) {
  if (s == MIXGBN_OK) return;
  const int code = s == MIXGBN_INVALID_ARGUMENT ? kExitValidation : kExitRuntime;
  throw Failure{code, what + ": " + mixgbn_last_error()};
}

[[noreturn]] void invalid(const std::string& msg) { throw Failure{kExitValidation, msg}; }

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Dataset = Handle<mixgbn_dataset, mixgbn_dataset_free>;
using Truth = Handle<mixgbn_truth, mixgbn_truth_free>;
using Sample = Handle<mixgbn_sample, mixgbn_sample_free>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  mixgbn_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitRuntime, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Failure{kExitRuntime, "cannot write '" + tmp.string() + "'"};
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Failure{kExitRuntime, "cannot write '" + path.string() + "'"};
}

// Shortest text that reads back to the same double.
std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string matrix_csv(const std::vector<double>& v, int rows, int cols, const std::string& prefix) {
  std::string out;
  for (int j = 0; j < cols; ++j) out += (j ? "," : "") + prefix + std::to_string(j + 1);
  out += '\n';
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out += (j ? "," : "") + format_number(v[static_cast<std::size_t>(i) * cols + j]);
    out += '\n';
  }
  return out;
}

Json parse_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    invalid("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Options that steer configuration resolution or output placement and are
// therefore not echoed as part of the resolved configuration.
bool is_meta_option(const std::string& name) {
  return name == "config" || name == "from-manifest" || name == "out" || name == "help";
}

std::string option_key(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  return names.empty() ? std::string() : names.front();
}

bool is_flag(const CLI::Option* opt) { return opt->get_type_size_max() == 0 || opt->get_expected_max() == 0; }

// Numbers go into the manifest as numbers, everything else as text.
Json typed_value(const std::string& text) {
  long long i = 0;
  auto [pi, ei] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (ei == std::errc() && pi == text.data() + text.size()) return i;
  double d = 0.0;
  auto [pd, ed] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ed == std::errc() && pd == text.data() + text.size() && std::isfinite(d)) return d;
  return text;
}

// Resolved value of every non-meta option of `sub` (null when unset).
Json resolved_config(const CLI::App* sub) {
  Json j = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const auto key = option_key(opt);
    if (key.empty() || is_meta_option(key)) continue;
    if (is_flag(opt)) {
      j[key] = opt->count() > 0 && opt->as<bool>();
    } else if (opt->count() > 0) {
      j[key] = typed_value(opt->as<std::string>());
    } else if (!opt->get_default_str().empty()) {
      j[key] = typed_value(opt->get_default_str());
    } else {
      j[key] = nullptr;
    }
  }
  return j;
}

// Turns a config object into "--key value" arguments for subcommand `sub`.
std::vector<std::string> config_arguments(const Json& cfg, const CLI::App* sub, const std::string& source) {
  std::vector<std::string> args;
  if (!cfg.is_object()) invalid(source + ": expected a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (is_meta_option(key) && source.find("manifest") != std::string::npos) continue;
    const CLI::Option* opt = nullptr;
    for (const CLI::Option* o : sub->get_options())
      if (option_key(o) == key) opt = o;
    if (!opt) invalid(source + ": unknown setting '" + key + "'");
    if (value.is_null()) continue;
    if (is_flag(opt)) {
      args.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  return args;
}

struct RunContext {
  std::string command;
  fs::path out_dir;
  std::vector<std::string> outputs;
  Json inputs = Json::object();
  std::uint64_t seed = 0;
};

// A draw file and its two sidecars.
void add_sample_outputs(RunContext& ctx, const fs::path& jsonl) {
  fs::path stem = jsonl;
  stem.replace_extension();
  ctx.outputs.push_back(jsonl.string());
  ctx.outputs.push_back(stem.string() + ".summary.json");
  ctx.outputs.push_back(stem.string() + ".trace.csv");
}

fs::path resolve_out_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MIXGBN_OUT_DIR"); env && *env) return env;
  return "mixgbn_out";
}

void write_manifest(const RunContext& ctx, const CLI::App* sub, double seconds) {
  Json m = {{"command", ctx.command},
            {"engine_version", mixgbn_version()},
            {"seed", ctx.seed},
            {"config", resolved_config(sub)},
            {"inputs", ctx.inputs},
            {"outputs", ctx.outputs},
            {"out_dir", ctx.out_dir.string()},
            {"wall_clock_seconds", seconds}};
  write_file(ctx.out_dir / "manifest.json", m.dump(2) + "\n");
}

// ---- simulate ----

struct SimulateArgs {
  int n = 20;
  int m = 200;
  int k = 4;
  double expected_edges = 20.0;
  std::uint64_t seed = 1;
  std::uint64_t replicate = 0;
};

void run_simulate(const SimulateArgs& a, RunContext& ctx) {
  mixgbn_sim_config cfg;
  mixgbn_sim_config_default(&cfg);
  cfg.n = a.n;
  cfg.m = a.m;
  cfg.k = a.k;
  cfg.expected_edges = a.expected_edges;
  cfg.seed = a.seed;
  cfg.replicate = a.replicate;
  ctx.seed = a.seed;
  Dataset data;
  Truth truth;
  check(mixgbn_simulate(&cfg, data.out(), truth.out()), "simulate");
  const auto data_path = ctx.out_dir / "data.csv";
  const auto truth_path = ctx.out_dir / "truth.json";
  const auto labels_path = ctx.out_dir / "labels.csv";
  check(mixgbn_dataset_write_csv(data.get(), data_path.c_str()), "write data");
  check(mixgbn_truth_write_json(truth.get(), truth_path.c_str()), "write ground truth");
  std::vector<int> z(static_cast<std::size_t>(a.m));
  check(mixgbn_truth_labels(truth.get(), z.data(), a.m), "labels");
  std::string labels = "z\n";
  for (int l : z) labels += std::to_string(l) + "\n";
  write_file(labels_path, labels);
  ctx.outputs = {data_path.string(), truth_path.string(), labels_path.string()};
}

// ---- sample ----

struct SampleArgs {
  std::string data;
  std::string model = "m2";
  long iters = 100000;
  long thin = 0;
  std::uint64_t seed = 1;
  int chains = 1;
  std::optional<std::string> labels;
  std::optional<std::string> label_column;
  bool standardize = false;
  std::optional<double> alpha_w, alpha_mu, lambda, t_scale, nu;
  std::optional<std::string> hyperparameters;
  int max_fanin = 0;
  int gibbs_moves = 1;
  int init_components = 1;
  double edge_penalty = 0.0;
};

void run_sample(const SampleArgs& a, RunContext& ctx) {
  Dataset data;
  check(mixgbn_dataset_load_csv(a.data.c_str(), 0,
                                a.label_column ? a.label_column->c_str() : nullptr, data.out()),
        "load data");
  if (a.standardize) check(mixgbn_dataset_standardize(data.get(), nullptr), "standardize");
  ctx.inputs["data"] = a.data;
  ctx.seed = a.seed;

  mixgbn_chain_config cfg;
  mixgbn_chain_config_default(&cfg);
  check(mixgbn_model_parse(a.model.c_str(), &cfg.model), "model");
  cfg.iters = a.iters;
  cfg.thin = a.thin;
  cfg.seed = a.seed;
  cfg.max_fanin = a.max_fanin;
  cfg.gibbs_moves_per_iter = a.gibbs_moves;
  cfg.init_components = a.init_components;
  cfg.edge_penalty = a.edge_penalty;
  if (a.alpha_w) cfg.alpha_w = *a.alpha_w;
  if (a.alpha_mu) cfg.alpha_mu = *a.alpha_mu;
  if (a.lambda) cfg.lambda = *a.lambda;
  if (a.t_scale) cfg.t_scale = *a.t_scale;
  if (a.nu) cfg.nu_value = *a.nu;
  std::string hp_text;
  if (a.hyperparameters) {
    hp_text = read_file(*a.hyperparameters);
    cfg.hyperparameters_json = hp_text.c_str();
    ctx.inputs["hyperparameters"] = *a.hyperparameters;
  }
  const int m = mixgbn_dataset_rows(data.get());
  std::vector<int> labels;
  if (a.labels && a.label_column) invalid("--labels and --label-column are mutually exclusive");
  if (a.labels) {
    labels.resize(static_cast<std::size_t>(m));
    check(mixgbn_read_labels(a.labels->c_str(), m, labels.data()), "labels");
    ctx.inputs["labels"] = *a.labels;
  } else if (a.label_column) {
    labels.resize(static_cast<std::size_t>(m));
    check(mixgbn_dataset_label_ids(data.get(), labels.data()), "labels");
  }
  if (!labels.empty()) cfg.labels = labels.data();

  std::vector<mixgbn_sample*> per_chain(static_cast<std::size_t>(std::max(a.chains, 1)), nullptr);
  Sample pooled;
  const mixgbn_status st = mixgbn_sample_run(data.get(), &cfg, a.chains,
                                             a.chains > 1 ? per_chain.data() : nullptr, pooled.out());
  std::vector<Sample> chains;
  for (auto* p : per_chain) {
    Sample s;
    *s.out() = p;
    chains.push_back(std::move(s));
  }
  check(st, "sample");
  if (a.chains > 1) {
    for (int c = 0; c < a.chains; ++c) {
      const auto path = ctx.out_dir / ("chain" + std::to_string(c + 1) + ".jsonl");
      check(mixgbn_sample_write(chains[static_cast<std::size_t>(c)].get(), path.c_str()), "write sample");
      add_sample_outputs(ctx, path);
    }
  }
  const auto path = ctx.out_dir / "samples.jsonl";
  check(mixgbn_sample_write(pooled.get(), path.c_str()), "write sample");
  add_sample_outputs(ctx, path);
  std::cout << "draws: " << mixgbn_sample_draws(pooled.get())
            << "  structure acceptance: " << mixgbn_sample_acceptance(pooled.get()) << "\n";
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string sample;
  std::optional<std::string> truth;
  double psi = 0.75;
  bool require_truth = false;
};

void run_evaluate(const EvaluateArgs& a, RunContext& ctx) {
  if (a.psi < 0.0 || a.psi > 1.0) invalid("--psi must lie in [0, 1]");
  if (a.require_truth && !a.truth) invalid("--require-truth: no --truth given for AUC and rSHD");
  Sample s;
  check(mixgbn_sample_read(a.sample.c_str(), s.out()), "read sample");
  ctx.inputs["sample"] = a.sample;
  const int n = mixgbn_sample_nodes(s.get());
  const int m = mixgbn_sample_observations(s.get());
  std::vector<double> scores(static_cast<std::size_t>(n) * n), coalloc(static_cast<std::size_t>(m) * m);
  check(mixgbn_edge_scores(s.get(), scores.data()), "edge scores");
  check(mixgbn_coallocation(s.get(), coalloc.data()), "co-allocation");
  char* net = nullptr;
  check(mixgbn_predict_network(scores.data(), n, a.psi, &net), "network prediction");
  const std::string network = take_string(net);

  Json report = {{"draws", mixgbn_sample_draws(s.get())}, {"nodes", n}, {"observations", m}, {"psi", a.psi}};
  if (a.truth) {
    Truth t;
    check(mixgbn_truth_read_json(a.truth->c_str(), t.out()), "read ground truth");
    ctx.inputs["truth"] = *a.truth;
    double auc = 0.0, rshd = 0.0;
    check(mixgbn_auc_pr(scores.data(), n, t.get(), &auc), "AUC");
    check(mixgbn_rshd(scores.data(), n, a.psi, t.get(), &rshd), "rSHD");
    report["auc_pr"] = auc;
    report["rshd"] = rshd;
  }
  const auto scores_path = ctx.out_dir / "edge_scores.csv";
  const auto coalloc_path = ctx.out_dir / "coallocation.csv";
  const auto net_path = ctx.out_dir / "network.txt";
  const auto report_path = ctx.out_dir / "report.json";
  write_file(scores_path, matrix_csv(scores, n, n, "X"));
  write_file(coalloc_path, matrix_csv(coalloc, m, m, "obs"));
  write_file(net_path, network);
  write_file(report_path, report.dump(2) + "\n");
  ctx.outputs = {scores_path.string(), coalloc_path.string(), net_path.string(), report_path.string()};
  std::cout << report.dump() << "\n";
}

// ---- predict ----

struct PredictArgs {
  std::string sample;
  std::string data;
  std::string holdout;
  int draws_per_state = 1;
  std::uint64_t seed = 1;
  bool standardize = false;
};

void run_predict(const PredictArgs& a, RunContext& ctx) {
  Sample s;
  check(mixgbn_sample_read(a.sample.c_str(), s.out()), "read sample");
  Dataset train, holdout;
  check(mixgbn_dataset_load_csv(a.data.c_str(), 0, nullptr, train.out()), "load training data");
  check(mixgbn_dataset_load_csv(a.holdout.c_str(), 0, nullptr, holdout.out()), "load holdout data");
  if (mixgbn_dataset_cols(train.get()) != mixgbn_dataset_cols(holdout.get()))
    invalid("training data has " + std::to_string(mixgbn_dataset_cols(train.get())) +
            " variables, holdout has " + std::to_string(mixgbn_dataset_cols(holdout.get())));
  if (a.standardize) {
    check(mixgbn_dataset_standardize(holdout.get(), train.get()), "standardize holdout");
    check(mixgbn_dataset_standardize(train.get(), nullptr), "standardize");
  }
  ctx.inputs = {{"sample", a.sample}, {"data", a.data}, {"holdout", a.holdout}};
  ctx.seed = a.seed;
  const int mh = mixgbn_dataset_rows(holdout.get());
  std::vector<double> per(static_cast<std::size_t>(mh));
  double lp = 0.0;
  check(mixgbn_predictive_logprob(s.get(), train.get(), holdout.get(), a.draws_per_state, a.seed, &lp,
                                  per.data()),
        "predictive probability");
  Json report = {{"log_predictive", lp},
                 {"geometric_mean_predictive", std::exp(lp)},
                 {"holdout_rows", mh},
                 {"states", mixgbn_sample_draws(s.get())},
                 {"draws_per_state", a.draws_per_state}};
  std::string csv = "row,log_density\n";
  for (int i = 0; i < mh; ++i) csv += std::to_string(i + 1) + "," + format_number(per[static_cast<std::size_t>(i)]) + "\n";
  const auto report_path = ctx.out_dir / "predictive.json";
  const auto per_path = ctx.out_dir / "per_observation.csv";
  write_file(report_path, report.dump(2) + "\n");
  write_file(per_path, csv);
  ctx.outputs = {report_path.string(), per_path.string()};
  std::cout << report.dump() << "\n";
}

std::optional<std::string> find_value(const std::vector<std::string>& args, const std::string& flag) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(flag + "=", 0) == 0) return args[i].substr(flag.size() + 1);
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixtures of Gaussian Bayesian networks: simulation, MCMC sampling and evaluation"};
  app.set_version_flag("--version", std::string(mixgbn_version()));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::optional<std::string> out, config, manifest;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output directory (default: $MIXGBN_OUT_DIR, else ./mixgbn_out)");
    sub->add_option("--config", config, "JSON object of option values; flags take precedence");
    sub->add_option("--from-manifest", manifest, "Reuse the resolved configuration of an earlier run");
  };

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a mixture dataset from a random network");
  simulate->add_option("--n", sim.n, "Number of variables")->capture_default_str();
  simulate->add_option("--m", sim.m, "Number of observations")->capture_default_str();
  simulate->add_option("--K", sim.k, "Number of mixture components")->capture_default_str();
  simulate->add_option("--expected-edges", sim.expected_edges, "Expected number of edges")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--replicate", sim.replicate, "Replicate index")->capture_default_str();
  add_common(simulate);

  SampleArgs smp;
  auto* sample = app.add_subcommand("sample", "Run the structure MCMC / Gibbs sampler");
  sample->add_option("--data", smp.data, "Data CSV with a header row")->required();
  sample->add_option("--model", smp.model, "h, m1 or m2")
      ->capture_default_str()
      ->check(CLI::IsMember({"h", "m1", "m2"}, CLI::ignore_case));
  sample->add_option("--iters", smp.iters, "Total iterations T")->capture_default_str();
  sample->add_option("--thin", smp.thin, "Thinning interval (0: 500 draws)")->capture_default_str();
  sample->add_option("--seed", smp.seed, "Master seed")->capture_default_str();
  sample->add_option("--chains", smp.chains, "Independent chains")->capture_default_str()->check(CLI::PositiveNumber);
  sample->add_option("--labels", smp.labels, "File of known labels, one per row (fixes the allocation)");
  sample->add_option("--label-column", smp.label_column, "Data column holding known labels");
  sample->add_flag("--standardize", smp.standardize, "Scale columns to mean 0, variance 1");
  sample->add_option("--alpha-w", smp.alpha_w, "Wishart degrees of freedom (default n+1)");
  sample->add_option("--alpha-mu", smp.alpha_mu, "Mean precision scale (default 1)");
  sample->add_option("--lambda", smp.lambda, "Poisson rate on K (default 1)");
  sample->add_option("--t-scale", smp.t_scale, "Prior matrix c*I (default 1)");
  sample->add_option("--nu", smp.nu, "Prior mean, same value for every variable (default 0)");
  sample->add_option("--hyperparameters", smp.hyperparameters, "JSON file with full hyperparameters");
  sample->add_option("--max-fanin", smp.max_fanin, "Parent cap (0: none)")->capture_default_str();
  sample->add_option("--gibbs-moves", smp.gibbs_moves, "Gibbs moves per iteration")->capture_default_str();
  sample->add_option("--init-components", smp.init_components,
                     "Start from a random allocation over this many components")
      ->capture_default_str();
  sample->add_option("--edge-penalty", smp.edge_penalty, "Graph prior -c|E| (0: flat)")->capture_default_str();
  add_common(sample);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Edge posteriors, co-allocation, network and metrics");
  evaluate->add_option("--sample", ev.sample, "Posterior sample (.jsonl)")->required();
  evaluate->add_option("--truth", ev.truth, "Ground-truth JSON for AUC and rSHD");
  evaluate->add_option("--psi", ev.psi, "Edge threshold")->capture_default_str();
  evaluate->add_flag("--require-truth", ev.require_truth, "Fail when no ground truth is given");
  add_common(evaluate);

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "Geometric mean predictive probability of held-out rows");
  predict->add_option("--sample", pr.sample, "Posterior sample (.jsonl)")->required();
  predict->add_option("--data", pr.data, "Training data CSV used by the sampler")->required();
  predict->add_option("--holdout", pr.holdout, "Held-out CSV")->required();
  predict->add_option("--draws-per-state", pr.draws_per_state, "Parameter draws per posterior state")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  predict->add_option("--seed", pr.seed, "Seed for parameter draws")->capture_default_str();
  predict->add_flag("--standardize", pr.standardize, "Standardize with the training columns' statistics");
  add_common(predict);

  // Layered configuration: manifest < config file < command line.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (!args.empty()) {
      CLI::App* sub = nullptr;
      for (auto* s : {simulate, sample, evaluate, predict})
        if (s->get_name() == args.front()) sub = s;
      if (sub) {
        std::vector<std::string> layered;
        if (auto path = find_value(args, "--from-manifest")) {
          const Json mf = parse_json_file(*path);
          if (mf.value("command", std::string()) != sub->get_name())
            invalid("manifest '" + *path + "' was written by a different command");
          auto extra = config_arguments(mf.at("config"), sub, "manifest '" + *path + "'");
          layered.insert(layered.end(), extra.begin(), extra.end());
        }
        if (auto path = find_value(args, "--config")) {
          auto extra = config_arguments(parse_json_file(*path), sub, "config '" + *path + "'");
          layered.insert(layered.end(), extra.begin(), extra.end());
        }
        args.insert(args.begin() + 1, layered.begin(), layered.end());
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const auto start = std::chrono::steady_clock::now();
  RunContext ctx;
  ctx.out_dir = resolve_out_dir(out);
  CLI::App* used = nullptr;
  try {
    if (simulate->parsed()) {
      ctx.command = "simulate";
      used = simulate;
      run_simulate(sim, ctx);
    } else if (sample->parsed()) {
      ctx.command = "sample";
      used = sample;
      run_sample(smp, ctx);
    } else if (evaluate->parsed()) {
      ctx.command = "evaluate";
      used = evaluate;
      run_evaluate(ev, ctx);
    } else if (predict->parsed()) {
      ctx.command = "predict";
      used = predict;
      run_predict(pr, ctx);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(ctx, used, secs);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
