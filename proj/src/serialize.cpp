#include "serialize.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace mixgbn {

namespace fs = std::filesystem;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + target.parent_path().string() + "'");
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path + "'");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("matrix: expected a list of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  const Eigen::Index c = r ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      throw InvalidArgument("matrix: ragged rows");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("vector: expected a list");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

namespace {

Json prior_to_json(const ComponentPrior& p) {
  return {{"t_dagger", matrix_to_json(p.t_dagger)},
          {"nu", vector_to_json(p.nu)},
          {"alpha_w", p.alpha_w},
          {"alpha_mu", p.alpha_mu}};
}

Json edges_to_json(const std::vector<Edge>& edges) {
  Json a = Json::array();
  for (const auto& e : edges) a.push_back({e.from + 1, e.to + 1});
  return a;
}

std::vector<Edge> edges_from_json(const Json& j, int n) {
  std::vector<Edge> out;
  if (!j.is_array()) throw InvalidArgument("edges: expected a list of [from, to]");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw InvalidArgument("edges: expected [from, to] pairs");
    const int a = e[0].get<int>() - 1, b = e[1].get<int>() - 1;
    if (a < 0 || b < 0 || a >= n || b >= n) throw InvalidArgument("edges: node out of range");
    out.push_back({a, b});
  }
  return out;
}

Json labels_to_json(const Assignment& z) {
  Json a = Json::array();
  for (int l : z.labels()) a.push_back(l + 1);
  return a;
}

Assignment labels_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("z: expected a list of labels");
  std::vector<int> labels;
  labels.reserve(j.size());
  for (const auto& l : j) labels.push_back(l.get<int>() - 1);
  return Assignment::from_labels(labels);
}

}  // namespace

Json hyperparameters_to_json(const Hyperparameters& hp) {
  Json j = {{"t_dagger", matrix_to_json(hp.t_dagger)},
            {"nu", vector_to_json(hp.nu)},
            {"alpha_w", hp.alpha_w},
            {"alpha_mu", hp.alpha_mu},
            {"lambda", hp.lambda}};
  if (!hp.per_component.empty()) {
    Json pc = Json::array();
    for (const auto& p : hp.per_component) pc.push_back(prior_to_json(p));
    j["per_component"] = std::move(pc);
  }
  return j;
}

Hyperparameters hyperparameters_from_json(const Json& j, int n) {
  Hyperparameters hp = Hyperparameters::defaults(n);
  if (j.is_null()) return hp;
  if (!j.is_object()) throw InvalidArgument("hyperparameters: expected an object");
  if (j.contains("t_dagger")) hp.t_dagger = matrix_from_json(j["t_dagger"]);
  if (j.contains("nu")) hp.nu = vector_from_json(j["nu"]);
  if (j.contains("alpha_w")) hp.alpha_w = j["alpha_w"].get<double>();
  if (j.contains("alpha_mu")) hp.alpha_mu = j["alpha_mu"].get<double>();
  if (j.contains("lambda")) hp.lambda = j["lambda"].get<double>();
  if (j.contains("per_component")) {
    for (const auto& p : j["per_component"]) {
      ComponentPrior c{hp.t_dagger, hp.nu, hp.alpha_w, hp.alpha_mu};
      if (p.contains("t_dagger")) c.t_dagger = matrix_from_json(p["t_dagger"]);
      if (p.contains("nu")) c.nu = vector_from_json(p["nu"]);
      if (p.contains("alpha_w")) c.alpha_w = p["alpha_w"].get<double>();
      if (p.contains("alpha_mu")) c.alpha_mu = p["alpha_mu"].get<double>();
      hp.per_component.push_back(std::move(c));
    }
  }
  hp.validate(n);
  return hp;
}

Json chain_config_to_json(const ChainConfig& cfg) {
  Json j = {{"iters", cfg.total_iters},
            {"thin", cfg.thin},
            {"model", model_name(cfg.model)},
            {"seed", cfg.seed},
            {"chain_id", cfg.chain_id},
            {"fixed_assignment", cfg.fixed_assignment},
            {"gibbs_moves_per_iter", cfg.gibbs_moves_per_iter},
            {"init_components", cfg.init_components},
            {"edge_penalty", cfg.edge_penalty},
            {"refresh_every", cfg.refresh_every},
            {"trace_every", cfg.trace_every},
            {"hyperparameters", hyperparameters_to_json(cfg.hp)}};
  j["max_fanin"] = cfg.max_fanin ? Json(*cfg.max_fanin) : Json(nullptr);
  return j;
}

std::string format_sample_jsonl(const PosteriorSample& sample) {
  std::string out;
  for (const auto& d : sample.draws) {
    Json j = {{"iter", d.iter},
              {"log_score", d.log_score},
              {"edges", edges_to_json(d.g.edges())},
              {"z", labels_to_json(d.z)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

Json sample_summary(const PosteriorSample& sample, int chains) {
  const auto& s = sample.stats;
  return {{"n", sample.n},
          {"m", sample.m},
          {"draws", sample.draws.size()},
          {"chains", chains},
          {"config", chain_config_to_json(sample.config)},
          {"stats",
           {{"structure_proposals", s.structure_proposals},
            {"structure_accepts", s.structure_accepts},
            {"structure_acceptance", s.structure_acceptance()},
            {"gibbs_moves", s.gibbs_moves},
            {"gibbs_relocations", s.gibbs_relocations},
            {"rejected_on_error", s.rejected_on_error}}}};
}

std::string format_trace_csv(const PosteriorSample& sample) {
  std::string out = "iter,log_score,components,edges\n";
  for (const auto& t : sample.trace)
    out += std::to_string(t.iter) + "," + format_double(t.log_score) + "," +
           std::to_string(t.components) + "," + std::to_string(t.edges) + "\n";
  return out;
}

PosteriorSample parse_sample(const std::string& jsonl, const Json& summary) {
  PosteriorSample s;
  try {
    s.n = summary.at("n").get<int>();
    s.m = summary.at("m").get<int>();
    const auto& c = summary.at("config");
    s.config.total_iters = c.at("iters").get<long>();
    s.config.thin = c.at("thin").get<long>();
    s.config.model = parse_model(c.at("model").get<std::string>());
    s.config.seed = c.at("seed").get<std::uint64_t>();
    s.config.chain_id = c.value("chain_id", std::uint64_t{0});
    s.config.fixed_assignment = c.value("fixed_assignment", false);
    s.config.gibbs_moves_per_iter = c.value("gibbs_moves_per_iter", 1);
    s.config.init_components = c.value("init_components", 1);
    s.config.edge_penalty = c.value("edge_penalty", 0.0);
    if (c.contains("max_fanin") && !c["max_fanin"].is_null()) s.config.max_fanin = c["max_fanin"].get<int>();
    s.config.hp = hyperparameters_from_json(c.value("hyperparameters", Json()), s.n);
    if (summary.contains("stats")) {
      const auto& st = summary["stats"];
      s.stats.structure_proposals = st.value("structure_proposals", 0L);
      s.stats.structure_accepts = st.value("structure_accepts", 0L);
      s.stats.gibbs_moves = st.value("gibbs_moves", 0L);
      s.stats.gibbs_relocations = st.value("gibbs_relocations", 0L);
      s.stats.rejected_on_error = st.value("rejected_on_error", 0L);
    }
    std::istringstream in(jsonl);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const Json j = Json::parse(line);
      Draw d;
      d.iter = j.at("iter").get<long>();
      d.log_score = j.at("log_score").get<double>();
      d.g = Dag::from_edges(s.n, edges_from_json(j.at("edges"), s.n));
      d.z = labels_from_json(j.at("z"));
      if (d.z.size() != s.m)
        throw InvalidArgument("sample line " + std::to_string(lineno) + ": z has the wrong length");
      s.draws.push_back(std::move(d));
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed sample: ") + e.what());
  }
  return s;
}

namespace {
std::string stem_of(const std::string& jsonl_path) {
  const std::string ext = ".jsonl";
  if (jsonl_path.size() > ext.size() &&
      jsonl_path.compare(jsonl_path.size() - ext.size(), ext.size(), ext) == 0)
    return jsonl_path.substr(0, jsonl_path.size() - ext.size());
  return jsonl_path;
}
}  // namespace

std::string summary_path_for(const std::string& jsonl_path) { return stem_of(jsonl_path) + ".summary.json"; }
std::string trace_path_for(const std::string& jsonl_path) { return stem_of(jsonl_path) + ".trace.csv"; }

PosteriorSample read_sample(const std::string& jsonl_path) {
  const std::string text = read_text(jsonl_path);
  Json summary;
  try {
    summary = Json::parse(read_text(summary_path_for(jsonl_path)));
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed summary: ") + e.what());
  }
  return parse_sample(text, summary);
}

void write_sample(const std::string& jsonl_path, const PosteriorSample& sample, int chains) {
  write_text_atomic(jsonl_path, format_sample_jsonl(sample));
  write_text_atomic(summary_path_for(jsonl_path), sample_summary(sample, chains).dump(2) + "\n");
  write_text_atomic(trace_path_for(jsonl_path), format_trace_csv(sample));
}

Json truth_to_json(const GroundTruth& t) {
  Json means = Json::array();
  for (const auto& mu : t.means) means.push_back(vector_to_json(mu));
  return {{"n", t.dag.size()},
          {"edges", edges_to_json(t.dag.edges())},
          {"coef", matrix_to_json(t.coef)},
          {"noise", vector_to_json(t.noise)},
          {"sigma", matrix_to_json(t.sigma)},
          {"means", std::move(means)},
          {"z", labels_to_json(t.z)},
          {"cpdag", {{"directed", edges_to_json(t.cpdag.directed)}, {"undirected", edges_to_json(t.cpdag.undirected)}}}};
}

GroundTruth truth_from_json(const Json& j) {
  GroundTruth t;
  try {
    const int n = j.at("n").get<int>();
    t.dag = Dag::from_edges(n, edges_from_json(j.at("edges"), n));
    t.cpdag = to_cpdag(t.dag);
    if (j.contains("coef")) t.coef = matrix_from_json(j["coef"]);
    if (j.contains("noise")) t.noise = vector_from_json(j["noise"]);
    if (j.contains("sigma")) t.sigma = matrix_from_json(j["sigma"]);
    if (j.contains("means"))
      for (const auto& mu : j["means"]) t.means.push_back(vector_from_json(mu));
    if (j.contains("z")) t.z = labels_from_json(j["z"]);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed ground truth: ") + e.what());
  }
  return t;
}

Json theta_to_json(const ThetaDraw& theta) {
  Json means = Json::array(), covs = Json::array();
  for (const auto& mu : theta.means) means.push_back(vector_to_json(mu));
  for (const auto& c : theta.covariances) {
    Json flat = Json::array();
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index k = 0; k < c.cols(); ++k) flat.push_back(c(i, k));
    covs.push_back(std::move(flat));
  }
  return {{"model", model_name(theta.model)},
          {"K", theta.components()},
          {"weights", theta.weights},
          {"means", std::move(means)},
          {"covariance", std::move(covs)}};
}

std::string format_matrix_csv(const Matrix& m, const std::string& prefix) {
  std::string out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j) out += ',';
    out += prefix + std::to_string(j + 1);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace mixgbn
