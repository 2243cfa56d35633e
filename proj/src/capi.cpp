#include "mixgbn/mixgbn.h"

#include <cmath>
#include <cstring>
#include <map>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "evaluate.hpp"
#include "mcmc.hpp"
#include "posterior.hpp"
#include "serialize.hpp"
#include "simulate.hpp"

struct mixgbn_dataset {
  mixgbn::Dataset data;
};
struct mixgbn_truth {
  mixgbn::GroundTruth truth;
};
struct mixgbn_sample {
  mixgbn::PosteriorSample sample;
  int chains = 1;
};

namespace {

thread_local std::string g_last_error;

template <class F>
mixgbn_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MIXGBN_OK;
  } catch (const mixgbn::IoError& e) {
    g_last_error = e.what();
    return MIXGBN_IO;
  } catch (const mixgbn::NotPositiveDefinite& e) {
    g_last_error = e.what();
    return MIXGBN_NUMERICAL;
  } catch (const mixgbn::InvalidArgument& e) {
    g_last_error = e.what();
    return MIXGBN_INVALID_ARGUMENT;
  } catch (const mixgbn::Error& e) {
    g_last_error = e.what();
    return MIXGBN_NUMERICAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MIXGBN_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MIXGBN_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw mixgbn::InvalidArgument(what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

mixgbn::Model to_model(mixgbn_model m) {
  switch (m) {
    case MIXGBN_MODEL_H: return mixgbn::Model::H;
    case MIXGBN_MODEL_M1: return mixgbn::Model::M1;
    case MIXGBN_MODEL_M2: return mixgbn::Model::M2;
  }
  throw mixgbn::InvalidArgument("unknown model");
}

std::vector<int> first_appearance_ids(const std::vector<std::string>& labels) {
  std::map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    auto it = ids.try_emplace(l, static_cast<int>(ids.size()) + 1).first;
    out.push_back(it->second);
  }
  return out;
}

void copy_matrix(const mixgbn::Matrix& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
}

mixgbn::Matrix matrix_from(const double* v, int rows, int cols) {
  mixgbn::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v[static_cast<std::size_t>(i) * cols + j];
  return m;
}

mixgbn::Hyperparameters resolve_hyperparameters(const mixgbn_chain_config& c, int n) {
  mixgbn::Hyperparameters hp = mixgbn::Hyperparameters::defaults(n);
  if (c.hyperparameters_json && *c.hyperparameters_json) {
    mixgbn::Json j;
    try {
      j = mixgbn::Json::parse(c.hyperparameters_json);
    } catch (const mixgbn::Json::exception& e) {
      throw mixgbn::InvalidArgument(std::string("hyperparameters: ") + e.what());
    }
    hp = mixgbn::hyperparameters_from_json(j, n);
  }
  if (c.t_dagger)
    hp.t_dagger = matrix_from(c.t_dagger, n, n);
  else if (!std::isnan(c.t_scale))
    hp.t_dagger = c.t_scale * mixgbn::Matrix::Identity(n, n);
  if (c.nu)
    hp.nu = Eigen::Map<const mixgbn::Vector>(c.nu, n);
  else if (!std::isnan(c.nu_value))
    hp.nu = mixgbn::Vector::Constant(n, c.nu_value);
  if (!std::isnan(c.alpha_w)) hp.alpha_w = c.alpha_w;
  if (!std::isnan(c.alpha_mu)) hp.alpha_mu = c.alpha_mu;
  if (!std::isnan(c.lambda)) hp.lambda = c.lambda;
  hp.validate(n);
  return hp;
}

}  // namespace

extern "C" {

const char* mixgbn_version(void) { return MIXGBN_VERSION; }
const char* mixgbn_last_error(void) { return g_last_error.c_str(); }
void mixgbn_string_free(char* s) { std::free(s); }

mixgbn_status mixgbn_model_parse(const char* name, mixgbn_model* out) {
  return guarded([&] {
    require(name && out, "model: null argument");
    switch (mixgbn::parse_model(name)) {
      case mixgbn::Model::H: *out = MIXGBN_MODEL_H; break;
      case mixgbn::Model::M1: *out = MIXGBN_MODEL_M1; break;
      case mixgbn::Model::M2: *out = MIXGBN_MODEL_M2; break;
    }
  });
}

mixgbn_status mixgbn_dataset_load_csv(const char* path, int standardize, const char* label_column,
                                      mixgbn_dataset** out) {
  return guarded([&] {
    require(path && out, "dataset: null argument");
    std::optional<std::string> label;
    if (label_column && *label_column) label = label_column;
    *out = new mixgbn_dataset{mixgbn::load_csv(path, standardize != 0, label)};
  });
}

mixgbn_status mixgbn_dataset_from_matrix(const double* values, int rows, int cols, mixgbn_dataset** out) {
  return guarded([&] {
    require(values && out && rows > 0 && cols > 0, "dataset: invalid matrix");
    mixgbn::Dataset d;
    d.values = matrix_from(values, rows, cols);
    for (int j = 0; j < cols; ++j) d.names.push_back("X" + std::to_string(j + 1));
    *out = new mixgbn_dataset{std::move(d)};
  });
}

void mixgbn_dataset_free(mixgbn_dataset* d) { delete d; }
int mixgbn_dataset_rows(const mixgbn_dataset* d) { return d ? d->data.rows() : 0; }
int mixgbn_dataset_cols(const mixgbn_dataset* d) { return d ? d->data.cols() : 0; }

mixgbn_status mixgbn_dataset_values(const mixgbn_dataset* d, double* out) {
  return guarded([&] {
    require(d && out, "dataset: null argument");
    copy_matrix(d->data.values, out);
  });
}

mixgbn_status mixgbn_dataset_standardize(mixgbn_dataset* d, const mixgbn_dataset* reference) {
  return guarded([&] {
    require(d != nullptr, "dataset: null argument");
    if (!reference) {
      mixgbn::standardize_columns(d->data);
      return;
    }
    const auto& ref = reference->data.values;
    require(ref.cols() == d->data.values.cols(), "standardize: reference has a different number of columns");
    require(ref.rows() >= 2, "standardize: reference needs at least two rows");
    for (Eigen::Index c = 0; c < ref.cols(); ++c) {
      const double mean = ref.col(c).mean();
      const double sd = std::sqrt((ref.col(c).array() - mean).square().sum() / static_cast<double>(ref.rows() - 1));
      if (!(sd > 0.0)) throw mixgbn::InvalidArgument("standardize: constant reference column");
      d->data.values.col(c) = (d->data.values.col(c).array() - mean) / sd;
    }
  });
}

mixgbn_status mixgbn_dataset_write_csv(const mixgbn_dataset* d, const char* path) {
  return guarded([&] {
    require(d && path, "dataset: null argument");
    mixgbn::write_text_atomic(path, mixgbn::format_csv(d->data));
  });
}

mixgbn_status mixgbn_dataset_label_ids(const mixgbn_dataset* d, int* out) {
  return guarded([&] {
    require(d && out, "dataset: null argument");
    require(d->data.labels.has_value(), "dataset: no label column was read");
    const auto ids = first_appearance_ids(*d->data.labels);
    std::copy(ids.begin(), ids.end(), out);
  });
}

mixgbn_status mixgbn_read_labels(const char* path, int expected, int* out) {
  return guarded([&] {
    require(path && out, "labels: null argument");
    std::istringstream in(mixgbn::read_text(path));
    std::vector<std::string> labels;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
      const auto start = line.find_first_not_of(" \t");
      if (start == std::string::npos) continue;
      line = line.substr(start);
      if (first && line == "z") {
        first = false;
        continue;
      }
      first = false;
      labels.push_back(line);
    }
    if (static_cast<int>(labels.size()) != expected)
      throw mixgbn::InvalidArgument("labels: " + std::to_string(labels.size()) + " labels for " +
                                    std::to_string(expected) + " rows");
    const auto ids = first_appearance_ids(labels);
    std::copy(ids.begin(), ids.end(), out);
  });
}

void mixgbn_sim_config_default(mixgbn_sim_config* cfg) {
  if (!cfg) return;
  const mixgbn::SimConfig d;
  *cfg = {d.n, d.m, d.k, d.expected_edges, d.seed, d.replicate};
}

mixgbn_status mixgbn_simulate(const mixgbn_sim_config* cfg, mixgbn_dataset** data, mixgbn_truth** truth) {
  return guarded([&] {
    require(cfg && data && truth, "simulate: null argument");
    mixgbn::SimConfig c;
    c.n = cfg->n;
    c.m = cfg->m;
    c.k = cfg->k;
    c.expected_edges = cfg->expected_edges;
    c.seed = cfg->seed;
    c.replicate = cfg->replicate;
    auto [d, t] = mixgbn::simulate_dataset(c);
    d.labels.reset();
    auto* dh = new mixgbn_dataset{std::move(d)};
    *truth = new mixgbn_truth{std::move(t)};
    *data = dh;
  });
}

mixgbn_status mixgbn_truth_read_json(const char* path, mixgbn_truth** out) {
  return guarded([&] {
    require(path && out, "truth: null argument");
    mixgbn::Json j;
    try {
      j = mixgbn::Json::parse(mixgbn::read_text(path));
    } catch (const mixgbn::Json::exception& e) {
      throw mixgbn::InvalidArgument(std::string("truth: ") + e.what());
    }
    *out = new mixgbn_truth{mixgbn::truth_from_json(j)};
  });
}

mixgbn_status mixgbn_truth_write_json(const mixgbn_truth* t, const char* path) {
  return guarded([&] {
    require(t && path, "truth: null argument");
    mixgbn::write_text_atomic(path, mixgbn::truth_to_json(t->truth).dump(2) + "\n");
  });
}

void mixgbn_truth_free(mixgbn_truth* t) { delete t; }
int mixgbn_truth_nodes(const mixgbn_truth* t) { return t ? t->truth.dag.size() : 0; }

mixgbn_status mixgbn_truth_labels(const mixgbn_truth* t, int* out, int m) {
  return guarded([&] {
    require(t && out, "truth: null argument");
    require(t->truth.z.size() == m, "truth: label count does not match");
    for (int i = 0; i < m; ++i) out[i] = t->truth.z.label(i) + 1;
  });
}

void mixgbn_chain_config_default(mixgbn_chain_config* cfg) {
  if (!cfg) return;
  std::memset(cfg, 0, sizeof(*cfg));
  cfg->model = MIXGBN_MODEL_M2;
  cfg->iters = 100000;
  cfg->thin = 0;
  cfg->seed = 1;
  cfg->gibbs_moves_per_iter = 1;
  cfg->init_components = 1;
  cfg->alpha_w = cfg->alpha_mu = cfg->lambda = cfg->t_scale = cfg->nu_value = std::nan("");
}

long mixgbn_auto_thin(long iters) { return std::max(1L, iters / 1000); }

mixgbn_status mixgbn_sample_run(const mixgbn_dataset* data, const mixgbn_chain_config* cfg, int chains,
                                mixgbn_sample** out_chains, mixgbn_sample** out_pooled) {
  return guarded([&] {
    require(data && cfg, "sample: null argument");
    require(chains >= 1, "sample: need at least one chain");
    const auto& d = data->data;
    mixgbn::ChainConfig c;
    c.model = to_model(cfg->model);
    c.total_iters = cfg->iters;
    c.thin = cfg->thin > 0 ? cfg->thin : mixgbn_auto_thin(cfg->iters);
    c.seed = cfg->seed;
    if (cfg->max_fanin > 0) c.max_fanin = cfg->max_fanin;
    c.gibbs_moves_per_iter = cfg->gibbs_moves_per_iter;
    c.init_components = cfg->init_components;
    c.edge_penalty = cfg->edge_penalty;
    c.hp = resolve_hyperparameters(*cfg, d.cols());
    if (cfg->labels) {
      std::vector<int> z(static_cast<std::size_t>(d.rows()));
      for (int i = 0; i < d.rows(); ++i) z[i] = cfg->labels[i] - 1;
      c.initial_assignment = mixgbn::Assignment::from_labels(z);
      c.fixed_assignment = true;
    }
    c.validate(d);
    auto results = mixgbn::run_chains(d, c, chains);
    if (out_pooled) {
      auto pooled = chains == 1 ? results.front() : mixgbn::pool_samples(results);
      *out_pooled = new mixgbn_sample{std::move(pooled), chains};
    }
    if (out_chains)
      for (int k = 0; k < chains; ++k) out_chains[k] = new mixgbn_sample{std::move(results[k]), 1};
  });
}

mixgbn_status mixgbn_sample_write(const mixgbn_sample* s, const char* jsonl_path) {
  return guarded([&] {
    require(s && jsonl_path, "sample: null argument");
    mixgbn::write_sample(jsonl_path, s->sample, s->chains);
  });
}

mixgbn_status mixgbn_sample_read(const char* jsonl_path, mixgbn_sample** out) {
  return guarded([&] {
    require(jsonl_path && out, "sample: null argument");
    *out = new mixgbn_sample{mixgbn::read_sample(jsonl_path), 1};
  });
}

void mixgbn_sample_free(mixgbn_sample* s) { delete s; }
int mixgbn_sample_draws(const mixgbn_sample* s) { return s ? static_cast<int>(s->sample.draws.size()) : 0; }
int mixgbn_sample_nodes(const mixgbn_sample* s) { return s ? s->sample.n : 0; }
int mixgbn_sample_observations(const mixgbn_sample* s) { return s ? s->sample.m : 0; }
double mixgbn_sample_acceptance(const mixgbn_sample* s) {
  return s ? s->sample.stats.structure_acceptance() : 0.0;
}

mixgbn_status mixgbn_sample_config_json(const mixgbn_sample* s, char** out) {
  return guarded([&] {
    require(s && out, "sample: null argument");
    *out = dup_string(mixgbn::chain_config_to_json(s->sample.config).dump());
  });
}

mixgbn_status mixgbn_edge_scores(const mixgbn_sample* s, double* out) {
  return guarded([&] {
    require(s && out, "edge scores: null argument");
    copy_matrix(mixgbn::edge_scores(s->sample), out);
  });
}

mixgbn_status mixgbn_coallocation(const mixgbn_sample* s, double* out) {
  return guarded([&] {
    require(s && out, "coallocation: null argument");
    copy_matrix(mixgbn::coallocation(s->sample), out);
  });
}

mixgbn_status mixgbn_predict_network(const double* scores, int n, double psi, char** out) {
  return guarded([&] {
    require(scores && out && n > 0, "predict: invalid argument");
    require(psi >= 0.0 && psi <= 1.0, "predict: threshold must lie in [0, 1]");
    *out = dup_string(mixgbn::format_edge_list(mixgbn::predict_network(matrix_from(scores, n, n), psi)));
  });
}

mixgbn_status mixgbn_auc_pr(const double* scores, int n, const mixgbn_truth* truth, double* out) {
  return guarded([&] {
    require(scores && truth && out, "auc: null argument");
    require(truth->truth.dag.size() == n, "auc: truth has a different number of nodes");
    *out = mixgbn::auc_pr(matrix_from(scores, n, n), truth->truth.cpdag);
  });
}

mixgbn_status mixgbn_rshd(const double* scores, int n, double psi, const mixgbn_truth* truth, double* out) {
  return guarded([&] {
    require(scores && truth && out, "rshd: null argument");
    require(truth->truth.dag.size() == n, "rshd: truth has a different number of nodes");
    *out = mixgbn::rshd(mixgbn::predict_network(matrix_from(scores, n, n), psi), truth->truth.cpdag);
  });
}

mixgbn_status mixgbn_predictive_logprob(const mixgbn_sample* s, const mixgbn_dataset* train,
                                        const mixgbn_dataset* holdout, int draws_per_state, uint64_t seed,
                                        double* out, double* per_observation) {
  return guarded([&] {
    require(s && train && holdout && out, "predict: null argument");
    require(draws_per_state >= 1, "predict: draws per state must be positive");
    const auto& smp = s->sample;
    require(!smp.draws.empty(), "predict: empty posterior sample");
    require(train->data.cols() == smp.n, "predict: training data does not match the sample's variables");
    require(train->data.rows() == smp.m, "predict: training data does not match the sample's rows");
    require(holdout->data.cols() == smp.n, "predict: holdout has a different number of variables");
    auto rng = mixgbn::RngStream::derive(seed, mixgbn::kStreamParameters, 0);
    std::vector<mixgbn::ThetaDraw> thetas;
    thetas.reserve(smp.draws.size() * static_cast<std::size_t>(draws_per_state));
    for (const auto& d : smp.draws)
      for (int r = 0; r < draws_per_state; ++r)
        thetas.push_back(mixgbn::sample_posterior_params(rng, train->data, d.g, d.z, smp.config.hp,
                                                         smp.config.model));
    std::vector<double> per;
    *out = mixgbn::predictive_logprob(thetas, holdout->data, per_observation ? &per : nullptr);
    if (per_observation) std::copy(per.begin(), per.end(), per_observation);
  });
}

}  // extern "C"
