#include "simulate.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"
#include "posterior.hpp"

namespace mixgbn {

void SimConfig::validate() const {
  if (n < 2) throw InvalidArgument("simulate: n must be at least 2");
  if (k < 1) throw InvalidArgument("simulate: K must be at least 1");
  if (m < k) throw InvalidArgument("simulate: m must be at least K");
  const double zeta = 0.5 * n * (n - 1);
  if (!(expected_edges > 0.0) || expected_edges > zeta)
    throw InvalidArgument("simulate: expected edges must lie in (0, " + std::to_string(zeta) + "]");
}

GroundTruth simulate_network(RngStream& rng, int n, double expected_edges) {
  const double p = expected_edges / (0.5 * n * (n - 1));
  GroundTruth t;
  t.dag = Dag(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (rng.uniform() < p) t.dag.add_edge(j, i);
  t.coef = Matrix::Zero(n, n);
  t.noise = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    double sigma = 1.0 + rng.uniform();
    double norm2 = sigma * sigma;
    for (int j : t.dag.parents(i)) {
      const double mag = 1.0 + rng.uniform();
      const double b = rng.uniform() < 0.5 ? -mag : mag;
      t.coef(i, j) = b;
      norm2 += b * b;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    sigma *= scale;
    for (int j : t.dag.parents(i)) t.coef(i, j) *= scale;
    t.noise(i) = sigma * sigma;
  }
  t.sigma = sem_covariance(t.dag, t.coef, t.noise);
  t.cpdag = to_cpdag(t.dag);
  return t;
}

Matrix simulate_base_rows(RngStream& rng, const GroundTruth& truth, int m) {
  const int n = truth.dag.size();
  Matrix x(m, n);
  // Nodes are numbered in topological order, so parents are filled first.
  for (int v = 0; v < m; ++v)
    for (int i = 0; i < n; ++i) {
      double value = std::sqrt(truth.noise(i)) * rng.normal();
      for (int j : truth.dag.parents(i)) value += truth.coef(i, j) * x(v, j);
      x(v, i) = value;
    }
  return x;
}

std::pair<Dataset, GroundTruth> simulate_dataset(const SimConfig& cfg) {
  cfg.validate();
  auto rng = RngStream::derive(cfg.seed, kStreamSimulate, 0, cfg.replicate);
  GroundTruth truth = simulate_network(rng, cfg.n, cfg.expected_edges);
  Dataset data;
  data.values = simulate_base_rows(rng, truth, cfg.m);
  for (int k = 0; k < cfg.k; ++k) {
    Vector mu(cfg.n);
    for (int i = 0; i < cfg.n; ++i) mu(i) = rng.normal();
    truth.means.push_back(std::move(mu));
  }
  std::vector<int> labels(static_cast<std::size_t>(cfg.m));
  for (auto& l : labels) l = static_cast<int>(rng.index(static_cast<std::size_t>(cfg.k)));
  // Relabel by first appearance so that component labels are contiguous even
  // if some component received no observation.
  std::vector<int> map(static_cast<std::size_t>(cfg.k), -1);
  std::vector<Vector> used_means;
  int next = 0;
  for (auto& l : labels) {
    if (map[l] < 0) {
      map[l] = next++;
      used_means.push_back(truth.means[l]);
    }
    l = map[l];
  }
  truth.means = std::move(used_means);
  truth.z = Assignment::from_labels(labels);
  for (int v = 0; v < cfg.m; ++v) data.values.row(v) += truth.means[labels[v]].transpose();
  for (int i = 0; i < cfg.n; ++i) data.names.push_back("X" + std::to_string(i + 1));
  data.labels.emplace();
  for (int l : labels) data.labels->push_back(std::to_string(l + 1));
  return {std::move(data), std::move(truth)};
}

}  // namespace mixgbn
