// Exhaustive posterior over (DAG, allocation) for tiny problems.
#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "allocation.hpp"
#include "mcmc.hpp"
#include "oracles.hpp"

namespace exact {

using mixgbn::Matrix;

struct Posterior {
  std::vector<oracle::Adj> dags;
  std::vector<double> dag_prob;     // marginal over allocations
  Matrix edge;                      // P(i -> j in the DAG)
  Matrix coalloc;                   // P(z_a == z_b)
  std::map<std::vector<int>, double> partition_prob;  // canonical labels
};

inline mixgbn::Dag to_dag(oracle::Adj a, int n) {
  mixgbn::Dag g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (oracle::has(a, n, i, j)) g.add_edge(i, j);
  return g;
}

// Sums over every labeled allocation, so partitions carry their K! labelings.
inline Posterior enumerate(const mixgbn::Dataset& d, const mixgbn::Hyperparameters& hp, mixgbn::Model model,
                           const std::vector<oracle::Adj>& dags) {
  const int n = d.cols();
  const int m = d.rows();
  struct State {
    int dag;
    std::vector<int> z;
    double lw;
  };
  std::vector<State> states;
  const int k_max = model == mixgbn::Model::H ? 1 : m;
  for (std::size_t gi = 0; gi < dags.size(); ++gi) {
    const auto g = to_dag(dags[gi], n);
    for (int k = 1; k <= k_max; ++k)
      for (const auto& z : oracle::surjections(m, k)) {
        const auto a = mixgbn::Assignment::from_labels(z);
        states.push_back({static_cast<int>(gi), a.canonical(), mixgbn::joint_logscore(d, g, a, hp, model)});
      }
  }
  std::vector<double> lw;
  for (const auto& s : states) lw.push_back(s.lw);
  const double norm = mixgbn::log_sum_exp(lw);
  Posterior p;
  p.dags = dags;
  p.dag_prob.assign(dags.size(), 0.0);
  p.edge = Matrix::Zero(n, n);
  p.coalloc = Matrix::Zero(m, m);
  for (const auto& s : states) {
    const double w = std::exp(s.lw - norm);
    p.dag_prob[s.dag] += w;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (oracle::has(dags[s.dag], n, i, j)) p.edge(i, j) += w;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (s.z[a] == s.z[b]) p.coalloc(a, b) += w;
    p.partition_prob[s.z] += w;
  }
  return p;
}

}  // namespace exact
