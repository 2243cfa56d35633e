#pragma once

#include <cstdint>
#include <vector>

#include "assignment.hpp"
#include "dataset.hpp"
#include "graph.hpp"
#include "numkern.hpp"

namespace mixgbn {

struct SimConfig {
  int n = 20;
  int m = 200;
  int k = 4;
  double expected_edges = 20.0;
  std::uint64_t seed = 1;
  std::uint64_t replicate = 0;

  void validate() const;  // throws InvalidArgument
};

struct GroundTruth {
  Dag dag;
  Cpdag cpdag;
  Matrix coef;   // coef(i, j) = b_ij for j in Pa_i, else 0
  Vector noise;  // sigma_i^2
  Matrix sigma;  // implied covariance of the base process
  std::vector<Vector> means;
  Assignment z;
};

// Random DAG with edges j -> i (j < i) each present with probability
// expected_edges / (n(n-1)/2); |b_ij|, sigma_i ~ U[1, 2], random signs on b,
// rescaled so that sigma_i^2 + sum_j b_ij^2 = 1 for every node.
// Base rows ~ N(0, Sigma), component means ~ N(0, I), uniform allocation,
// x_v = base_v + mu_{z_v}.
std::pair<Dataset, GroundTruth> simulate_dataset(const SimConfig& cfg);

// Network and parameters only (steps up to the covariance).
GroundTruth simulate_network(RngStream& rng, int n, double expected_edges);

// m rows from the structural equations of `truth` with zero mean.
Matrix simulate_base_rows(RngStream& rng, const GroundTruth& truth, int m);

}  // namespace mixgbn
