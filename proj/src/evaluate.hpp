#pragma once

#include <vector>

#include "assignment.hpp"
#include "graph.hpp"
#include "mcmc.hpp"
#include "numkern.hpp"

namespace mixgbn {

// (i, j): fraction of draws with z_i == z_j. Symmetric, unit diagonal.
Matrix coallocation(const std::vector<Assignment>& draws);
Matrix coallocation(const PosteriorSample& sample);

// (i, j): fraction of draws whose CPDAG has i -> j or i -- j.
Matrix edge_scores(const std::vector<Dag>& draws, int n);
Matrix edge_scores(const PosteriorSample& sample);

// Pairs whose larger score strictly exceeds psi. A pair is undirected when
// the two scores differ by less than 0.25, otherwise directed toward the
// larger score.
Cpdag predict_network(const Matrix& scores, double psi);

inline constexpr double kDefaultPsi = 0.75;
inline constexpr double kUndirectedGap = 0.25;

// Area under the precision-recall curve with step interpolation. Ordered
// pairs are positives when truth has i -> j or i -- j. Tied scores enter
// together. Throws InvalidArgument when truth has no edge.
double auc_pr(const Matrix& scores, const Cpdag& truth);

// Number of node pairs whose status (absent, undirected, a->b, b->a)
// differs, over n(n-1)/2.
double rshd(const Cpdag& prediction, const Cpdag& truth);

}  // namespace mixgbn
