#pragma once

#include <vector>

#include "assignment.hpp"
#include "dataset.hpp"
#include "graph.hpp"
#include "numkern.hpp"
#include "scoring.hpp"

namespace mixgbn {

// Dirichlet(1,...,1)-multinomial prior on z restricted to non-empty
// components: -ln C(m-1, K-1) + sum ln m_k! - ln m!.
double log_p_z(const Assignment& z);

// Poisson(lambda) prior on the number of components.
double log_p_k(int k, double lambda);

// Result of the first half of a collapsed Gibbs move.
struct GibbsSelection {
  int obs = -1;
  int from = -1;          // component the observation left (pre-deletion label)
  bool deleted = false;   // that component became empty and was removed
  Assignment reduced;     // obs unassigned
  int tilde_k = 0;        // components left after removal
};

// Uniform component, then a uniform member of it.
GibbsSelection gibbs_select(RngStream& rng, const Assignment& z);

// Unnormalized log weights for placing the observation into component
// s = 0..tilde_k-1 or a fresh component s = tilde_k:
//   existing: ln((m - K~)/K~) + ln p(K~)     + log p(D | g, z_{-i}, z_i = s)
//   new:      ln(K~)          + ln p(K~ + 1) + log p(D | g, z_{-i}, z_i = K~)
// `marginals[s]` supplies the log marginal likelihood of each placement.
std::vector<double> gibbs_log_weights(int m, int tilde_k, double lambda,
                                      const std::vector<double>& marginals);

// Normalized placement probabilities (log-sum-exp). tilde_k == 0 only arises
// for m == 1 and gives the certain re-creation of component 0.
std::vector<double> gibbs_weights(const Dataset& data, const Dag& g, const Hyperparameters& hp,
                                  Model model, const Assignment& reduced, int obs, int tilde_k);

std::vector<double> normalize_log_weights(const std::vector<double>& log_w);

}  // namespace mixgbn
