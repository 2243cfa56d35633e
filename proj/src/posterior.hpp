#pragma once

#include <span>
#include <vector>

#include "assignment.hpp"
#include "dataset.hpp"
#include "graph.hpp"
#include "numkern.hpp"
#include "scoring.hpp"

namespace mixgbn {

// One draw of mixture parameters. M1 carries one covariance per component,
// M2 and H a single shared one.
struct ThetaDraw {
  Model model = Model::M2;
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;

  int components() const { return static_cast<int>(weights.size()); }
  const Matrix& covariance(int k) const {
    return covariances.size() == 1 ? covariances.front() : covariances[k];
  }
};

// Dirichlet posterior parameters of the weights given z: m_k + 1.
std::vector<double> dirichlet_posterior(const Assignment& z);

// Posterior mean location mu_k = (alpha_mu nu + m_k xbar) / (alpha_mu + m_k).
Vector posterior_location(const ComponentStats& stats, const ComponentPrior& prior);

// Covariance of the linear Gaussian system X_i = sum_{j in Pa_i} b_ij X_j + e_i
// with coef(i, j) = b_ij and noise variances `noise`.
Matrix sem_covariance(const Dag& g, const Matrix& coef, const Vector& noise);

// Regression projection of a complete-graph covariance onto g: per node the
// coefficients on its parents and the residual variance are read off
// `sigma`, and the covariance implied by that linear system is returned.
// Complete graphs come back unchanged; equivalent graphs give equal results.
Matrix dag_coherent_covariance(const Matrix& sigma, const Dag& g);

// Draws (weights, precision(s), means) from the conjugate posterior given
// (g, z), projecting each covariance onto g before drawing the means.
ThetaDraw sample_posterior_params(RngStream& rng, const Dataset& data, const Dag& g,
                                  const Assignment& z, const Hyperparameters& hp, Model model);

// Log mixture density of one observation.
double mixture_logdensity(const ThetaDraw& theta, const Vector& x);

// (1/m*) ln[(1/R) sum_r prod_i p(x*_i | theta_r)], all in log space. When
// `per_observation` is given it receives ln[(1/R) sum_r p(x*_i | theta_r)].
double predictive_logprob(std::span<const ThetaDraw> draws, const Dataset& holdout,
                          std::vector<double>* per_observation = nullptr);

}  // namespace mixgbn
