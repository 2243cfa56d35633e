#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace mixgbn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Reproducible random stream. Streams for different purposes are derived
// from one master seed, so chains and replicates never share state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  // Stream for (seed, purpose, chain, replicate), mixed through splitmix64.
  static RngStream derive(std::uint64_t master, std::uint64_t purpose,
                          std::uint64_t chain = 0, std::uint64_t replicate = 0);

  std::uint64_t seed() const { return seed_; }

  double uniform();                      // [0, 1)
  double normal();                       // N(0, 1)
  double gamma(double shape, double scale = 1.0);
  double chi_squared(double dof);
  std::size_t index(std::size_t n);      // uniform on {0..n-1}

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Stream purposes for RngStream::derive.
inline constexpr std::uint64_t kStreamChain = 1;
inline constexpr std::uint64_t kStreamSimulate = 2;
inline constexpr std::uint64_t kStreamParameters = 3;

// ln Gamma_n(a) = n(n-1)/4 ln(pi) + sum_{j=1..n} ln Gamma(a + (1-j)/2).
double log_multigamma(int n, double a);

// Lower Cholesky factor; throws NotPositiveDefinite on a non-positive pivot.
Eigen::LLT<Matrix> cholesky(const Matrix& m);

double chol_logdet(const Matrix& m);

// Principal submatrix M^{L,L}; indices are 0-based, distinct, in range.
Matrix submatrix(const Matrix& m, std::span<const int> indices);

// Wishart draw with density proportional to
//   det(W)^{(dof-n-1)/2} exp(-tr(param W)/2),
// i.e. `param` is an inverse scale and E[W] = dof * param^{-1}. This is the
// convention under which the posterior update T' = T + scatter is additive.
Matrix sample_wishart(RngStream& rng, double dof, const Matrix& param);

Vector sample_mvn(RngStream& rng, const Vector& mean, const Matrix& covariance);

double logdensity_mvn(const Vector& x, const Vector& mean, const Matrix& covariance);

// Same as above with a precomputed factor of the covariance.
double logdensity_mvn(const Vector& x, const Vector& mean, const Eigen::LLT<Matrix>& chol);

// Symmetric positive definite inverse through Cholesky.
Matrix spd_inverse(const Matrix& m);

// log(sum(exp(v))) without overflow; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

}  // namespace mixgbn
