#include "numkern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace mixgbn {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::derive(std::uint64_t master, std::uint64_t purpose,
                            std::uint64_t chain, std::uint64_t replicate) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ purpose);
  s = splitmix64(s ^ (chain * 0x632be59bd9b4e019ULL));
  s = splitmix64(s ^ (replicate * 0x85157af5ULL + 1));
  return RngStream(s);
}

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::normal() {
  return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::gamma(double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(engine_);
}

double RngStream::chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

std::size_t RngStream::index(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

double log_multigamma(int n, double a) {
  if (n < 1) throw DomainError("log_multigamma: order must be positive");
  if (!(a > 0.5 * (n - 1)))
    throw DomainError("log_multigamma: argument must exceed (n-1)/2, got a=" +
                      std::to_string(a) + " for n=" + std::to_string(n));
  double r = 0.25 * n * (n - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= n; ++j) r += std::lgamma(a + 0.5 * (1 - j));
  return r;
}

Eigen::LLT<Matrix> cholesky(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("cholesky: matrix not square");
  Eigen::LLT<Matrix> llt(m);
  const auto diag = llt.matrixLLT().diagonal();
  if (llt.info() != Eigen::Success || !diag.allFinite() || (diag.array() <= 0.0).any())
    throw NotPositiveDefinite("cholesky: non-positive pivot (matrix of order " +
                              std::to_string(m.rows()) + ")");
  return llt;
}

double chol_logdet(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  const auto llt = cholesky(m);
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

Matrix submatrix(const Matrix& m, std::span<const int> indices) {
  const auto n = static_cast<int>(m.rows());
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int i : indices) {
    if (i < 0 || i >= n) throw InvalidArgument("submatrix: index out of range");
    if (seen[i]) throw InvalidArgument("submatrix: duplicate index");
    seen[i] = true;
  }
  const auto l = static_cast<Eigen::Index>(indices.size());
  Matrix out(l, l);
  for (Eigen::Index a = 0; a < l; ++a)
    for (Eigen::Index b = 0; b < l; ++b) out(a, b) = m(indices[a], indices[b]);
  return out;
}

Matrix sample_wishart(RngStream& rng, double dof, const Matrix& param) {
  const auto n = param.rows();
  if (!(dof > static_cast<double>(n) - 1.0))
    throw DomainError("sample_wishart: dof must exceed n-1");
  // param = L L^T with U = L^T, so param^{-1} = U^{-1} U^{-T}. With A the
  // Bartlett factor of W_n(dof, I), W = U^{-1} A A^T U^{-T}.
  const auto llt = cholesky(param);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Matrix b = llt.matrixU().solve(a);
  Matrix w = b * b.transpose();
  return 0.5 * (w + w.transpose());
}

Vector sample_mvn(RngStream& rng, const Vector& mean, const Matrix& covariance) {
  if (mean.size() != covariance.rows())
    throw InvalidArgument("sample_mvn: dimension mismatch");
  const auto llt = cholesky(covariance);
  Vector xi(mean.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
  return mean + llt.matrixL() * xi;
}

double logdensity_mvn(const Vector& x, const Vector& mean, const Eigen::LLT<Matrix>& chol) {
  const auto n = x.size();
  if (mean.size() != n || chol.rows() != n)
    throw InvalidArgument("logdensity_mvn: dimension mismatch");
  const Vector y = chol.matrixL().solve(x - mean);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(chol.matrixLLT()(i, i));
  return -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) - logdet -
         0.5 * y.squaredNorm();
}

double logdensity_mvn(const Vector& x, const Vector& mean, const Matrix& covariance) {
  return logdensity_mvn(x, mean, cholesky(covariance));
}

Matrix spd_inverse(const Matrix& m) {
  const auto llt = cholesky(m);
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace mixgbn
