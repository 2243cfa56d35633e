#include "posterior.hpp"

#include <cmath>

#include "errors.hpp"

namespace mixgbn {

std::vector<double> dirichlet_posterior(const Assignment& z) {
  std::vector<double> a;
  for (int c : z.counts()) a.push_back(c + 1.0);
  return a;
}

Vector posterior_location(const ComponentStats& stats, const ComponentPrior& prior) {
  return (prior.alpha_mu * prior.nu + stats.count * stats.mean) / (prior.alpha_mu + stats.count);
}

Matrix sem_covariance(const Dag& g, const Matrix& coef, const Vector& noise) {
  const int n = g.size();
  if (coef.rows() != n || coef.cols() != n || noise.size() != n)
    throw InvalidArgument("sem_covariance: dimension mismatch");
  const auto topo = g.topological_order();
  Matrix s = Matrix::Zero(n, n);
  std::vector<bool> done(n, false);
  for (int i : topo) {
    const auto& ps = g.parents(i);
    for (int j = 0; j < n; ++j) {
      if (!done[j]) continue;
      double v = 0.0;
      for (int p : ps) v += coef(i, p) * s(p, j);
      s(i, j) = s(j, i) = v;
    }
    double v = noise(i);
    for (int p : ps) v += coef(i, p) * s(p, i);
    s(i, i) = v;
    done[i] = true;
  }
  return s;
}

Matrix dag_coherent_covariance(const Matrix& sigma, const Dag& g) {
  const int n = g.size();
  if (sigma.rows() != n || sigma.cols() != n)
    throw InvalidArgument("dag_coherent_covariance: dimension mismatch");
  Matrix coef = Matrix::Zero(n, n);
  Vector noise(n);
  for (int i = 0; i < n; ++i) {
    const auto& ps = g.parents(i);
    if (ps.empty()) {
      noise(i) = sigma(i, i);
      continue;
    }
    const Matrix spp = submatrix(sigma, ps);
    Vector spi(static_cast<Eigen::Index>(ps.size()));
    for (std::size_t a = 0; a < ps.size(); ++a) spi(a) = sigma(ps[a], i);
    const Vector b = cholesky(spp).solve(spi);
    for (std::size_t a = 0; a < ps.size(); ++a) coef(i, ps[a]) = b(a);
    noise(i) = sigma(i, i) - spi.dot(b);
    if (!(noise(i) > 0.0))
      throw NotPositiveDefinite("dag_coherent_covariance: non-positive residual variance");
  }
  return sem_covariance(g, coef, noise);
}

namespace {

std::vector<double> sample_dirichlet(RngStream& rng, const std::vector<double>& alpha) {
  std::vector<double> w(alpha.size());
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) total += w[k] = rng.gamma(alpha[k]);
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

ThetaDraw sample_posterior_params(RngStream& rng, const Dataset& data, const Dag& g,
                                  const Assignment& z, const Hyperparameters& hp, Model model) {
  if (g.size() != data.cols()) throw InvalidArgument("sample_posterior_params: graph size mismatch");
  const Assignment used = model == Model::H ? Assignment::single(data.rows()) : z;
  const auto stats = component_stats(data, used, hp);
  const int k_count = used.components();

  ThetaDraw theta;
  theta.model = model;
  theta.weights = k_count == 1 ? std::vector<double>{1.0}
                               : sample_dirichlet(rng, dirichlet_posterior(used));

  std::vector<Matrix> coherent;  // one per component (M1) or shared
  if (model == Model::M1) {
    for (int k = 0; k < k_count; ++k) {
      const auto prior = hp.component(k);
      const Matrix w = sample_wishart(rng, prior.alpha_w + stats[k].count, prior.t_dagger + stats[k].t);
      coherent.push_back(dag_coherent_covariance(spd_inverse(w), g));
    }
  } else {
    Matrix t_post = hp.t_dagger;
    for (const auto& s : stats) t_post += s.t;
    const Matrix w = sample_wishart(rng, hp.alpha_w + data.rows(), t_post);
    coherent.push_back(dag_coherent_covariance(spd_inverse(w), g));
  }

  for (int k = 0; k < k_count; ++k) {
    const auto prior = hp.component(k);
    const Matrix& cov = coherent.size() == 1 ? coherent.front() : coherent[k];
    const Vector loc = posterior_location(stats[k], prior);
    theta.means.push_back(sample_mvn(rng, loc, cov / (prior.alpha_mu + stats[k].count)));
  }
  theta.covariances = std::move(coherent);
  return theta;
}

namespace {

struct Prepared {
  std::vector<double> log_w;
  const std::vector<Vector>* means;
  std::vector<Eigen::LLT<Matrix>> chol;
  bool shared;
};

Prepared prepare(const ThetaDraw& theta) {
  Prepared p;
  for (double w : theta.weights) p.log_w.push_back(std::log(w));
  p.means = &theta.means;
  for (const auto& c : theta.covariances) p.chol.push_back(cholesky(c));
  p.shared = theta.covariances.size() == 1;
  return p;
}

double mixture_logdensity(const Prepared& p, const Vector& x) {
  std::vector<double> terms(p.log_w.size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    terms[k] = p.log_w[k] + logdensity_mvn(x, (*p.means)[k], p.shared ? p.chol.front() : p.chol[k]);
  return log_sum_exp(terms);
}

}  // namespace

double mixture_logdensity(const ThetaDraw& theta, const Vector& x) {
  return mixture_logdensity(prepare(theta), x);
}

double predictive_logprob(std::span<const ThetaDraw> draws, const Dataset& holdout,
                          std::vector<double>* per_observation) {
  if (draws.empty()) throw InvalidArgument("predictive_logprob: no parameter draws");
  const int m = holdout.rows();
  if (m < 1) throw InvalidArgument("predictive_logprob: empty holdout data");
  for (const auto& d : draws) {
    if (d.means.empty() || d.means.front().size() != holdout.cols())
      throw InvalidArgument("predictive_logprob: dimension mismatch between draws and holdout data");
  }
  const auto r_count = draws.size();
  std::vector<double> joint(r_count, 0.0);
  std::vector<std::vector<double>> point(static_cast<std::size_t>(m), std::vector<double>(r_count));
  for (std::size_t r = 0; r < r_count; ++r) {
    const auto prep = prepare(draws[r]);
    for (int i = 0; i < m; ++i) {
      const double l = mixture_logdensity(prep, holdout.values.row(i).transpose());
      point[i][r] = l;
      joint[r] += l;
    }
  }
  const double log_r = std::log(static_cast<double>(r_count));
  if (per_observation) {
    per_observation->resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) (*per_observation)[i] = log_sum_exp(point[i]) - log_r;
  }
  return (log_sum_exp(joint) - log_r) / m;
}

}  // namespace mixgbn
