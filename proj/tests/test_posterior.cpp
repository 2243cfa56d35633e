#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "exact.hpp"
#include "generators.hpp"
#include "posterior.hpp"

using namespace mixgbn;

namespace {

// -P_ab / sqrt(P_aa P_bb) of the inverse of sigma restricted to {a, b} + s.
double partial_correlation(const Matrix& sigma, int a, int b, const std::vector<int>& s) {
  std::vector<int> idx{a, b};
  idx.insert(idx.end(), s.begin(), s.end());
  Matrix sub(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = sigma(idx[i], idx[j]);
  const Matrix p = sub.inverse();
  return -p(0, 1) / std::sqrt(p(0, 0) * p(1, 1));
}

Matrix sem_oracle(const Dag& g, const Matrix& coef, const Vector& noise) {
  const int n = g.size();
  Matrix b = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : g.parents(i)) b(i, j) = coef(i, j);
  const Matrix a = (Matrix::Identity(n, n) - b).inverse();
  return a * noise.asDiagonal() * a.transpose();
}

}  // namespace

TEST_CASE("dirichlet posterior parameters are counts plus one") {
  RngStream rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.index(12));
    const auto z = gen::assignment(rng, m, 1 + static_cast<int>(rng.index(m)));
    const auto a = dirichlet_posterior(z);
    REQUIRE(static_cast<int>(a.size()) == z.components());
    for (int k = 0; k < z.components(); ++k) CHECK(a[k] == z.count(k) + 1.0);
  }
}

TEST_CASE("posterior location shrinks toward nu") {
  ComponentStats s;
  s.count = 3;
  s.mean = Vector::Constant(2, 4.0);
  ComponentPrior p;
  p.nu = Vector::Zero(2);
  p.alpha_mu = 1.0;
  const Vector loc = posterior_location(s, p);
  CHECK(loc(0) == doctest::Approx(3.0));
  CHECK(loc(1) == doctest::Approx(3.0));
}

TEST_CASE("sem covariance matches (I-B)^-1 D (I-B)^-T") {
  RngStream rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(6));
    const auto g = gen::dag(rng, n);
    Matrix coef = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j : g.parents(i)) coef(i, j) = rng.normal();
    Vector noise(n);
    for (int i = 0; i < n; ++i) noise(i) = 0.2 + rng.uniform();
    CHECK((sem_covariance(g, coef, noise) - sem_oracle(g, coef, noise)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("projection leaves complete graphs alone") {
  RngStream rng(3);
  for (int n = 1; n <= 5; ++n) {
    const Matrix sigma = gen::spd(rng, n);
    CHECK((dag_coherent_covariance(sigma, Dag::complete(n)) - sigma).cwiseAbs().maxCoeff() < 1e-10);
    // any topological relabeling of a complete graph too
    const auto g = gen::dag(rng, n, 1.0);
    CHECK((dag_coherent_covariance(sigma, g) - sigma).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("projection keeps family blocks of perfect graphs") {
  RngStream rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(4));
    const auto g = gen::dag(rng, n);
    const Matrix sigma = gen::spd(rng, n);
    const Matrix p = dag_coherent_covariance(sigma, g);
    for (int i = 0; i < n; ++i) {
      // family blocks survive when every parent set is complete
      bool perfect = true;
      for (int v = 0; v < n; ++v)
        for (int a : g.parents(v))
          for (int b : g.parents(v))
            if (a != b && !g.adjacent(a, b)) perfect = false;
      if (g.parents(i).empty() || perfect) CHECK(p(i, i) == doctest::Approx(sigma(i, i)));
      if (perfect)
        for (int j : g.parents(i)) CHECK(p(i, j) == doctest::Approx(sigma(i, j)));
    }
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("projected covariance encodes exactly the d-separations of the graph") {
  RngStream rng(5);
  for (int n = 2; n <= 4; ++n) {
    const auto dags = oracle::all_dags(n);
    const Matrix sigma = gen::spd(rng, n);
    std::map<std::pair<std::set<std::pair<int, int>>, std::set<std::tuple<int, int, int>>>, Matrix> by_class;
    for (const auto a : dags) {
      const auto g = exact::to_dag(a, n);
      const Matrix p = dag_coherent_covariance(sigma, g);
      for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
          std::vector<int> rest;
          for (int v = 0; v < n; ++v)
            if (v != x && v != y) rest.push_back(v);
          for (unsigned mask = 0; mask < (1u << rest.size()); ++mask) {
            std::vector<int> s;
            for (std::size_t b = 0; b < rest.size(); ++b)
              if (mask >> b & 1u) s.push_back(rest[b]);
            const double r = std::abs(partial_correlation(p, x, y, s));
            if (oracle::d_separated(a, n, x, y, s))
              CHECK(r < 1e-10);
            else
              CHECK(r > 1e-6);
          }
        }
      const auto key = oracle::class_key(a, n);
      const auto it = by_class.find(key);
      if (it == by_class.end())
        by_class.emplace(key, p);
      else
        CHECK((it->second - p).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("projection rejects bad input") {
  CHECK_THROWS_AS(dag_coherent_covariance(Matrix::Identity(3, 3), Dag(2)), InvalidArgument);
  Matrix singular = Matrix::Ones(2, 2);
  Dag g(2);
  g.add_edge(0, 1);
  CHECK_THROWS(dag_coherent_covariance(singular, g));
}

TEST_CASE("parameter draws have the conjugate posterior moments") {
  RngStream rng(6);
  const int n = 2;
  const int m = 12;
  const auto d = gen::data(rng, m, n);
  const auto z = Assignment::from_labels({0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1});
  auto hp = Hyperparameters::defaults(n);
  const auto g = Dag::complete(n);

  // posterior scale and locations written out from the raw rows
  Matrix t_post = hp.t_dagger;
  std::vector<Vector> loc;
  for (int k = 0; k < 2; ++k) {
    const auto& rows = z.members(k);
    const double mk = static_cast<double>(rows.size());
    Vector mean = Vector::Zero(n);
    for (int r : rows) mean += d.values.row(r).transpose();
    mean /= mk;
    for (int r : rows) {
      const Vector e = d.values.row(r).transpose() - mean;
      t_post += e * e.transpose();
    }
    const Vector dm = hp.nu - mean;
    t_post += hp.alpha_mu * mk / (hp.alpha_mu + mk) * dm * dm.transpose();
    loc.push_back((hp.alpha_mu * hp.nu + mk * mean) / (hp.alpha_mu + mk));
  }
  const Matrix expect_w = (hp.alpha_w + m) * t_post.inverse();

  const int draws = 40000;
  Matrix mean_w = Matrix::Zero(n, n);
  std::vector<Vector> mean_mu(2, Vector::Zero(n));
  double mean_pi0 = 0.0;
  RngStream prng(7);
  for (int r = 0; r < draws; ++r) {
    const auto th = sample_posterior_params(prng, d, g, z, hp, Model::M2);
    REQUIRE(th.components() == 2);
    REQUIRE(th.covariances.size() == 1);
    CHECK(th.weights[0] + th.weights[1] == doctest::Approx(1.0));
    mean_w += spd_inverse(th.covariance(0)) / draws;
    for (int k = 0; k < 2; ++k) mean_mu[k] += th.means[k] / draws;
    mean_pi0 += th.weights[0] / draws;
  }
  CHECK((mean_w - expect_w).cwiseAbs().maxCoeff() < 0.02 * expect_w.cwiseAbs().maxCoeff());
  for (int k = 0; k < 2; ++k) CHECK((mean_mu[k] - loc[k]).cwiseAbs().maxCoeff() < 0.02);
  CHECK(mean_pi0 == doctest::Approx(6.0 / 14.0).epsilon(0.02));

  const auto th1 = sample_posterior_params(prng, d, g, z, hp, Model::M1);
  CHECK(th1.covariances.size() == 2);
  const auto th0 = sample_posterior_params(prng, d, g, z, hp, Model::H);
  CHECK(th0.components() == 1);
  CHECK(th0.weights[0] == 1.0);
}

TEST_CASE("parameter draws respect the sampled graph") {
  RngStream rng(8);
  const auto d = gen::data(rng, 30, 3);
  Dag g(3);
  g.add_edge(0, 2);
  g.add_edge(1, 2);
  const auto z = gen::assignment(rng, 30, 2);
  for (Model model : {Model::M1, Model::M2}) {
    for (int r = 0; r < 20; ++r) {
      const auto th = sample_posterior_params(rng, d, g, z, Hyperparameters::defaults(3), model);
      for (const auto& c : th.covariances) CHECK(std::abs(c(0, 1)) < 1e-10);  // marginally independent
    }
  }
}

TEST_CASE("mixture density") {
  ThetaDraw th;
  th.model = Model::M2;
  th.weights = {1.0};
  th.means = {Vector::Zero(1)};
  th.covariances = {Matrix::Identity(1, 1)};
  Vector x(1);
  x << 0.0;
  CHECK(mixture_logdensity(th, x) == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)));

  th.weights = {0.25, 0.75};
  Vector mu(1);
  mu << 2.0;
  th.means = {Vector::Zero(1), mu};
  x << 1.0;
  const double phi = std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi);
  CHECK(mixture_logdensity(th, x) == doctest::Approx(std::log(phi)));

  th.model = Model::M1;
  Matrix wide(1, 1);
  wide << 4.0;
  th.covariances = {Matrix::Identity(1, 1), wide};
  const double p2 = std::exp(-0.125) / std::sqrt(8.0 * std::numbers::pi);
  CHECK(mixture_logdensity(th, x) == doctest::Approx(std::log(0.25 * phi + 0.75 * p2)));
}

TEST_CASE("predictive log probability") {
  ThetaDraw a;
  a.weights = {1.0};
  a.means = {Vector::Zero(1)};
  a.covariances = {Matrix::Identity(1, 1)};
  ThetaDraw b = a;
  b.means = {Vector::Constant(1, 1.0)};
  Dataset h;
  h.values.resize(2, 1);
  h.values << 0.0, 1.0;
  h.names = {"X"};

  const double c = -0.5 * std::log(2.0 * std::numbers::pi);
  std::vector<double> per;
  const std::vector<ThetaDraw> one{a};
  CHECK(predictive_logprob(one, h, &per) == doctest::Approx(c - 0.25));
  REQUIRE(per.size() == 2);
  CHECK(per[0] == doctest::Approx(c));
  CHECK(per[1] == doctest::Approx(c - 0.5));

  // average of joint likelihoods, not of logs
  const std::vector<ThetaDraw> two{a, b};
  const double joint = std::log(0.5 * (std::exp(2 * c - 0.5) + std::exp(2 * c - 0.5)));
  CHECK(predictive_logprob(two, h) == doctest::Approx(joint / 2.0));
  const std::vector<ThetaDraw> swapped{b, a};
  CHECK(predictive_logprob(swapped, h) == doctest::Approx(predictive_logprob(two, h)));

  Dataset flipped = h;
  flipped.values << 1.0, 0.0;
  CHECK(predictive_logprob(two, flipped) == doctest::Approx(predictive_logprob(two, h)));

  // far-away rows stay finite in log space
  Dataset far = h;
  far.values << 60.0, -60.0;
  CHECK(std::isfinite(predictive_logprob(two, far)));

  CHECK_THROWS_AS(predictive_logprob(std::span<const ThetaDraw>{}, h), InvalidArgument);
  Dataset wrong;
  wrong.values = Matrix::Zero(1, 2);
  CHECK_THROWS_AS(predictive_logprob(one, wrong), InvalidArgument);
}
