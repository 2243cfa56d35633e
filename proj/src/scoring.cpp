#include "scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace mixgbn {

std::string model_name(Model m) {
  switch (m) {
    case Model::H: return "h";
    case Model::M1: return "m1";
    case Model::M2: return "m2";
  }
  return "?";
}

Model parse_model(const std::string& s) {
  std::string t;
  for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "h") return Model::H;
  if (t == "m1") return Model::M1;
  if (t == "m2") return Model::M2;
  throw InvalidArgument("unknown model '" + s + "' (expected h, m1 or m2)");
}

Hyperparameters Hyperparameters::defaults(int n) {
  Hyperparameters hp;
  hp.t_dagger = Matrix::Identity(n, n);
  hp.nu = Vector::Zero(n);
  hp.alpha_w = n + 1.0;
  hp.alpha_mu = 1.0;
  hp.lambda = 1.0;
  return hp;
}

ComponentPrior Hyperparameters::component(int k) const {
  if (k >= 0 && k < static_cast<int>(per_component.size())) return per_component[k];
  return {t_dagger, nu, alpha_w, alpha_mu};
}

void Hyperparameters::validate(int n) const {
  const auto check = [n](const Matrix& t, const Vector& nu_, double aw, double amu,
                         const std::string& what) {
    if (t.rows() != n || t.cols() != n)
      throw InvalidArgument(what + ": prior matrix must be " + std::to_string(n) + "x" +
                            std::to_string(n));
    if (!t.isApprox(t.transpose(), 1e-12)) throw InvalidArgument(what + ": prior matrix not symmetric");
    try {
      cholesky(t);
    } catch (const NotPositiveDefinite&) {
      throw InvalidArgument(what + ": prior matrix not positive definite");
    }
    if (nu_.size() != n) throw InvalidArgument(what + ": prior mean has wrong length");
    if (!(aw > n - 1.0)) throw InvalidArgument(what + ": alpha_w must exceed n-1");
    if (!(amu > 0.0)) throw InvalidArgument(what + ": alpha_mu must be positive");
  };
  check(t_dagger, nu, alpha_w, alpha_mu, "hyperparameters");
  for (std::size_t k = 0; k < per_component.size(); ++k) {
    const auto& c = per_component[k];
    check(c.t_dagger, c.nu, c.alpha_w, c.alpha_mu, "component " + std::to_string(k + 1));
  }
  if (!(lambda > 0.0)) throw InvalidArgument("hyperparameters: lambda must be positive");
}

Matrix adjusted_scatter(const Matrix& scatter, const Vector& mean, int count,
                        const ComponentPrior& prior) {
  const Vector d = prior.nu - mean;
  const double c = prior.alpha_mu * count / (prior.alpha_mu + count);
  return scatter + c * d * d.transpose();
}

std::vector<ComponentStats> component_stats(const Dataset& data, const Assignment& z,
                                            const Hyperparameters& hp) {
  if (z.size() != data.rows())
    throw InvalidArgument("component_stats: assignment length " + std::to_string(z.size()) +
                          " does not match " + std::to_string(data.rows()) + " rows");
  if (!z.complete()) throw InvalidArgument("component_stats: unassigned observation");
  const int n = data.cols();
  std::vector<ComponentStats> out(static_cast<std::size_t>(z.components()));
  for (int k = 0; k < z.components(); ++k) {
    const auto& rows = z.members(k);
    if (rows.empty()) throw InvalidArgument("component_stats: empty component");
    auto& s = out[k];
    s.count = static_cast<int>(rows.size());
    s.mean = Vector::Zero(n);
    for (int r : rows) s.mean += data.values.row(r).transpose();
    s.mean /= s.count;
    s.scatter = Matrix::Zero(n, n);
    for (int r : rows) {
      const Vector d = data.values.row(r).transpose() - s.mean;
      s.scatter.selfadjointView<Eigen::Lower>().rankUpdate(d);
    }
    s.scatter = s.scatter.selfadjointView<Eigen::Lower>();
    s.t = adjusted_scatter(s.scatter, s.mean, s.count, hp.component(k));
  }
  return out;
}

RunningStats::RunningStats(int dim)
    : mean_(Vector::Zero(dim)), scatter_(Matrix::Zero(dim, dim)) {}

RunningStats RunningStats::from(const ComponentStats& stats) {
  RunningStats rs(static_cast<int>(stats.mean.size()));
  rs.count_ = stats.count;
  rs.mean_ = stats.mean;
  rs.scatter_ = stats.scatter;
  return rs;
}

void RunningStats::add(const Vector& x) {
  ++count_;
  const Vector d = x - mean_;
  mean_ += d / count_;
  scatter_.noalias() += d * (x - mean_).transpose();
  scatter_ = 0.5 * (scatter_ + scatter_.transpose()).eval();
}

void RunningStats::remove(const Vector& x) {
  if (count_ <= 0) throw InvalidArgument("RunningStats: remove from empty");
  if (count_ == 1) {
    count_ = 0;
    mean_.setZero();
    scatter_.setZero();
    return;
  }
  const Vector old_mean = (count_ * mean_ - x) / (count_ - 1);
  scatter_.noalias() -= (x - old_mean) * (x - mean_).transpose();
  scatter_ = 0.5 * (scatter_ + scatter_.transpose()).eval();
  mean_ = old_mean;
  --count_;
}

ComponentStats RunningStats::finish(const ComponentPrior& prior) const {
  ComponentStats s;
  s.count = count_;
  s.mean = mean_;
  s.scatter = scatter_;
  s.t = adjusted_scatter(scatter_, mean_, count_, prior);
  return s;
}

SubsetScorer::SubsetScorer(Model model, std::vector<ComponentStats> stats,
                           const Hyperparameters& hp)
    : model_(model), n_(hp.dim()) {
  if (stats.empty()) throw InvalidArgument("SubsetScorer: no components");
  for (const auto& s : stats)
    if (s.count < 1) throw InvalidArgument("SubsetScorer: empty component");
  if (model == Model::M2) {
    Term t;
    t_prior_.push_back(hp.t_dagger);
    t.t_post = hp.t_dagger;
    t.alpha_w = hp.alpha_w;
    for (std::size_t k = 0; k < stats.size(); ++k) {
      const auto prior = hp.component(static_cast<int>(k));
      t.count += stats[k].count;
      t.log_ratio += std::log(prior.alpha_mu / (prior.alpha_mu + stats[k].count));
      t.t_post += stats[k].t;
    }
    terms_.push_back(std::move(t));
  } else {
    if (model == Model::H && stats.size() != 1)
      throw InvalidArgument("SubsetScorer: model H takes a single component");
    t_prior_.reserve(stats.size());
    for (std::size_t k = 0; k < stats.size(); ++k) {
      // H always uses the shared prior.
      const auto prior = model == Model::H ? hp.component(-1) : hp.component(static_cast<int>(k));
      t_prior_.push_back(prior.t_dagger);
      Term t;
      t.count = stats[k].count;
      t.alpha_w = prior.alpha_w;
      t.log_ratio = std::log(prior.alpha_mu / (prior.alpha_mu + stats[k].count));
      t.t_post = prior.t_dagger + stats[k].t;
      terms_.push_back(std::move(t));
    }
  }
  for (std::size_t k = 0; k < terms_.size(); ++k) terms_[k].prior = k;
}

SubsetScorer::SubsetScorer(const ComponentStats& stats, const ComponentPrior& prior)
    : model_(Model::M1), n_(static_cast<int>(prior.t_dagger.rows())) {
  if (stats.count < 1) throw InvalidArgument("SubsetScorer: empty component");
  t_prior_.push_back(prior.t_dagger);
  Term t;
  t.count = stats.count;
  t.alpha_w = prior.alpha_w;
  t.log_ratio = std::log(prior.alpha_mu / (prior.alpha_mu + stats.count));
  t.t_post = prior.t_dagger + stats.t;
  terms_.push_back(std::move(t));
}

double SubsetScorer::term_logml(const Term& term, std::span<const int> subset) const {
  const int l = static_cast<int>(subset.size());
  // Degrees of freedom of the l-variate marginal of the Wishart prior.
  const double a = term.alpha_w - n_ + l;
  const double m = term.count;
  const Matrix t_prior = submatrix(t_prior_[term.prior], subset);
  const Matrix t_post = submatrix(term.t_post, subset);
  return -0.5 * l * m * std::log(std::numbers::pi) + 0.5 * l * term.log_ratio +
         log_multigamma(l, 0.5 * (a + m)) - log_multigamma(l, 0.5 * a) +
         0.5 * a * chol_logdet(t_prior) - 0.5 * (a + m) * chol_logdet(t_post);
}

double SubsetScorer::subset_logml(std::span<const int> subset) const {
  if (subset.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : terms_) total += term_logml(t, subset);
  return total;
}

double SubsetScorer::family_logml(const Dag& g, int node) const {
  const auto& ps = g.parents(node);
  std::vector<int> family(ps);
  family.insert(std::lower_bound(family.begin(), family.end(), node), node);
  return subset_logml(family) - subset_logml(ps);
}

double SubsetScorer::dag_logml(const Dag& g) const {
  if (g.size() != n_) throw InvalidArgument("dag_logml: graph size does not match data");
  double total = 0.0;
  for (int i = 0; i < n_; ++i) total += family_logml(g, i);
  return total;
}

namespace {

SubsetScorer make_scorer(const Dataset& data, const Assignment& z, const Hyperparameters& hp,
                         Model model) {
  if (model == Model::H) {
    Hyperparameters shared = hp;
    shared.per_component.clear();
    return SubsetScorer(model, component_stats(data, Assignment::single(data.rows()), shared), shared);
  }
  return SubsetScorer(model, component_stats(data, z, hp), hp);
}

void check_subset(std::span<const int> subset, int n) {
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (subset[k] < 0 || subset[k] >= n) throw InvalidArgument("subset index out of range");
    for (std::size_t j = 0; j < k; ++j)
      if (subset[j] == subset[k]) throw InvalidArgument("duplicate subset index");
  }
}

}  // namespace

double m2_subset_logml(const Dataset& data, const Assignment& z, const Hyperparameters& hp,
                       std::span<const int> subset) {
  check_subset(subset, data.cols());
  return make_scorer(data, z, hp, Model::M2).subset_logml(subset);
}

double m1_subset_logml(const Dataset& data, const Assignment& z, const Hyperparameters& hp,
                       std::span<const int> subset) {
  check_subset(subset, data.cols());
  return make_scorer(data, z, hp, Model::M1).subset_logml(subset);
}

std::optional<double> ScoreCache::find(Model model, std::span<const int> subset,
                                       std::uint64_t partition) const {
  std::shared_lock lock(mutex_);
  const auto it = values_.find(Key{model, partition, {subset.begin(), subset.end()}});
  if (it == values_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void ScoreCache::insert(Model model, std::span<const int> subset, std::uint64_t partition,
                        double value) {
  std::unique_lock lock(mutex_);
  values_.emplace(Key{model, partition, {subset.begin(), subset.end()}}, value);
}

std::uint64_t ScoreCache::partition_id(Model model, const Assignment& z) {
  std::vector<int> canon = model == Model::H ? std::vector<int>{} : z.canonical();
  std::unique_lock lock(mutex_);
  const auto [it, inserted] = partitions_.emplace(std::move(canon), partitions_.size());
  return it->second;
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mutex_);
  return values_.size();
}

double dag_logml(const Dataset& data, const Assignment& z, const Dag& g,
                 const Hyperparameters& hp, Model model, ScoreCache* cache) {
  if (g.size() != data.cols()) throw InvalidArgument("dag_logml: graph size does not match data");
  if (!cache) return make_scorer(data, z, hp, model).dag_logml(g);

  const auto partition = cache->partition_id(model, z);
  std::optional<SubsetScorer> scorer;
  const auto score = [&](const std::vector<int>& subset) {
    if (subset.empty()) return 0.0;
    if (auto hit = cache->find(model, subset, partition)) return *hit;
    if (!scorer) scorer.emplace(make_scorer(data, z, hp, model));
    const double v = scorer->subset_logml(subset);
    cache->insert(model, subset, partition, v);
    return v;
  };
  double total = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const auto& ps = g.parents(i);
    std::vector<int> family(ps);
    family.insert(std::lower_bound(family.begin(), family.end(), i), i);
    total += score(family) - score(ps);
  }
  return total;
}

}  // namespace mixgbn
