#include "allocation.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace mixgbn {

Assignment Assignment::from_labels(const std::vector<int>& labels) {
  Assignment a;
  int k_max = -1;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("assignment: negative label");
    k_max = std::max(k_max, l);
  }
  a.labels_ = labels;
  a.slot_.resize(labels.size());
  a.members_.resize(static_cast<std::size_t>(k_max + 1));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& mem = a.members_[labels[i]];
    a.slot_[i] = static_cast<int>(mem.size());
    mem.push_back(static_cast<int>(i));
  }
  for (const auto& mem : a.members_)
    if (mem.empty()) throw InvalidArgument("assignment: labels are not contiguous (empty component)");
  return a;
}

Assignment Assignment::single(int m) { return from_labels(std::vector<int>(m, 0)); }

std::vector<int> Assignment::counts() const {
  std::vector<int> c;
  c.reserve(members_.size());
  for (const auto& mem : members_) c.push_back(static_cast<int>(mem.size()));
  return c;
}

bool Assignment::remove(int obs) {
  const int k = labels_[obs];
  if (k < 0) throw InvalidArgument("assignment: observation already unassigned");
  auto& mem = members_[k];
  const int s = slot_[obs];
  const int last = mem.back();
  mem[s] = last;
  slot_[last] = s;
  mem.pop_back();
  labels_[obs] = -1;
  if (!mem.empty()) return false;
  members_.erase(members_.begin() + k);
  for (auto& l : labels_)
    if (l > k) --l;
  return true;
}

void Assignment::insert(int obs, int k) {
  if (labels_[obs] >= 0) throw InvalidArgument("assignment: observation already assigned");
  if (k < 0 || k > components()) throw InvalidArgument("assignment: component out of range");
  if (k == components()) members_.emplace_back();
  labels_[obs] = k;
  slot_[obs] = static_cast<int>(members_[k].size());
  members_[k].push_back(obs);
}

bool Assignment::complete() const {
  for (int l : labels_)
    if (l < 0) return false;
  return true;
}

std::vector<int> Assignment::canonical() const {
  std::vector<int> map(members_.size(), -1);
  std::vector<int> out(labels_.size());
  int next = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int l = labels_[i];
    if (l < 0) {
      out[i] = -1;
      continue;
    }
    if (map[l] < 0) map[l] = next++;
    out[i] = map[l];
  }
  return out;
}

double log_p_z(const Assignment& z) {
  const int m = z.size();
  const int k = z.components();
  // ln C(m-1, k-1)
  const double log_binom = std::lgamma(m) - std::lgamma(k) - std::lgamma(m - k + 1);
  double s = -log_binom - std::lgamma(m + 1.0);
  for (int c = 0; c < k; ++c) s += std::lgamma(z.count(c) + 1.0);
  return s;
}

double log_p_k(int k, double lambda) {
  if (k < 1) throw InvalidArgument("log_p_k: k must be positive");
  if (!(lambda > 0.0)) throw InvalidArgument("log_p_k: lambda must be positive");
  return k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
}

GibbsSelection gibbs_select(RngStream& rng, const Assignment& z) {
  GibbsSelection sel;
  sel.from = static_cast<int>(rng.index(static_cast<std::size_t>(z.components())));
  const auto& mem = z.members(sel.from);
  sel.obs = mem[rng.index(mem.size())];
  sel.reduced = z;
  sel.deleted = sel.reduced.remove(sel.obs);
  sel.tilde_k = sel.reduced.components();
  return sel;
}

std::vector<double> gibbs_log_weights(int m, int tilde_k, double lambda,
                                      const std::vector<double>& marginals) {
  if (static_cast<int>(marginals.size()) != tilde_k + 1)
    throw InvalidArgument("gibbs_log_weights: need tilde_k + 1 marginals");
  std::vector<double> w(marginals.size());
  if (tilde_k == 0) {
    w[0] = 0.0;
    return w;
  }
  const double existing =
      (m > tilde_k ? std::log(static_cast<double>(m - tilde_k) / tilde_k)
                   : -std::numeric_limits<double>::infinity()) +
      log_p_k(tilde_k, lambda);
  const double fresh = std::log(static_cast<double>(tilde_k)) + log_p_k(tilde_k + 1, lambda);
  for (int s = 0; s < tilde_k; ++s) w[s] = existing + marginals[s];
  w[tilde_k] = fresh + marginals[tilde_k];
  return w;
}

std::vector<double> normalize_log_weights(const std::vector<double>& log_w) {
  const double total = log_sum_exp(log_w);
  if (!std::isfinite(total)) throw NotPositiveDefinite("gibbs weights: no finite weight");
  std::vector<double> p(log_w.size());
  for (std::size_t s = 0; s < p.size(); ++s) p[s] = std::exp(log_w[s] - total);
  return p;
}

std::vector<double> gibbs_weights(const Dataset& data, const Dag& g, const Hyperparameters& hp,
                                  Model model, const Assignment& reduced, int obs, int tilde_k) {
  if (reduced.label(obs) >= 0) throw InvalidArgument("gibbs_weights: observation still assigned");
  if (tilde_k != reduced.components())
    throw InvalidArgument("gibbs_weights: tilde_k does not match the reduced assignment");
  if (tilde_k == 0) return {1.0};
  std::vector<double> marginals;
  marginals.reserve(static_cast<std::size_t>(tilde_k) + 1);
  for (int s = 0; s <= tilde_k; ++s) {
    Assignment z = reduced;
    z.insert(obs, s);
    marginals.push_back(dag_logml(data, z, g, hp, model));
  }
  return normalize_log_weights(gibbs_log_weights(data.rows(), tilde_k, hp.lambda, marginals));
}

}  // namespace mixgbn
