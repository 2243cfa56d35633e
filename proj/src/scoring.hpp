#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "assignment.hpp"
#include "dataset.hpp"
#include "graph.hpp"
#include "numkern.hpp"

namespace mixgbn {

// H: homogeneous BGe, one component holding every row (z ignored).
// M1: full-covariance mixture, one Normal-Wishart prior per component.
// M2: tied-covariance mixture, one Wishart precision shared by all components.
enum class Model { H, M1, M2 };

std::string model_name(Model m);
Model parse_model(const std::string& s);  // "h", "m1", "m2" (any case)

struct ComponentPrior {
  Matrix t_dagger;
  Vector nu;
  double alpha_w = 0.0;
  double alpha_mu = 0.0;
};

// Normal-Wishart prior. The defaults are shared by all components; entries of
// `per_component` override them for component k (k-th entry). M2 always uses
// the shared t_dagger and alpha_w, since its precision matrix is tied.
struct Hyperparameters {
  Matrix t_dagger;
  Vector nu;
  double alpha_w = 0.0;
  double alpha_mu = 1.0;
  double lambda = 1.0;  // Poisson rate on K
  std::vector<ComponentPrior> per_component;

  // T = I, nu = 0, alpha_w = n + 1, alpha_mu = 1, lambda = 1.
  static Hyperparameters defaults(int n);

  // Override for component k if present, else (also for k < 0) the shared prior.
  ComponentPrior component(int k) const;
  int dim() const { return static_cast<int>(t_dagger.rows()); }
  // Throws InvalidArgument on a violated constraint (SPD, alpha_w > n-1, ...).
  void validate(int n) const;
};

// Per-component sufficient statistics.
struct ComponentStats {
  int count = 0;
  Vector mean;     // empirical mean
  Matrix scatter;  // sum of (x - mean)(x - mean)^T
  Matrix t;        // scatter + a m/(a+m) (nu - mean)(nu - mean)^T
};

// Two-pass statistics per component of z. Throws on empty components or a
// row count mismatch.
std::vector<ComponentStats> component_stats(const Dataset& data, const Assignment& z,
                                            const Hyperparameters& hp);

// Prior-adjusted scatter T_[k] for given mean/scatter/count.
Matrix adjusted_scatter(const Matrix& scatter, const Vector& mean, int count,
                        const ComponentPrior& prior);

// Running mean and scatter supporting O(n^2) insertion and removal of a row
// (Welford update). Used by the sampler to move one observation at a time.
class RunningStats {
 public:
  explicit RunningStats(int dim = 0);
  static RunningStats from(const ComponentStats& stats);
  void add(const Vector& x);
  void remove(const Vector& x);
  int count() const { return count_; }
  const Vector& mean() const { return mean_; }
  const Matrix& scatter() const { return scatter_; }
  ComponentStats finish(const ComponentPrior& prior) const;

 private:
  int count_ = 0;
  Vector mean_;
  Matrix scatter_;
};

// Evaluates closed-form log marginal likelihoods of variable subsets for one
// fixed allocation. Construction does the O(K n^2) setup; each subset query
// costs one Cholesky of order |L| (two when the prior matrix is not I).
class SubsetScorer {
 public:
  SubsetScorer(Model model, std::vector<ComponentStats> stats, const Hyperparameters& hp);
  // One stand-alone component under its own prior (a factor of M1, or H).
  SubsetScorer(const ComponentStats& stats, const ComponentPrior& prior);

  Model model() const { return model_; }
  int dim() const { return n_; }

  // log p(D^L | z, complete DAG on L); 0 for the empty set.
  double subset_logml(std::span<const int> subset) const;

  // log of the node's factor: f({i} u Pa_i) - f(Pa_i).
  double family_logml(const Dag& g, int node) const;

  double dag_logml(const Dag& g) const;

 private:
  struct Term {
    int count = 0;
    double alpha_w = 0.0;
    double log_ratio = 0.0;  // sum over covered components of ln(a_mu / (a_mu + m_k))
    std::size_t prior = 0;  // index into t_prior_
    Matrix t_post;
  };
  double term_logml(const Term& term, std::span<const int> subset) const;

  Model model_;
  int n_ = 0;
  std::vector<Matrix> t_prior_;
  std::vector<Term> terms_;  // M2: one tied term; M1/H: one per component
};

// Single-subset entry points. `subset` indexes the columns of the full data.
double m2_subset_logml(const Dataset& data, const Assignment& z, const Hyperparameters& hp,
                       std::span<const int> subset);
double m1_subset_logml(const Dataset& data, const Assignment& z, const Hyperparameters& hp,
                       std::span<const int> subset);

// Memo of subset scores keyed by (model, sorted subset, partition of rows).
// One cache must only ever see one dataset and one hyperparameter set.
// Reads take a shared lock, inserts an exclusive one.
class ScoreCache {
 public:
  std::optional<double> find(Model model, std::span<const int> subset,
                             std::uint64_t partition) const;
  void insert(Model model, std::span<const int> subset, std::uint64_t partition, double value);

  // Interns the partition induced by z (or the single-block partition for H).
  std::uint64_t partition_id(Model model, const Assignment& z);

  std::size_t size() const;
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  struct Key {
    Model model;
    std::uint64_t partition;
    std::vector<int> subset;
    bool operator<(const Key& o) const {
      if (model != o.model) return model < o.model;
      if (partition != o.partition) return partition < o.partition;
      return subset < o.subset;
    }
  };
  mutable std::shared_mutex mutex_;
  std::map<Key, double> values_;
  std::map<std::vector<int>, std::uint64_t> partitions_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

// log p(D | z, g) by the decomposition over families. For Model::H the
// assignment is ignored. With a cache, every subset score is looked up there
// first and inserted on a miss.
double dag_logml(const Dataset& data, const Assignment& z, const Dag& g,
                 const Hyperparameters& hp, Model model, ScoreCache* cache = nullptr);

}  // namespace mixgbn
