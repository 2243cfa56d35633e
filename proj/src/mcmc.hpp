#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "assignment.hpp"
#include "dataset.hpp"
#include "graph.hpp"
#include "scoring.hpp"

namespace mixgbn {

struct ChainConfig {
  long total_iters = 1000;  // T
  long thin = 1;            // xi
  Model model = Model::M2;
  Hyperparameters hp;
  std::uint64_t seed = 1;
  std::uint64_t chain_id = 0;
  std::optional<int> max_fanin;

  // Known allocation: z is held fixed and the Gibbs step is skipped.
  bool fixed_assignment = false;
  std::optional<Assignment> initial_assignment;  // default: see init_components
  // Without an initial assignment, rows start spread uniformly at random over
  // this many components (empty ones dropped). 1 puts every row together.
  int init_components = 1;
  std::optional<Dag> initial_dag;                // default: empty graph

  int gibbs_moves_per_iter = 1;
  // log p(G) = -edge_penalty * |E|. 0 gives the flat prior. Not part of the
  // original scheme; an opt-in sparsity knob.
  double edge_penalty = 0.0;

  // Every this many iterations the cached score is checked against a
  // from-scratch evaluation (0 disables).
  long validate_every = 0;
  // Running statistics are recomputed exactly after this many Gibbs moves.
  long refresh_every = 1000;
  // Trace of the joint log score every this many iterations (0: T/1000).
  long trace_every = 0;

  long sample_size() const { return thin > 0 ? total_iters / (2 * thin) : 0; }
  void validate(const Dataset& data) const;  // throws InvalidArgument
};

struct Draw {
  long iter = 0;
  double log_score = 0.0;  // unnormalized log joint posterior
  Dag g;
  Assignment z;
};

struct ChainStats {
  long structure_proposals = 0;
  long structure_accepts = 0;
  long gibbs_moves = 0;
  long gibbs_relocations = 0;  // moves that changed the partition
  long rejected_on_error = 0;  // numerical failures treated as rejection

  double structure_acceptance() const {
    return structure_proposals ? static_cast<double>(structure_accepts) / structure_proposals : 0.0;
  }
};

struct TracePoint {
  long iter = 0;
  double log_score = 0.0;
  int components = 0;
  int edges = 0;
};

struct PosteriorSample {
  std::vector<Draw> draws;  // iterations T-(R-1)xi, ..., T
  ChainConfig config;
  ChainStats stats;
  std::vector<TracePoint> trace;
  int n = 0;
  int m = 0;
};

// log p(D|g,z) + log p(g) + log p(z) + log p(K), up to the normalizing
// constant. For Model::H the allocation is the single component.
double joint_logscore(const Dataset& data, const Dag& g, const Assignment& z,
                      const Hyperparameters& hp, Model model, double edge_penalty = 0.0);

struct ChainState {
  Dag g;
  Assignment z;
  double log_ml = 0.0;
  long iter = 0;
};

// Single-chain sampler alternating a structure Metropolis-Hastings move and
// a collapsed Gibbs reallocation. Holds running component statistics so both
// moves only rescore what they change.
class Chain {
 public:
  Chain(const Dataset& data, ChainConfig cfg);
  ~Chain();
  Chain(const Chain&) = delete;
  Chain& operator=(const Chain&) = delete;

  // One Metropolis-Hastings proposal on the graph. Returns true on acceptance.
  bool structure_step();
  // One collapsed Gibbs reallocation. Returns true if the partition changed.
  bool gibbs_step();
  // structure_step then gibbs_step (unless H or a fixed allocation).
  void iterate();

  const ChainState& state() const;
  double log_score() const;  // joint log score of the current state
  const ChainStats& stats() const;
  // Recomputes the score from scratch and throws Error if the cached value
  // drifted more than 1e-8 (relative to max(1, |score|)).
  void check_consistency() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PosteriorSample run_chain(const Dataset& data, const ChainConfig& cfg);

// Independent chains (chain ids 0..count-1 derived from cfg.seed) run on
// separate threads.
std::vector<PosteriorSample> run_chains(const Dataset& data, const ChainConfig& cfg, int count);

// Concatenation of the draws of several chains.
PosteriorSample pool_samples(const std::vector<PosteriorSample>& chains);

}  // namespace mixgbn
