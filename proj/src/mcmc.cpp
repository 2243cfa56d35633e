#include "mcmc.hpp"

#include <cmath>
#include <string>
#include <thread>

#include "allocation.hpp"
#include "errors.hpp"

namespace mixgbn {

void ChainConfig::validate(const Dataset& data) const {
  if (total_iters < 2) throw InvalidArgument("chain: total iterations must be at least 2");
  if (thin < 1) throw InvalidArgument("chain: thinning factor must be at least 1");
  if (sample_size() < 1)
    throw InvalidArgument("chain: iterations/(2*thin) must leave at least one draw");
  if (data.rows() < 1 || data.cols() < 1) throw InvalidArgument("chain: empty dataset");
  hp.validate(data.cols());
  if (max_fanin && *max_fanin < 1) throw InvalidArgument("chain: max fan-in must be positive");
  if (gibbs_moves_per_iter < 0) throw InvalidArgument("chain: negative Gibbs moves per iteration");
  if (edge_penalty < 0.0) throw InvalidArgument("chain: edge penalty must be non-negative");
  if (initial_assignment && initial_assignment->size() != data.rows())
    throw InvalidArgument("chain: initial assignment length does not match data");
  if (initial_dag) {
    if (initial_dag->size() != data.cols())
      throw InvalidArgument("chain: initial graph size does not match data");
    if (max_fanin)
      for (int i = 0; i < initial_dag->size(); ++i)
        if (static_cast<int>(initial_dag->parents(i).size()) > *max_fanin)
          throw InvalidArgument("chain: initial graph exceeds the fan-in cap");
  }
  if (init_components < 1 || init_components > data.rows())
    throw InvalidArgument("chain: initial component count must lie in 1..m");
  if (fixed_assignment && model != Model::H && !initial_assignment)
    throw InvalidArgument("chain: a fixed allocation needs labels");
}

double joint_logscore(const Dataset& data, const Dag& g, const Assignment& z,
                      const Hyperparameters& hp, Model model, double edge_penalty) {
  const Assignment one = Assignment::single(data.rows());
  const Assignment& used = model == Model::H ? one : z;
  return dag_logml(data, used, g, hp, model) - edge_penalty * static_cast<double>(g.edge_count()) +
         log_p_z(used) + log_p_k(used.components(), hp.lambda);
}

struct Chain::Impl {
  const Dataset& data;
  ChainConfig cfg;
  RngStream rng;
  ChainState st;
  ChainStats stats;
  int n = 0;
  int m = 0;
  bool allocate = false;  // Gibbs step active

  std::vector<RunningStats> comp;
  std::optional<SubsetScorer> scorer;
  std::vector<double> family;  // per-node factor under the current allocation
  long gibbs_since_refresh = 0;

  Impl(const Dataset& d, ChainConfig c)
      : data(d),
        cfg(std::move(c)),
        rng(RngStream::derive(cfg.seed, kStreamChain, cfg.chain_id)) {
    cfg.validate(data);
    if (cfg.model == Model::H) cfg.hp.per_component.clear();
    n = data.cols();
    m = data.rows();
    st.g = cfg.initial_dag ? *cfg.initial_dag : Dag(n);
    if (cfg.model == Model::H)
      st.z = Assignment::single(m);
    else if (cfg.initial_assignment)
      st.z = *cfg.initial_assignment;
    else
      st.z = random_assignment();
    allocate = cfg.model != Model::H && !cfg.fixed_assignment && cfg.gibbs_moves_per_iter > 0;
    rebuild_stats();
    rescore_all();
  }

  Assignment random_assignment() {
    if (cfg.init_components == 1) return Assignment::single(m);
    std::vector<int> raw(static_cast<std::size_t>(m));
    for (auto& l : raw) l = static_cast<int>(rng.index(static_cast<std::size_t>(cfg.init_components)));
    std::vector<int> relabel(static_cast<std::size_t>(cfg.init_components), -1);
    int next = 0;
    for (auto& l : raw) {
      if (relabel[l] < 0) relabel[l] = next++;
      l = relabel[l];
    }
    return Assignment::from_labels(raw);
  }

  Vector row(int r) const { return data.values.row(r).transpose(); }

  // Exact two-pass statistics; also clears drift of the running updates.
  void rebuild_stats() {
    comp.clear();
    for (const auto& cs : component_stats(data, st.z, cfg.hp)) comp.push_back(RunningStats::from(cs));
    gibbs_since_refresh = 0;
  }

  std::vector<ComponentStats> finished() const {
    std::vector<ComponentStats> out;
    out.reserve(comp.size());
    for (std::size_t k = 0; k < comp.size(); ++k)
      out.push_back(comp[k].finish(cfg.hp.component(static_cast<int>(k))));
    return out;
  }

  void rescore_all() {
    scorer.emplace(cfg.model, finished(), cfg.hp);
    family.assign(static_cast<std::size_t>(n), 0.0);
    st.log_ml = 0.0;
    for (int i = 0; i < n; ++i) {
      family[i] = scorer->family_logml(st.g, i);
      st.log_ml += family[i];
    }
  }

  double log_prior_g(const Dag& g) const {
    return -cfg.edge_penalty * static_cast<double>(g.edge_count());
  }

  bool structure_step() {
    const auto nb = neighborhood(st.g, cfg.max_fanin);
    if (nb.size() == 0) return false;
    ++stats.structure_proposals;
    const Move mv = nb.moves[rng.index(nb.size())];
    Dag proposal = st.g;
    const auto [j, i] = mv.edge;
    switch (mv.kind) {
      case MoveKind::Add: proposal.add_edge(j, i); break;
      case MoveKind::Delete: proposal.remove_edge(j, i); break;
      case MoveKind::Reverse:
        proposal.remove_edge(j, i);
        proposal.add_edge(i, j);
        break;
    }
    const double u = rng.uniform();
    double new_i = 0.0, new_j = 0.0, delta = 0.0;
    try {
      new_i = scorer->family_logml(proposal, i);
      delta = new_i - family[i];
      if (mv.kind == MoveKind::Reverse) {
        new_j = scorer->family_logml(proposal, j);
        delta += new_j - family[j];
      }
    } catch (const NotPositiveDefinite&) {
      ++stats.rejected_on_error;
      return false;
    }
    const double log_hastings = std::log(static_cast<double>(nb.size())) -
                                std::log(static_cast<double>(neighborhood_size(proposal, cfg.max_fanin)));
    const double log_a = delta + log_prior_g(proposal) - log_prior_g(st.g) + log_hastings;
    if (!(log_a >= 0.0 || std::log(u) < log_a)) return false;
    st.g = std::move(proposal);
    family[i] = new_i;
    if (mv.kind == MoveKind::Reverse) family[j] = new_j;
    st.log_ml += delta;
    ++stats.structure_accepts;
    return true;
  }

  // log p(D | g, allocation given by `stats`) for the M1 factor of one component.
  double component_dag_logml(const RunningStats& rs, int k) const {
    const auto prior = cfg.hp.component(k);
    return SubsetScorer(rs.finish(prior), prior).dag_logml(st.g);
  }

  bool gibbs_step() {
    if (!allocate) return false;
    ++stats.gibbs_moves;
    const auto before = st.z.canonical();
    auto sel = gibbs_select(rng, st.z);
    const Vector x = row(sel.obs);
    comp[sel.from].remove(x);
    if (sel.deleted) comp.erase(comp.begin() + sel.from);
    const int tk = sel.tilde_k;

    std::vector<double> marginals(static_cast<std::size_t>(tk) + 1, 0.0);
    bool failed = false;
    try {
      if (tk > 0) {
        if (cfg.model == Model::M2) {
          auto base = finished();
          for (int s = 0; s <= tk; ++s) {
            auto cand = base;
            RunningStats rs = s < tk ? comp[s] : RunningStats(n);
            rs.add(x);
            const auto fs = rs.finish(cfg.hp.component(s));
            if (s < tk)
              cand[s] = fs;
            else
              cand.push_back(fs);
            marginals[s] = SubsetScorer(Model::M2, std::move(cand), cfg.hp).dag_logml(st.g);
          }
        } else {
          std::vector<double> own(static_cast<std::size_t>(tk));
          double total = 0.0;
          for (int k = 0; k < tk; ++k) total += own[k] = component_dag_logml(comp[k], k);
          for (int s = 0; s <= tk; ++s) {
            RunningStats rs = s < tk ? comp[s] : RunningStats(n);
            rs.add(x);
            marginals[s] = total - (s < tk ? own[s] : 0.0) + component_dag_logml(rs, s);
          }
        }
      }
    } catch (const NotPositiveDefinite&) {
      failed = true;
    }

    int target = 0;
    if (failed) {
      // Put the observation back where it was.
      ++stats.rejected_on_error;
      target = sel.deleted ? tk : sel.from;
    } else if (tk > 0) {
      const auto p = normalize_log_weights(gibbs_log_weights(m, tk, cfg.hp.lambda, marginals));
      double u = rng.uniform();
      target = tk;
      for (int s = 0; s <= tk; ++s) {
        if (u < p[s]) {
          target = s;
          break;
        }
        u -= p[s];
      }
    }
    st.z = std::move(sel.reduced);
    st.z.insert(sel.obs, target);
    if (target == tk) comp.emplace_back(n);
    comp[target].add(x);

    if (++gibbs_since_refresh >= cfg.refresh_every && cfg.refresh_every > 0) rebuild_stats();
    rescore_all();
    const bool changed = st.z.canonical() != before;
    if (changed) ++stats.gibbs_relocations;
    return changed;
  }

  double log_score() const {
    return st.log_ml + log_prior_g(st.g) + log_p_z(st.z) + log_p_k(st.z.components(), cfg.hp.lambda);
  }

  void check_consistency() const {
    const double fresh = dag_logml(data, st.z, st.g, cfg.hp, cfg.model);
    const double tol = 1e-8 * std::max(1.0, std::abs(fresh));
    if (!(std::abs(fresh - st.log_ml) <= tol))
      throw Error("chain: cached score " + std::to_string(st.log_ml) +
                  " drifted from recomputed " + std::to_string(fresh) + " at iteration " +
                  std::to_string(st.iter));
  }

  void iterate() {
    ++st.iter;
    structure_step();
    for (int k = 0; allocate && k < cfg.gibbs_moves_per_iter; ++k) gibbs_step();
    if (cfg.validate_every > 0 && st.iter % cfg.validate_every == 0) check_consistency();
  }
};

Chain::Chain(const Dataset& data, ChainConfig cfg)
    : impl_(std::make_unique<Impl>(data, std::move(cfg))) {}
Chain::~Chain() = default;

bool Chain::structure_step() { return impl_->structure_step(); }
bool Chain::gibbs_step() { return impl_->gibbs_step(); }
void Chain::iterate() { impl_->iterate(); }
const ChainState& Chain::state() const { return impl_->st; }
double Chain::log_score() const { return impl_->log_score(); }
const ChainStats& Chain::stats() const { return impl_->stats; }
void Chain::check_consistency() const { impl_->check_consistency(); }

PosteriorSample run_chain(const Dataset& data, const ChainConfig& cfg) {
  Chain chain(data, cfg);
  PosteriorSample out;
  out.config = cfg;
  out.n = data.cols();
  out.m = data.rows();
  const long t = cfg.total_iters;
  const long r = cfg.sample_size();
  const long first = t - (r - 1) * cfg.thin;
  const long trace_every = cfg.trace_every > 0 ? cfg.trace_every : std::max(1L, t / 1000);
  out.draws.reserve(static_cast<std::size_t>(r));
  for (long it = 1; it <= t; ++it) {
    chain.iterate();
    const auto& st = chain.state();
    if (it % trace_every == 0)
      out.trace.push_back({it, chain.log_score(), st.z.components(),
                           static_cast<int>(st.g.edge_count())});
    if (it >= first && (it - first) % cfg.thin == 0)
      out.draws.push_back({it, chain.log_score(), st.g, st.z});
  }
  out.stats = chain.stats();
  return out;
}

std::vector<PosteriorSample> run_chains(const Dataset& data, const ChainConfig& cfg, int count) {
  if (count < 1) throw InvalidArgument("run_chains: need at least one chain");
  cfg.validate(data);
  std::vector<PosteriorSample> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> workers;
  for (int c = 0; c < count; ++c) {
    workers.emplace_back([&, c] {
      try {
        ChainConfig local = cfg;
        local.chain_id = static_cast<std::uint64_t>(c);
        out[c] = run_chain(data, local);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

PosteriorSample pool_samples(const std::vector<PosteriorSample>& chains) {
  if (chains.empty()) throw InvalidArgument("pool_samples: no chains");
  PosteriorSample out;
  out.config = chains.front().config;
  out.n = chains.front().n;
  out.m = chains.front().m;
  for (const auto& c : chains) {
    out.draws.insert(out.draws.end(), c.draws.begin(), c.draws.end());
    out.stats.structure_proposals += c.stats.structure_proposals;
    out.stats.structure_accepts += c.stats.structure_accepts;
    out.stats.gibbs_moves += c.stats.gibbs_moves;
    out.stats.gibbs_relocations += c.stats.gibbs_relocations;
    out.stats.rejected_on_error += c.stats.rejected_on_error;
  }
  return out;
}

}  // namespace mixgbn
