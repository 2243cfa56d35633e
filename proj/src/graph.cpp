#include "graph.hpp"

#include <algorithm>
#include <sstream>

#include "errors.hpp"

namespace mixgbn {

Dag::Dag(int n)
    : n_(n),
      adj_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0),
      parents_(static_cast<std::size_t>(n)) {
  if (n < 0) throw InvalidArgument("Dag: negative node count");
}

Dag Dag::from_edges(int n, const std::vector<Edge>& edges) {
  Dag g(n);
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw InvalidArgument("Dag: edge endpoint out of range");
    if (e.from == e.to) throw InvalidArgument("Dag: self-loop");
    if (g.adjacent(e.from, e.to)) throw InvalidArgument("Dag: duplicate or antiparallel edge");
    g.add_edge(e.from, e.to);
  }
  if (!g.is_acyclic()) throw InvalidArgument("Dag: edges contain a directed cycle");
  return g;
}

Dag Dag::complete(int n) {
  Dag g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i)
      if (has_edge(j, i)) out.push_back({j, i});
  return out;
}

void Dag::add_edge(int from, int to) {
  auto& cell = adj_[index(from, to)];
  if (cell) return;
  cell = 1;
  auto& ps = parents_[to];
  ps.insert(std::lower_bound(ps.begin(), ps.end(), from), from);
  ++edge_count_;
}

void Dag::remove_edge(int from, int to) {
  auto& cell = adj_[index(from, to)];
  if (!cell) return;
  cell = 0;
  auto& ps = parents_[to];
  ps.erase(std::lower_bound(ps.begin(), ps.end(), from));
  --edge_count_;
}

namespace {

// Kahn's algorithm, smallest available index first so the order is
// deterministic. Returns fewer than n nodes when a cycle exists.
std::vector<int> kahn(const Dag& g) {
  const int n = g.size();
  std::vector<int> indeg(n);
  for (int i = 0; i < n; ++i) indeg[i] = static_cast<int>(g.parents(i).size());
  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> done(n, false);
  for (;;) {
    int next = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && indeg[i] == 0) {
        next = i;
        break;
      }
    if (next < 0) break;
    done[next] = true;
    order.push_back(next);
    for (int c = 0; c < n; ++c)
      if (g.has_edge(next, c)) --indeg[c];
  }
  return order;
}

}  // namespace

bool Dag::is_acyclic() const { return static_cast<int>(kahn(*this).size()) == n_; }

std::vector<int> Dag::topological_order() const {
  auto order = kahn(*this);
  if (static_cast<int>(order.size()) != n_) throw InvalidArgument("Dag: graph has a cycle");
  return order;
}

std::vector<std::uint8_t> Dag::reachability() const {
  std::vector<std::uint8_t> reach(adj_.size(), 0);
  std::vector<int> stack;
  for (int s = 0; s < n_; ++s) {
    stack.assign(1, s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n_; ++v) {
        if (has_edge(u, v) && !reach[index(s, v)]) {
          reach[index(s, v)] = 1;
          stack.push_back(v);
        }
      }
    }
  }
  return reach;
}

namespace {

template <typename Visit>
void enumerate_moves(const Dag& g, std::optional<int> max_fanin, Visit&& visit) {
  const int n = g.size();
  const auto reach = g.reachability();
  const auto reaches = [&](int a, int b) {
    return reach[static_cast<std::size_t>(a) * n + b] != 0;
  };
  const auto room = [&](int node) {
    return !max_fanin || static_cast<int>(g.parents(node).size()) < *max_fanin;
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && !g.adjacent(j, i) && !reaches(i, j) && room(i))
        visit(Move{MoveKind::Add, {j, i}});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (g.has_edge(j, i)) visit(Move{MoveKind::Delete, {j, i}});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!g.has_edge(j, i) || !room(j)) continue;
      // Reversal closes a cycle iff j reaches i along a path other than j->i.
      bool other_path = false;
      for (int p : g.parents(i))
        if (p != j && reaches(j, p)) {
          other_path = true;
          break;
        }
      if (!other_path) visit(Move{MoveKind::Reverse, {j, i}});
    }
}

}  // namespace

Neighborhood neighborhood(const Dag& g, std::optional<int> max_fanin) {
  Neighborhood nb;
  enumerate_moves(g, max_fanin, [&](const Move& m) { nb.moves.push_back(m); });
  return nb;
}

std::size_t neighborhood_size(const Dag& g, std::optional<int> max_fanin) {
  std::size_t count = 0;
  enumerate_moves(g, max_fanin, [&](const Move&) { ++count; });
  return count;
}

Dag apply_move(const Dag& g, const Move& move) {
  const auto [j, i] = move.edge;
  const int n = g.size();
  if (j < 0 || j >= n || i < 0 || i >= n || i == j)
    throw InvalidArgument("apply_move: edge out of range");
  Dag out = g;
  switch (move.kind) {
    case MoveKind::Add:
      if (g.adjacent(j, i)) throw InvalidArgument("apply_move: nodes already adjacent");
      out.add_edge(j, i);
      break;
    case MoveKind::Delete:
      if (!g.has_edge(j, i)) throw InvalidArgument("apply_move: no edge to delete");
      out.remove_edge(j, i);
      return out;
    case MoveKind::Reverse:
      if (!g.has_edge(j, i)) throw InvalidArgument("apply_move: no edge to reverse");
      out.remove_edge(j, i);
      out.add_edge(i, j);
      break;
  }
  if (!out.is_acyclic()) throw InvalidArgument("apply_move: move introduces a cycle");
  return out;
}

bool Cpdag::has_directed(int from, int to) const {
  return std::binary_search(directed.begin(), directed.end(), Edge{from, to});
}

bool Cpdag::has_undirected(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(undirected.begin(), undirected.end(), Edge{a, b});
}

int Cpdag::pair_status(int a, int b) const {
  if (has_undirected(a, b)) return 1;
  if (has_directed(a, b)) return 2;
  if (has_directed(b, a)) return 3;
  return 0;
}

Cpdag to_cpdag(const Dag& g) {
  const int n = g.size();
  const auto topo = g.topological_order();
  std::vector<int> pos(n);
  for (int k = 0; k < n; ++k) pos[topo[k]] = k;

  // Edge order: children in topological order; within a child, parents from
  // the highest topological position down.
  std::vector<Edge> ordered;
  ordered.reserve(g.edge_count());
  for (int y : topo) {
    auto ps = g.parents(y);
    std::sort(ps.begin(), ps.end(), [&](int a, int b) { return pos[a] > pos[b]; });
    for (int x : ps) ordered.push_back({x, y});
  }

  enum Label : std::uint8_t { Unknown, Compelled, Reversible };
  std::vector<Label> label(static_cast<std::size_t>(n) * n, Unknown);
  const auto at = [&](int a, int b) -> Label& { return label[static_cast<std::size_t>(a) * n + b]; };
  const auto label_into = [&](int y, Label value, bool only_unknown) {
    for (int p : g.parents(y))
      if (!only_unknown || at(p, y) == Unknown) at(p, y) = value;
  };

  for (const auto& [x, y] : ordered) {
    if (at(x, y) != Unknown) continue;
    bool finished = false;
    for (int w : g.parents(x)) {
      if (at(w, x) != Compelled) continue;
      if (!g.has_edge(w, y)) {
        label_into(y, Compelled, false);
        finished = true;
        break;
      }
      at(w, y) = Compelled;
    }
    if (finished) continue;
    bool compelled = false;
    for (int z : g.parents(y))
      if (z != x && !g.has_edge(z, x)) {
        compelled = true;
        break;
      }
    label_into(y, compelled ? Compelled : Reversible, true);
  }

  Cpdag out;
  out.n = n;
  for (const auto& e : g.edges()) {
    if (at(e.from, e.to) == Compelled)
      out.directed.push_back(e);
    else
      out.undirected.push_back({std::min(e.from, e.to), std::max(e.from, e.to)});
  }
  std::sort(out.directed.begin(), out.directed.end());
  std::sort(out.undirected.begin(), out.undirected.end());
  return out;
}

std::string format_edge_list(const Dag& g) {
  std::ostringstream os;
  for (const auto& e : g.edges()) os << e.from + 1 << " -> " << e.to + 1 << '\n';
  return os.str();
}

std::string format_edge_list(const Cpdag& g) {
  std::ostringstream os;
  for (const auto& e : g.directed) os << e.from + 1 << " -> " << e.to + 1 << '\n';
  for (const auto& e : g.undirected) os << e.from + 1 << " -- " << e.to + 1 << '\n';
  return os.str();
}

Cpdag parse_edge_list(int n, const std::string& text) {
  Cpdag out;
  out.n = n;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int a = 0, b = 0;
    std::string arrow;
    if (!(ls >> a)) continue;
    if (!(ls >> arrow >> b) || (arrow != "->" && arrow != "--"))
      throw InvalidArgument("edge list: malformed line " + std::to_string(lineno));
    if (a < 1 || a > n || b < 1 || b > n || a == b)
      throw InvalidArgument("edge list: node out of range on line " + std::to_string(lineno));
    if (arrow == "->")
      out.directed.push_back({a - 1, b - 1});
    else
      out.undirected.push_back({std::min(a, b) - 1, std::max(a, b) - 1});
  }
  std::sort(out.directed.begin(), out.directed.end());
  std::sort(out.undirected.begin(), out.undirected.end());
  return out;
}

}  // namespace mixgbn
