#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mixgbn {

// Directed edge from -> to, 0-based node indices.
struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

// DAG over n nodes stored both as an adjacency matrix and as sorted parent
// sets. Mutators keep the two views consistent but do not check acyclicity;
// from_edges() and apply_move() do.
class Dag {
 public:
  Dag() = default;
  explicit Dag(int n);

  // Throws InvalidArgument on self-loops, out-of-range nodes or cycles.
  static Dag from_edges(int n, const std::vector<Edge>& edges);
  static Dag complete(int n);  // i -> j for all i < j

  int size() const { return n_; }
  bool has_edge(int from, int to) const { return adj_[index(from, to)] != 0; }
  bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }
  const std::vector<int>& parents(int node) const { return parents_[node]; }
  std::size_t edge_count() const { return edge_count_; }
  std::vector<Edge> edges() const;  // sorted by (from, to)

  void add_edge(int from, int to);
  void remove_edge(int from, int to);

  bool is_acyclic() const;
  // Throws InvalidArgument when the graph has a cycle.
  std::vector<int> topological_order() const;
  // reach[a * n + b] is true when a directed path of length >= 1 leads a to b.
  std::vector<std::uint8_t> reachability() const;

  bool operator==(const Dag& other) const { return n_ == other.n_ && adj_ == other.adj_; }

 private:
  std::size_t index(int from, int to) const {
    return static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(to);
  }

  int n_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<int>> parents_;
  std::size_t edge_count_ = 0;
};

enum class MoveKind { Add = 0, Delete = 1, Reverse = 2 };

struct Move {
  MoveKind kind = MoveKind::Add;
  Edge edge;  // for Delete/Reverse an existing edge, for Add the new one
  auto operator<=>(const Move&) const = default;
};

struct Neighborhood {
  std::vector<Move> moves;  // sorted by kind, then edge
  std::size_t size() const { return moves.size(); }
};

// All single-edge additions, deletions and reversals that keep g acyclic.
// With max_fanin set, additions and reversals that would give a node more
// parents than the cap are left out.
Neighborhood neighborhood(const Dag& g, std::optional<int> max_fanin = std::nullopt);

// |N(g)| without materializing the move list.
std::size_t neighborhood_size(const Dag& g, std::optional<int> max_fanin = std::nullopt);

// Throws InvalidArgument if the move does not fit g or introduces a cycle.
Dag apply_move(const Dag& g, const Move& move);

// Completed partially directed graph of the equivalence class of a DAG.
struct Cpdag {
  int n = 0;
  std::vector<Edge> directed;    // sorted
  std::vector<Edge> undirected;  // from < to, sorted
  bool operator==(const Cpdag&) const = default;

  bool has_directed(int from, int to) const;
  bool has_undirected(int a, int b) const;
  // Edge status for pair (a, b), a < b: 0 absent, 1 undirected, 2 a->b, 3 b->a.
  int pair_status(int a, int b) const;
};

// Compelled/reversible edge labeling over a topological edge order.
Cpdag to_cpdag(const Dag& g);

inline bool cpdag_equal(const Cpdag& a, const Cpdag& b) { return a == b; }

// "j -> i" per line, 1-based node numbers.
std::string format_edge_list(const Dag& g);
// Directed edges as "j -> i", undirected as "j -- i".
std::string format_edge_list(const Cpdag& g);
// Accepts both arrow kinds; blank lines and '#' comments are skipped.
Cpdag parse_edge_list(int n, const std::string& text);

}  // namespace mixgbn
