// Independent reference computations used only by the tests. None of these
// call into the engine's scoring, graph or evaluation code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "numkern.hpp"

namespace oracle {

using mixgbn::Matrix;
using mixgbn::Vector;

// ln Gamma_n(a) in 50-digit arithmetic.
inline double log_multigamma(int n, double a) {
  using F = boost::multiprecision::cpp_bin_float_50;
  F total = F(n) * F(n - 1) / 4 * log(boost::math::constants::pi<F>());
  for (int j = 1; j <= n; ++j) total += lgamma(F(a) + F(1 - j) / 2);
  return static_cast<double>(total);
}

// Determinant by cofactor expansion along the first row.
inline double det_cofactor(const Matrix& a) {
  const auto n = a.rows();
  if (n == 0) return 1.0;
  if (n == 1) return a(0, 0);
  double total = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0, jj = 0; j < n; ++j)
        if (j != c) minor(i - 1, jj++) = a(i, j);
    total += (c % 2 ? -1.0 : 1.0) * a(0, c) * det_cofactor(minor);
  }
  return total;
}

// Complete-graph Normal-Wishart marginal log likelihood of the rows of x
// (one component), straight from the textbook closed form.
inline double nw_complete_logml(const Matrix& x, const Matrix& t, const Vector& nu, double aw, double amu) {
  const auto m = static_cast<double>(x.rows());
  const int n = static_cast<int>(x.cols());
  Vector mean = Vector::Zero(n);
  for (Eigen::Index r = 0; r < x.rows(); ++r) mean += x.row(r).transpose();
  mean /= m;
  Matrix s = Matrix::Zero(n, n);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Vector d = x.row(r).transpose() - mean;
    s += d * d.transpose();
  }
  const Vector dm = nu - mean;
  const Matrix post = t + s + (amu * m / (amu + m)) * dm * dm.transpose();
  return -0.5 * n * m * std::log(std::numbers::pi) + 0.5 * n * std::log(amu / (amu + m)) +
         log_multigamma(n, 0.5 * (aw + m)) - log_multigamma(n, 0.5 * aw) +
         0.5 * aw * std::log(det_cofactor(t)) - 0.5 * (aw + m) * std::log(det_cofactor(post));
}

// Adjacency as bitmask: bit (from * n + to).
using Adj = std::uint32_t;

inline bool has(Adj a, int n, int from, int to) { return (a >> (from * n + to)) & 1u; }

inline bool acyclic(Adj a, int n) {
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (has(a, n, i, j)) ++indeg[j];
  std::vector<int> stack;
  for (int i = 0; i < n; ++i)
    if (!indeg[i]) stack.push_back(i);
  int seen = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++seen;
    for (int j = 0; j < n; ++j)
      if (has(a, n, v, j) && --indeg[j] == 0) stack.push_back(j);
  }
  return seen == n;
}

// Every labeled DAG on n <= 5 nodes.
inline std::vector<Adj> all_dags(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  std::vector<Adj> out;
  std::size_t total = 1;
  for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    Adj a = 0;
    std::size_t c = code;
    for (const auto& [i, j] : pairs) {
      const int s = static_cast<int>(c % 3);
      c /= 3;
      if (s == 1) a |= 1u << (i * n + j);
      if (s == 2) a |= 1u << (j * n + i);
    }
    if (acyclic(a, n)) out.push_back(a);
  }
  return out;
}

// Skeleton plus v-structures, which identify the Markov equivalence class.
inline std::pair<std::set<std::pair<int, int>>, std::set<std::tuple<int, int, int>>> class_key(Adj a, int n) {
  std::set<std::pair<int, int>> skel;
  std::set<std::tuple<int, int, int>> vs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (has(a, n, i, j)) skel.insert({std::min(i, j), std::max(i, j)});
  for (int c = 0; c < n; ++c)
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q)
        if (has(a, n, p, c) && has(a, n, q, c) && !has(a, n, p, q) && !has(a, n, q, p)) vs.insert({p, c, q});
  return {skel, vs};
}

// Edge status per pair (a < b) over the equivalence class of g found by
// enumeration: 0 absent, 1 reversible, 2 compelled a->b, 3 compelled b->a.
inline std::vector<int> class_edge_status(Adj g, int n, const std::vector<Adj>& dags) {
  const auto key = class_key(g, n);
  std::vector<int> seen_ab(n * n, 0), seen_ba(n * n, 0);
  for (Adj d : dags) {
    if (class_key(d, n) != key) continue;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (has(d, n, a, b)) seen_ab[a * n + b] = 1;
        if (has(d, n, b, a)) seen_ba[a * n + b] = 1;
      }
  }
  std::vector<int> status(n * n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const int i = a * n + b;
      status[i] = seen_ab[i] && seen_ba[i] ? 1 : seen_ab[i] ? 2 : seen_ba[i] ? 3 : 0;
    }
  return status;
}

// d-separation of a and b given s: moralized ancestral graph, then plain
// reachability avoiding s.
inline bool d_separated(Adj g, int n, int a, int b, const std::vector<int>& s) {
  std::vector<char> keep(n, 0), given(n, 0);
  std::vector<int> stack = {a, b};
  for (int v : s) {
    given[v] = 1;
    stack.push_back(v);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = 1;
    for (int p = 0; p < n; ++p)
      if (has(g, n, p, v)) stack.push_back(p);
  }
  std::vector<std::vector<char>> und(n, std::vector<char>(n, 0));
  for (int c = 0; c < n; ++c) {
    if (!keep[c]) continue;
    std::vector<int> pa;
    for (int p = 0; p < n; ++p)
      if (keep[p] && has(g, n, p, c)) {
        und[p][c] = und[c][p] = 1;
        pa.push_back(p);
      }
    for (std::size_t i = 0; i < pa.size(); ++i)
      for (std::size_t j = i + 1; j < pa.size(); ++j) und[pa[i]][pa[j]] = und[pa[j]][pa[i]] = 1;
  }
  std::vector<char> vis(n, 0);
  stack = {a};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (v == b) return false;
    if (vis[v]) continue;
    vis[v] = 1;
    for (int w = 0; w < n; ++w)
      if (und[v][w] && keep[w] && !given[w] && !vis[w]) stack.push_back(w);
  }
  return true;
}

// Restricted growth strings: every partition of m items exactly once.
inline std::vector<std::vector<int>> set_partitions(int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> z(m, 0);
  std::function<void(int, int)> rec = [&](int i, int k) {
    if (i == m) {
      out.push_back(z);
      return;
    }
    for (int s = 0; s <= k; ++s) {
      z[i] = s;
      rec(i + 1, std::max(k, s + 1));
    }
  };
  if (m > 0) {
    z[0] = 0;
    rec(1, 1);
  }
  return out;
}

// Every labeling of m items with labels 0..k-1, each used at least once.
inline std::vector<std::vector<int>> surjections(int m, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> z(m, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == m) {
      std::vector<char> used(k, 0);
      for (int l : z) used[l] = 1;
      if (std::all_of(used.begin(), used.end(), [](char c) { return c != 0; })) out.push_back(z);
      return;
    }
    for (int s = 0; s < k; ++s) {
      z[i] = s;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

// Step-interpolated area under the precision-recall curve, recomputing the
// confusion counts from scratch at every distinct threshold.
inline double auc_pr_sweep(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
  int positives = 0;
  for (int l : labels) positives += l;
  double area = 0.0, prev = 0.0;
  for (double t : thresholds) {
    int tp = 0, pred = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (scores[i] >= t) {
        ++pred;
        tp += labels[i];
      }
    const double recall = static_cast<double>(tp) / positives;
    area += (recall - prev) * static_cast<double>(tp) / pred;
    prev = recall;
  }
  return area;
}

}  // namespace oracle
