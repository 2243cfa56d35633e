#include "evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace mixgbn {

Matrix coallocation(const std::vector<Assignment>& draws) {
  if (draws.empty()) throw InvalidArgument("coallocation: empty sample");
  const int m = draws.front().size();
  Matrix c = Matrix::Zero(m, m);
  for (const auto& z : draws) {
    if (z.size() != m) throw InvalidArgument("coallocation: inconsistent assignment lengths");
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j)
        if (z.label(i) == z.label(j)) c(i, j) += 1.0;
  }
  c /= static_cast<double>(draws.size());
  for (int i = 0; i < m; ++i) {
    c(i, i) = 1.0;
    for (int j = 0; j < i; ++j) c(j, i) = c(i, j);
  }
  return c;
}

Matrix coallocation(const PosteriorSample& sample) {
  std::vector<Assignment> zs;
  zs.reserve(sample.draws.size());
  for (const auto& d : sample.draws) zs.push_back(d.z);
  return coallocation(zs);
}

Matrix edge_scores(const std::vector<Dag>& draws, int n) {
  Matrix p = Matrix::Zero(n, n);
  if (draws.empty()) return p;
  for (const auto& g : draws) {
    if (g.size() != n) throw InvalidArgument("edge_scores: inconsistent graph sizes");
    const auto c = to_cpdag(g);
    for (const auto& e : c.directed) p(e.from, e.to) += 1.0;
    for (const auto& e : c.undirected) {
      p(e.from, e.to) += 1.0;
      p(e.to, e.from) += 1.0;
    }
  }
  return p / static_cast<double>(draws.size());
}

Matrix edge_scores(const PosteriorSample& sample) {
  std::vector<Dag> gs;
  gs.reserve(sample.draws.size());
  for (const auto& d : sample.draws) gs.push_back(d.g);
  return edge_scores(gs, sample.n);
}

Cpdag predict_network(const Matrix& scores, double psi) {
  const int n = static_cast<int>(scores.rows());
  Cpdag out;
  out.n = n;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double ab = scores(a, b), ba = scores(b, a);
      if (!(std::max(ab, ba) > psi)) continue;
      if (std::abs(ab - ba) < kUndirectedGap)
        out.undirected.push_back({a, b});
      else if (ab > ba)
        out.directed.push_back({a, b});
      else
        out.directed.push_back({b, a});
    }
  std::sort(out.directed.begin(), out.directed.end());
  return out;
}

double auc_pr(const Matrix& scores, const Cpdag& truth) {
  const int n = truth.n;
  if (scores.rows() != n || scores.cols() != n) throw InvalidArgument("auc_pr: size mismatch");
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  int positives = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool pos = truth.has_directed(i, j) || truth.has_undirected(i, j);
      positives += pos;
      items.push_back({scores(i, j), pos});
    }
  if (positives == 0) throw InvalidArgument("auc_pr: truth has no edges, AUC undefined");
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score > b.score; });
  double area = 0.0, prev_recall = 0.0;
  int tp = 0, predicted = 0;
  for (std::size_t k = 0; k < items.size();) {
    const double s = items[k].score;
    for (; k < items.size() && items[k].score == s; ++k) {
      ++predicted;
      tp += items[k].positive;
    }
    const double recall = static_cast<double>(tp) / positives;
    const double precision = static_cast<double>(tp) / predicted;
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

double rshd(const Cpdag& prediction, const Cpdag& truth) {
  if (prediction.n != truth.n) throw InvalidArgument("rshd: size mismatch");
  const int n = truth.n;
  if (n < 2) return 0.0;
  int diff = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) diff += prediction.pair_status(a, b) != truth.pair_status(a, b);
  return diff / (0.5 * n * (n - 1));
}

}  // namespace mixgbn
