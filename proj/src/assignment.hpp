#pragma once

#include <cstdint>
#include <vector>

namespace mixgbn {

// Allocation of m observations to K non-empty components. Labels are 0-based
// and contiguous internally (external formats use 1..K). Member lists are
// kept alongside so a uniformly chosen member of a component is O(1).
class Assignment {
 public:
  Assignment() = default;

  // Throws InvalidArgument unless labels cover exactly 0..K-1.
  static Assignment from_labels(const std::vector<int>& labels);
  static Assignment single(int m);  // everything in component 0

  int size() const { return static_cast<int>(labels_.size()); }
  int components() const { return static_cast<int>(members_.size()); }
  int label(int obs) const { return labels_[obs]; }
  int count(int k) const { return static_cast<int>(members_[k].size()); }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& members(int k) const { return members_[k]; }
  std::vector<int> counts() const;

  // Takes `obs` out of its component. An emptied component is deleted and
  // every higher label shifts down by one. Returns true when that happened.
  // The observation is left unassigned (label -1) until insert().
  bool remove(int obs);
  // Puts an unassigned `obs` into component k; k == components() opens a new
  // component.
  void insert(int obs, int k);

  bool complete() const;  // no unassigned observation

  // Canonical form: labels renumbered by first appearance. Equal for two
  // assignments exactly when they induce the same partition.
  std::vector<int> canonical() const;

  bool operator==(const Assignment& other) const { return labels_ == other.labels_; }

 private:
  std::vector<int> labels_;
  std::vector<int> slot_;  // position of each observation in its member list
  std::vector<std::vector<int>> members_;
};

}  // namespace mixgbn
