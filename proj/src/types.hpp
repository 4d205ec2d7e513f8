#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace bolasso {

using Index = Eigen::Index;

// All dense data is stored row-major; problems here are small (p up to a few
// hundred) so a single dense layout keeps the C interface and the CSV
// emitters copy-free.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Sorted set of zero-based column (or row) indices.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<Index> sorted_unique) : idx_(std::move(sorted_unique)) {}

  static IndexSet from_unsorted(std::vector<Index> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return IndexSet(std::move(v));
  }

  static IndexSet range(Index n) {
    std::vector<Index> v(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return IndexSet(std::move(v));
  }

  Index size() const { return static_cast<Index>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  Index operator[](Index i) const { return idx_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& indices() const { return idx_; }

  bool contains(Index j) const {
    return std::binary_search(idx_.begin(), idx_.end(), j);
  }

  /// Complement with respect to {0, ..., p-1}.
  IndexSet complement(Index p) const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(p) - idx_.size());
    std::size_t k = 0;
    for (Index j = 0; j < p; ++j) {
      if (k < idx_.size() && idx_[k] == j) {
        ++k;
      } else {
        out.push_back(j);
      }
    }
    return IndexSet(std::move(out));
  }

  bool operator==(const IndexSet& o) const { return idx_ == o.idx_; }
  bool operator!=(const IndexSet& o) const { return idx_ != o.idx_; }

  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

 private:
  std::vector<Index> idx_;
};

/// Per-variable signs in {-1, 0, +1}.
struct SignPattern {
  std::vector<std::int8_t> signs;

  Index size() const { return static_cast<Index>(signs.size()); }
  int operator[](Index i) const { return signs[static_cast<std::size_t>(i)]; }
  bool operator==(const SignPattern& o) const { return signs == o.signs; }
};

inline int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

}  // namespace bolasso
