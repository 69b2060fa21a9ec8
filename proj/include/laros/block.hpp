#pragma once

#include <Eigen/Core>

#include <vector>

namespace laros {

using IndexSet = std::vector<Eigen::Index>;

/// Row and column index sets of a submatrix, 0-based and sorted.
class BlockSelector {
 public:
  /// Throws InvalidInput when a set is empty, out of range for an
  /// m x n matrix, or contains duplicates.
  BlockSelector(IndexSet rows, IndexSet cols, Eigen::Index m, Eigen::Index n);

  /// The leading M x N block.
  static BlockSelector leading(Eigen::Index M, Eigen::Index N, Eigen::Index m,
                               Eigen::Index n);

  const IndexSet& rows() const noexcept { return rows_; }
  const IndexSet& cols() const noexcept { return cols_; }
  Eigen::Index row_count() const noexcept {
    return static_cast<Eigen::Index>(rows_.size());
  }
  Eigen::Index col_count() const noexcept {
    return static_cast<Eigen::Index>(cols_.size());
  }
  bool contains(Eigen::Index i, Eigen::Index j) const;
  /// True when the block is all of an m x n matrix.
  bool covers(Eigen::Index m, Eigen::Index n) const {
    return row_count() == m && col_count() == n;
  }

  friend bool operator==(const BlockSelector&, const BlockSelector&) = default;

 private:
  IndexSet rows_;
  IndexSet cols_;
  std::vector<bool> row_mask_;
  std::vector<bool> col_mask_;
};

}  // namespace laros
