#include "laros/block.hpp"

#include <algorithm>
#include <numeric>

#include "laros/errors.hpp"

namespace laros {

namespace {

std::vector<bool> mask_of(IndexSet& set, Eigen::Index extent,
                          const char* what) {
  if (set.empty()) {
    throw InvalidInput(std::string("BlockSelector: empty ") + what);
  }
  std::sort(set.begin(), set.end());
  if (std::adjacent_find(set.begin(), set.end()) != set.end()) {
    throw InvalidInput(std::string("BlockSelector: duplicate ") + what);
  }
  if (set.front() < 0 || set.back() >= extent) {
    throw InvalidInput(std::string("BlockSelector: ") + what +
                       " index out of range");
  }
  std::vector<bool> mask(static_cast<std::size_t>(extent), false);
  for (auto k : set) mask[static_cast<std::size_t>(k)] = true;
  return mask;
}

}  // namespace

BlockSelector::BlockSelector(IndexSet rows, IndexSet cols, Eigen::Index m,
                             Eigen::Index n)
    : rows_(std::move(rows)), cols_(std::move(cols)) {
  row_mask_ = mask_of(rows_, m, "row");
  col_mask_ = mask_of(cols_, n, "column");
}

BlockSelector BlockSelector::leading(Eigen::Index M, Eigen::Index N,
                                     Eigen::Index m, Eigen::Index n) {
  IndexSet rows(static_cast<std::size_t>(std::max<Eigen::Index>(M, 0)));
  IndexSet cols(static_cast<std::size_t>(std::max<Eigen::Index>(N, 0)));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  std::iota(cols.begin(), cols.end(), Eigen::Index{0});
  return BlockSelector(std::move(rows), std::move(cols), m, n);
}

bool BlockSelector::contains(Eigen::Index i, Eigen::Index j) const {
  return i >= 0 && j >= 0 &&
         i < static_cast<Eigen::Index>(row_mask_.size()) &&
         j < static_cast<Eigen::Index>(col_mask_.size()) &&
         row_mask_[static_cast<std::size_t>(i)] &&
         col_mask_[static_cast<std::size_t>(j)];
}

}  // namespace laros
