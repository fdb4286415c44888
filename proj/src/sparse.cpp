#include "otlp/sparse.hpp"

#include <string>

#include "otlp/error.hpp"

namespace otlp {

void SparseMatrix::add_row(std::span<const SparseEntry> entries) {
  for (const SparseEntry& e : entries) {
    if (e.col < 0 || static_cast<std::size_t>(e.col) >= cols_) {
      throw Error(ErrorKind::kDimensionMismatch, "sparse column " + std::to_string(e.col));
    }
  }
  for (const SparseEntry& e : entries) {
    col_idx_.push_back(e.col);
    values_.push_back(e.value);
  }
  row_ptr_.push_back(values_.size());
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t;
  t.cols_ = rows();
  std::vector<std::size_t> counts(cols_ + 1, 0);
  for (std::int32_t c : col_idx_) ++counts[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) counts[c + 1] += counts[c];
  t.row_ptr_ = counts;
  t.col_idx_.resize(values_.size());
  t.values_.resize(values_.size());
  std::vector<std::size_t> next(counts.begin(), counts.end() - 1);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
      const std::size_t slot = next[col_idx_[e]]++;
      t.col_idx_[slot] = static_cast<std::int32_t>(r);
      t.values_[slot] = values_[e];
    }
  }
  return t;
}

}  // namespace otlp
