#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace otlp {

struct SparseEntry {
  std::int32_t col;
  double value;
};

// Compressed sparse rows. Entries within a row keep insertion order, which
// fixes the summation order of every product computed from them.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t cols) : cols_(cols), row_ptr_{0} {}

  void add_row(std::span<const SparseEntry> entries);

  std::size_t rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::int32_t> row_cols(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  // Entries of the transpose come out ordered by original row index.
  SparseMatrix transpose() const;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::int32_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace otlp
