#include "otlp/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace otlp {

const char* ExecModeName(ExecMode mode) {
  return mode == ExecMode::kDataParallel ? "data_parallel" : "sequential";
}

namespace kernels {

namespace {

inline double row_dot(const SparseMatrix& a, std::size_t r, std::span<const double> x) {
  const auto cols = a.row_cols(r);
  const auto vals = a.row_values(r);
  double acc = 0.0;
  for (std::size_t e = 0; e < cols.size(); ++e) acc += vals[e] * x[cols[e]];
  return acc;
}

inline double block_sum(std::span<const double> v, std::size_t b) {
  const std::size_t lo = b * kSumBlock;
  const std::size_t hi = std::min(v.size(), lo + kSumBlock);
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += v[i];
  return acc;
}

inline std::size_t block_count(std::size_t n) { return (n + kSumBlock - 1) / kSumBlock; }

}  // namespace

namespace serial {

void multiply(const SparseMatrix& a, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < a.rows(); ++r) out[r] = row_dot(a, r, x);
}

void exp_shifted(std::span<const double> v, double scale, double shift, std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::exp(scale * (v[i] - shift));
}

void select(std::span<const double> v, std::span<const char> mask, std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = mask[i] ? v[i] : 0.0;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double sum(std::span<const double> v) {
  const std::size_t nb = block_count(v.size());
  double total = 0.0;
  for (std::size_t b = 0; b < nb; ++b) total += block_sum(v, b);
  return total;
}

}  // namespace serial

namespace omp {

void multiply(const SparseMatrix& a, std::span<const double> x, std::span<double> out) {
  const auto rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) out[r] = row_dot(a, static_cast<std::size_t>(r), x);
}

void exp_shifted(std::span<const double> v, double scale, double shift, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = std::exp(scale * (v[i] - shift));
}

void select(std::span<const double> v, std::span<const char> mask, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = mask[i] ? v[i] : 0.0;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum(std::span<const double> v) {
  const std::size_t nb = block_count(v.size());
  std::vector<double> partial(nb);
  const auto nbi = static_cast<std::int64_t>(nb);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nbi; ++b) partial[b] = block_sum(v, static_cast<std::size_t>(b));
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace omp

}  // namespace kernels
}  // namespace otlp
