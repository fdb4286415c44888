#pragma once

#include <span>

#include "otlp/sparse.hpp"

namespace otlp {

enum class ExecMode { kSequential, kDataParallel };

const char* ExecModeName(ExecMode mode);

// Bulk kernels used by the multiplicative-weights solvers. The serial
// versions are the reference; the OpenMP versions perform the same
// arithmetic in the same per-element order, so both produce identical bits.
namespace kernels {

// Fixed block width of the two-level summation tree.
inline constexpr std::size_t kSumBlock = 256;

namespace serial {
// out = A x
void multiply(const SparseMatrix& a, std::span<const double> x, std::span<double> out);
// out[i] = exp(scale * (v[i] - shift))
void exp_shifted(std::span<const double> v, double scale, double shift, std::span<double> out);
// out[i] = mask[i] ? v[i] : 0
void select(std::span<const double> v, std::span<const char> mask, std::span<double> out);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> v);
}  // namespace serial

namespace omp {
void multiply(const SparseMatrix& a, std::span<const double> x, std::span<double> out);
void exp_shifted(std::span<const double> v, double scale, double shift, std::span<double> out);
void select(std::span<const double> v, std::span<const char> mask, std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> v);
}  // namespace omp

inline void multiply(ExecMode m, const SparseMatrix& a, std::span<const double> x,
                     std::span<double> out) {
  m == ExecMode::kDataParallel ? omp::multiply(a, x, out) : serial::multiply(a, x, out);
}
inline void exp_shifted(ExecMode m, std::span<const double> v, double scale, double shift,
                        std::span<double> out) {
  m == ExecMode::kDataParallel ? omp::exp_shifted(v, scale, shift, out)
                               : serial::exp_shifted(v, scale, shift, out);
}
inline void select(ExecMode m, std::span<const double> v, std::span<const char> mask,
                   std::span<double> out) {
  m == ExecMode::kDataParallel ? omp::select(v, mask, out) : serial::select(v, mask, out);
}
inline void axpy(ExecMode m, double alpha, std::span<const double> x, std::span<double> y) {
  m == ExecMode::kDataParallel ? omp::axpy(alpha, x, y) : serial::axpy(alpha, x, y);
}
inline double sum(ExecMode m, std::span<const double> v) {
  return m == ExecMode::kDataParallel ? omp::sum(v) : serial::sum(v);
}

}  // namespace kernels
}  // namespace otlp

namespace otlp::kernels {

// Elementwise loop; f(i) must only write slot i of its outputs.
template <class F>
void for_each_index(ExecMode m, std::size_t n, F&& f) {
  if (m == ExecMode::kDataParallel) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) f(i);
  }
}

}  // namespace otlp::kernels
