#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "otlp/core.hpp"
#include "otlp/kernels.hpp"
#include "otlp/report.hpp"
#include "otlp/sparse.hpp"

namespace otlp {

// max <c, x> subject to Ax <= b, x >= 0. Zero-budget rows pin their
// variables to 0 and are dropped, so stored budgets are positive.
class PackingProgram {
 public:
  class Builder {
   public:
    explicit Builder(std::size_t n);
    Builder& add_row(std::span<const SparseEntry> entries, double budget);
    Builder& set_objective(std::vector<double> c);
    Builder& set_lambda(double lambda);
    PackingProgram build() &&;

   private:
    struct Row {
      std::vector<SparseEntry> entries;
      double budget;
    };
    std::size_t n_;
    std::vector<Row> rows_;
    std::vector<double> objective_;
    std::optional<double> lambda_;
  };

  std::size_t n() const { return n_; }
  const SparseMatrix& rows() const { return rows_; }
  std::span<const double> budgets() const { return budgets_; }
  std::span<const double> objective() const { return objective_; }
  std::span<const char> free_vars() const { return free_; }
  // The cost budget of a TP(lambda) program; empty for generic programs.
  std::optional<double> lambda() const { return lambda_; }

 private:
  std::size_t n_ = 0;
  SparseMatrix rows_;
  std::vector<double> budgets_;
  std::vector<double> objective_;
  std::vector<char> free_;
  std::optional<double> lambda_;
};

struct PackingSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::int64_t iterations = 0;
};

// Stop rule for solve_packing beyond the (1-eps) certificate: return as soon
// as the objective reaches target or is proven unable to.
struct PackingSolveOptions {
  std::uint64_t seed = 0;
  std::optional<double> target;
};

// Ax <= b exactly (after a final scale-down) and <c, x> >= (1-eps) OPT.
// Sequential mode is randomized through seed; data-parallel is deterministic.
PackingSolution solve_packing(const PackingProgram& prog, double eps, ExecMode mode,
                              const PackingSolveOptions& options = {});

// TP(lambda) over X (k x l, variable i*l + j): l column rows sum_i X_ij <= 1,
// k mass rows sum_j X_ij p_j <= q_i, and the cost row
// sum_ij C_ij X_ij p_j <= lambda; objective <1, Xp>.
PackingProgram build_tp(const Instance& inst, double lambda);

struct LambdaSearchState {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<std::pair<TransportPlan, double>> best;
  std::int64_t iterations = 0;
  std::int64_t probes = 0;
};

inline constexpr std::int64_t kMaxLambdaProbes = 64;

// Binary search for the smallest lambda whose TP(lambda) reaches mass 1-eps.
// The returned state's best plan is mass(eps) with cost <= best->second.
LambdaSearchState lambda_search(const Instance& inst, double eps, double delta_cost,
                                ExecMode mode, std::uint64_t seed = 0);

// Exact plan with cost <= OT + delta through lambda_search at
// eps = min(delta / (2 max_cost), 1/2) and repair_mass.
std::pair<TransportPlan, SolveReport> additive_approx_packing(const Instance& inst, double delta,
                                                              ExecMode mode,
                                                              std::uint64_t seed = 0);

}  // namespace otlp
