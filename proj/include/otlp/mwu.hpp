#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "otlp/kernels.hpp"
#include "otlp/sparse.hpp"

// Width-independent multiplicative-weights engines shared by the mixed
// packing/covering and pure packing solvers. Both work on normalized
// systems (every budget and demand equal to 1).
namespace otlp::mwu {

// Px <= 1, Cx >= 1, x >= 0, with x_j pinned to 0 where free_var[j] == 0.
struct MixedSystem {
  std::size_t n = 0;
  SparseMatrix pack;
  SparseMatrix cover;
  std::vector<char> free_var;
};

struct FeasibilityResult {
  bool feasible = false;
  // Scaled so that min_r (Cx)_r = 1; then max_r (Px)_r = ratio <= target.
  std::vector<double> x;
  double ratio = 0.0;
  std::int64_t iterations = 0;
  // Infeasibility certificate: normalized weights y, z with
  // (P^t y)_j > (C^t z)_j for every variable that touches a weighted row.
  std::vector<double> pack_dual;
  std::vector<double> cover_dual;
};

// Largest weight parameter e with (1+e) ln(1/(1-e)) / ln(1+e) <= 1 + (target-1)/2.
double mixed_weight_eps(double target_ratio);

// Finds x with max(Px) <= target_ratio * min(Cx), or certifies that no x
// satisfies Px <= 1, Cx >= 1. Every favorable variable grows by the same
// factor per round, sized so no weighted row load rises by more than one
// weight unit. Covering rows retire at the load threshold derived from the
// potential bound, which makes the two outcomes exhaustive.
FeasibilityResult solve_mixed(const MixedSystem& sys, double target_ratio, ExecMode mode,
                              std::int64_t iteration_budget);

// max <c, x> subject to Ax <= 1, x >= 0.
struct PackingSystem {
  std::size_t n = 0;
  SparseMatrix rows;
  std::vector<double> objective;
  std::vector<char> free_var;
};

struct PackingOptions {
  double eps = 0.1;
  ExecMode mode = ExecMode::kSequential;
  std::uint64_t seed = 0;
  std::int64_t iteration_budget = 0;
  // Stop as soon as the objective is known to be above or below this value.
  std::optional<double> target;
};

struct PackingResult {
  std::vector<double> x;  // Ax <= 1 after the final scale-down
  double objective = 0.0;
  double dual_bound = 0.0;  // best weak-duality upper bound on the optimum
  std::int64_t iterations = 0;
  bool below_target = false;
};

// Sequential mode runs randomized Gauss-Seidel sweeps (seeded shuffle of the
// coordinates, one capped step per favorable coordinate); data-parallel mode
// runs deterministic bulk rounds. Both stop on the primal-dual certificate
// objective >= (1 - eps) * dual_bound.
PackingResult solve_packing_system(const PackingSystem& sys, const PackingOptions& opts);

}  // namespace otlp::mwu
