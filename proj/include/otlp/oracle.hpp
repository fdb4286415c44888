#pragma once

#include <cstdint>

#include "otlp/core.hpp"

namespace otlp {

inline constexpr std::size_t kOracleMaxEntries = 1'000'000;

struct ExactResult {
  double cost = 0.0;
  Matrix plan;
  std::int64_t iterations = 0;  // augmenting paths
  double dual_gap = 0.0;
};

// Optimal transport by successive shortest paths on the bipartite graph
// (sources j with supply p_j, sinks i with demand q_i, arc cost C_ij).
// Ties are broken toward the lower node index, so results are deterministic.
ExactResult exact_ot(const Instance& inst);

// Optimum of TP(lambda): the largest mass <1, Xp> movable by a sub-feasible
// plan of cost <= lambda. Read off the convex min-cost curve of the same flow.
double max_mass_within_budget(const Instance& inst, double lambda);

struct PlanVerdict {
  double resid_row = 0.0;
  double resid_col = 0.0;
  double cost = 0.0;
  double oracle = 0.0;
  double gap = 0.0;
  bool pass = false;
};

// pass: residuals <= 1e-9 and cost - OT <= delta + 1e-9.
PlanVerdict check_plan(const TransportPlan& plan, const Instance& inst, double delta);
PlanVerdict check_plan(const TransportPlan& plan, const Instance& inst, double delta,
                       double oracle_cost);

}  // namespace otlp
