#pragma once

#include <cstddef>
#include <span>

#include "otlp/core.hpp"

namespace otlp {

// Every column set to q: X_ij = q_i. Exact for any source distribution of
// length l, with cost avg_cost().
TransportPlan oblivious_plan(std::span<const double> q, std::size_t l);

// Turns a (1-eps)-uniform plan into an exact one. The plan is shrunk to
// Y = (1 - eps/(1-eps)) X and the untransported mass is routed obliviously:
// U = Y + Z (I - diag(Y^t 1)), every column of Z equal to q'/alpha.
// Added cost is at most 4 eps avg_cost(inst). eps must lie in (0, 1/2].
TransportPlan repair_uniform(const TransportPlan& x, double eps, const Instance& inst);

// Turns a sub-feasible plan (Xp <= q, X^t 1 <= 1) into an exact one by routing
// the residual obliviously: U = X + Y (I - diag(X^t 1)), columns of Y = q'/alpha.
// Added cost is at most alpha * max_cost(inst) with alpha = 1 - <1, Xp>.
TransportPlan repair_mass(const TransportPlan& x, const Instance& inst);

}  // namespace otlp
