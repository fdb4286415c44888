#include "otlp/oblivious.hpp"

#include <algorithm>
#include <string>

#include "otlp/error.hpp"

namespace otlp {

TransportPlan oblivious_plan(std::span<const double> q, std::size_t l) {
  Matrix x(q.size(), l);
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j < l; ++j) x(i, j) = q[i];
  }
  return TransportPlan(std::move(x), PlanKind::kExact);
}

namespace {

constexpr double kDegenerateAlpha = 1e-12;

// U = Y + Z (I - diag(Y^t 1)) where every column of Z is q'/alpha.
Matrix route_residual(Matrix y, const Instance& inst, const Residual& r) {
  const Marginals m = marginals(y, inst);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const double share = r.q_resid[i] / r.alpha;
    auto row = y.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] += share * std::max(0.0, 1.0 - m.col[j]);
    }
  }
  return y;
}

}  // namespace

TransportPlan repair_uniform(const TransportPlan& x, double eps, const Instance& inst) {
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw Error(ErrorKind::kEpsOutOfRange, "repair_uniform needs eps in (0, 1/2], got " +
                                               std::to_string(eps));
  }
  if (!satisfies_kind(x.retagged(PlanKind::kUniform, eps), inst)) {
    throw Error(ErrorKind::kNotUniform, "plan is not (1-eps)-uniform for eps=" +
                                            std::to_string(eps));
  }
  Matrix y = x.matrix();
  const double shrink = 1.0 - eps / (1.0 - eps);
  for (double& v : y.data()) v *= shrink;

  const Residual r = residual(y, inst);
  if (r.alpha <= kDegenerateAlpha) return TransportPlan(std::move(y), PlanKind::kExact);
  return TransportPlan(route_residual(std::move(y), inst, r), PlanKind::kExact);
}

TransportPlan repair_mass(const TransportPlan& x, const Instance& inst) {
  const Marginals m = marginals(x.matrix(), inst);
  for (std::size_t i = 0; i < inst.k(); ++i) {
    if (m.row[i] > inst.q()[i] + kPlanTol) {
      throw Error(ErrorKind::kNotSubFeasible, "row " + std::to_string(i) + " overfills q");
    }
  }
  for (std::size_t j = 0; j < inst.l(); ++j) {
    if (m.col[j] > 1.0 + kPlanTol) {
      throw Error(ErrorKind::kNotSubFeasible, "column " + std::to_string(j) + " exceeds 1");
    }
  }
  const Residual r = residual(x.matrix(), inst);
  if (r.alpha <= kDegenerateAlpha) return x.retagged(PlanKind::kExact);
  return TransportPlan(route_residual(x.matrix(), inst, r), PlanKind::kExact);
}

}  // namespace otlp
