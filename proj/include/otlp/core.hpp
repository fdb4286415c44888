#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otlp/matrix.hpp"

namespace otlp {

// Feasibility tolerance for plan tags and the algebraic-identity tolerance.
inline constexpr double kPlanTol = 1e-9;
inline constexpr double kIdentityTol = 1e-12;
// Input sums within this distance of 1 are renormalized instead of rejected.
inline constexpr double kRenormalizeTol = 1e-6;

// A discrete transport problem: move source distribution p (length l) onto
// target distribution q (length k) under nonnegative costs C (k x l).
// Only validate_instance() can build one, so every Instance is valid.
class Instance {
 public:
  std::size_t k() const { return q_.size(); }
  std::size_t l() const { return p_.size(); }
  std::span<const double> p() const { return p_; }
  std::span<const double> q() const { return q_; }
  const Matrix& cost() const { return cost_; }

  // Sums of the raw inputs before renormalization (1 when untouched).
  double raw_p_sum() const { return raw_p_sum_; }
  double raw_q_sum() const { return raw_q_sum_; }
  bool renormalized() const { return raw_p_sum_ != 1.0 || raw_q_sum_ != 1.0; }

 private:
  friend Instance validate_instance(std::vector<double> p, std::vector<double> q, Matrix cost);

  std::vector<double> p_;
  std::vector<double> q_;
  Matrix cost_;
  double raw_p_sum_ = 1.0;
  double raw_q_sum_ = 1.0;
};

Instance validate_instance(std::vector<double> p, std::vector<double> q, Matrix cost);

enum class PlanKind { kExact, kUniform, kMass };

const char* PlanKindName(PlanKind kind);

// X_ij is the fraction of source coordinate j sent to target coordinate i.
// The kind records which feasibility contract X satisfies:
//   exact       Xp = q, X^t 1 = 1
//   uniform(e)  (1-e)q <= Xp <= q, (1-e)1 <= X^t 1 <= 1
//   mass(e)     Xp <= q, X^t 1 <= 1, <1, Xp> >= 1-e
class TransportPlan {
 public:
  TransportPlan() = default;
  TransportPlan(Matrix x, PlanKind kind, double eps = 0.0);

  const Matrix& matrix() const { return x_; }
  PlanKind kind() const { return kind_; }
  double eps() const { return eps_; }
  std::size_t k() const { return x_.rows(); }
  std::size_t l() const { return x_.cols(); }

  TransportPlan retagged(PlanKind kind, double eps = 0.0) const { return {x_, kind, eps}; }

 private:
  Matrix x_;
  PlanKind kind_ = PlanKind::kExact;
  double eps_ = 0.0;
};

struct Marginals {
  std::vector<double> row;  // Xp, length k
  std::vector<double> col;  // X^t 1, length l
};

// Row-major accumulation; repeated calls agree bit for bit.
Marginals marginals(const Matrix& x, const Instance& inst);

// sum_ij C_ij X_ij p_j
double plan_cost(const Matrix& x, const Instance& inst);
inline double plan_cost(const TransportPlan& plan, const Instance& inst) {
  return plan_cost(plan.matrix(), inst);
}

// <Cq, p> = sum_ij C_ij q_i p_j, the cost of the oblivious plan.
double avg_cost(const Instance& inst);

// max_ij C_ij
double max_cost(const Instance& inst);

// ||Xp - q||_inf and ||X^t 1 - 1||_inf.
struct MarginalResiduals {
  double row = 0.0;
  double col = 0.0;
};
MarginalResiduals marginal_residuals(const Matrix& x, const Instance& inst);

// True when the plan meets the contract named by its kind, within tol.
bool satisfies_kind(const TransportPlan& plan, const Instance& inst, double tol = kPlanTol);

// Mass left behind by a sub-feasible plan X:
//   p' = (I - diag(X^t 1)) p,  q' = q - Xp,  alpha = <1, q'>.
// Entries that come out negative only through rounding are clamped to zero.
struct Residual {
  std::vector<double> p_resid;
  std::vector<double> q_resid;
  double alpha = 0.0;
};
Residual residual(const Matrix& x, const Instance& inst);

}  // namespace otlp
