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

enum class Sense { kMin, kMax };

struct LinearObjective {
  Sense sense = Sense::kMin;
  std::vector<double> coeffs;
};

// Ax <= b (packing rows), Cx >= d (covering rows), x >= 0, with an optional
// nonnegative linear objective. Built through Builder, which drops
// zero-demand covering rows and eliminates the variables of zero-budget
// packing rows, so stored budgets and demands are strictly positive.
class PositiveProgram {
 public:
  class Builder {
   public:
    explicit Builder(std::size_t n);
    Builder& add_packing_row(std::span<const SparseEntry> entries, double budget);
    Builder& add_covering_row(std::span<const SparseEntry> entries, double demand);
    Builder& set_objective(LinearObjective objective);
    PositiveProgram build() &&;

   private:
    struct Row {
      std::vector<SparseEntry> entries;
      double rhs;
    };
    std::size_t n_;
    std::vector<Row> pack_;
    std::vector<Row> cover_;
    std::optional<LinearObjective> objective_;
  };

  std::size_t n() const { return n_; }
  const SparseMatrix& packing() const { return pack_; }
  const SparseMatrix& covering() const { return cover_; }
  std::span<const double> budgets() const { return budgets_; }
  std::span<const double> demands() const { return demands_; }
  const std::optional<LinearObjective>& objective() const { return objective_; }
  // 0 for variables forced to zero by a zero-budget packing row.
  std::span<const char> free_vars() const { return free_; }
  std::size_t rows() const { return pack_.rows() + cover_.rows(); }
  std::size_t nonzeros() const { return pack_.nonzeros() + cover_.nonzeros(); }

 private:
  std::size_t n_ = 0;
  SparseMatrix pack_;
  SparseMatrix cover_;
  std::vector<double> budgets_;
  std::vector<double> demands_;
  std::optional<LinearObjective> objective_;
  std::vector<char> free_;
};

// Ax <= (1+eps) b and Cx >= (1-eps) d.
struct MpcSolution {
  std::vector<double> x;
  double eps = 0.0;
  std::int64_t iterations = 0;
  std::int64_t probes = 0;
  double objective_value = 0.0;
};

enum class MpcStatus { kFeasible, kInfeasible };

struct MpcResult {
  MpcStatus status = MpcStatus::kInfeasible;
  MpcSolution solution;
  // Normalized row weights proving Ax <= b, Cx >= d has no solution.
  std::vector<double> pack_dual;
  std::vector<double> cover_dual;
};

struct MpcOptions {
  // A value known to be >= the optimum (min) or > it (max); skips bracketing.
  std::optional<double> objective_bound;
  // Min sense: also accept once the objective is provably within this
  // additive distance of the optimum.
  std::optional<double> absolute_gap;
  std::int64_t max_probes = 64;
};

// Rounds allowed per feasibility solve: 64 * ceil(ln(m) / eps^2).
std::int64_t mpc_iteration_budget(std::size_t rows, double eps);

// eps-relative approximation of a mixed packing/covering program. The
// objective is handled by a budget row <v, x> <= lambda (>= for max) and a
// search over lambda; min-sense results satisfy <v, x> <= (1+eps) OPT.
MpcResult solve_mpc(const PositiveProgram& prog, double eps, ExecMode mode,
                    const MpcOptions& options = {});

// Transport as a mixed program over X (k x l, variable i*l + j):
// packing Xp <= q and X^t 1 <= 1, covering Xp >= q and X^t 1 >= 1,
// objective min sum_ij p_j C_ij X_ij.
PositiveProgram build_transport_mpc(const Instance& inst);

// (1-eps) X for an eps-relative approximation X of the transport program;
// the result is (1-(1-eps)^2)-uniform.
TransportPlan uniform_plan_from_solution(const MpcSolution& sol, double eps,
                                         const Instance& inst);

// Exact plan with cost <= OT + delta, with eps = min(delta / (4 avg_cost), 1/2).
// Half of delta goes to the lambda search (absolute gap delta/2), half to
// the repair: the solver runs at 1 - sqrt(1 - eps/2) so the scaled plan is
// (eps/2)-uniform and repair_uniform adds at most 2 eps avg_cost.
std::pair<TransportPlan, SolveReport> additive_approx_mpc(const Instance& inst, double delta,
                                                          ExecMode mode);

}  // namespace otlp
