#include "otlp/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "otlp/error.hpp"
#include "otlp/mwu.hpp"
#include "otlp/oblivious.hpp"

namespace otlp {

namespace {

void check_row(std::span<const SparseEntry> entries, double rhs, std::size_t n) {
  if (!std::isfinite(rhs)) throw Error(ErrorKind::kNonFinite, "row right-hand side");
  if (rhs < 0.0) throw Error(ErrorKind::kNegativeEntry, "row right-hand side");
  for (const SparseEntry& e : entries) {
    if (e.col < 0 || static_cast<std::size_t>(e.col) >= n) {
      throw Error(ErrorKind::kDimensionMismatch, "variable index " + std::to_string(e.col));
    }
    if (!std::isfinite(e.value)) throw Error(ErrorKind::kNonFinite, "row coefficient");
    if (e.value < 0.0) throw Error(ErrorKind::kNegativeEntry, "row coefficient");
  }
}

}  // namespace

PositiveProgram::Builder::Builder(std::size_t n) : n_(n) {}

PositiveProgram::Builder& PositiveProgram::Builder::add_packing_row(
    std::span<const SparseEntry> entries, double budget) {
  check_row(entries, budget, n_);
  pack_.push_back({{entries.begin(), entries.end()}, budget});
  return *this;
}

PositiveProgram::Builder& PositiveProgram::Builder::add_covering_row(
    std::span<const SparseEntry> entries, double demand) {
  check_row(entries, demand, n_);
  cover_.push_back({{entries.begin(), entries.end()}, demand});
  return *this;
}

PositiveProgram::Builder& PositiveProgram::Builder::set_objective(LinearObjective objective) {
  if (objective.coeffs.size() != n_) {
    throw Error(ErrorKind::kDimensionMismatch, "objective length");
  }
  for (double v : objective.coeffs) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFinite, "objective coefficient");
    if (v < 0.0) throw Error(ErrorKind::kNegativeEntry, "objective coefficient");
  }
  objective_ = std::move(objective);
  return *this;
}

PositiveProgram PositiveProgram::Builder::build() && {
  PositiveProgram prog;
  prog.n_ = n_;
  prog.free_.assign(n_, 1);
  for (const Row& row : pack_) {
    if (row.rhs > 0.0) continue;
    for (const SparseEntry& e : row.entries) {
      if (e.value > 0.0) prog.free_[e.col] = 0;
    }
  }
  auto compact = [&](const Row& row) {
    std::vector<SparseEntry> kept;
    for (const SparseEntry& e : row.entries) {
      if (e.value > 0.0 && prog.free_[e.col]) kept.push_back(e);
    }
    return kept;
  };
  prog.pack_ = SparseMatrix(n_);
  prog.cover_ = SparseMatrix(n_);
  for (const Row& row : pack_) {
    if (row.rhs == 0.0) continue;
    prog.pack_.add_row(compact(row));
    prog.budgets_.push_back(row.rhs);
  }
  for (const Row& row : cover_) {
    if (row.rhs == 0.0) continue;
    prog.cover_.add_row(compact(row));
    prog.demands_.push_back(row.rhs);
  }
  prog.objective_ = std::move(objective_);
  return prog;
}

std::int64_t mpc_iteration_budget(std::size_t rows, double eps) {
  const double m = static_cast<double>(std::max<std::size_t>(rows, 2));
  return 64 * static_cast<std::int64_t>(std::ceil(std::log(m) / (eps * eps)));
}

namespace {

constexpr double kBigRatio = 1e6;

// Row-normalized copy of the program, with the objective attached as a
// budget row at level lambda (nullopt: no objective row).
mwu::MixedSystem normalized_system(const PositiveProgram& prog, std::optional<double> lambda) {
  mwu::MixedSystem sys;
  sys.n = prog.n();
  sys.free_var.assign(prog.free_vars().begin(), prog.free_vars().end());
  const auto& obj = prog.objective();
  const bool min_sense = obj && obj->sense == Sense::kMin;
  if (lambda && *lambda == 0.0 && min_sense) {
    for (std::size_t j = 0; j < sys.n; ++j) {
      if (obj->coeffs[j] > 0.0) sys.free_var[j] = 0;
    }
  }
  auto scaled = [&](const SparseMatrix& a, std::size_t r, double rhs) {
    std::vector<SparseEntry> row;
    const auto cols = a.row_cols(r);
    const auto vals = a.row_values(r);
    for (std::size_t e = 0; e < cols.size(); ++e) {
      if (sys.free_var[cols[e]]) row.push_back({cols[e], vals[e] / rhs});
    }
    return row;
  };
  auto objective_row = [&]() {
    std::vector<SparseEntry> row;
    for (std::size_t j = 0; j < sys.n; ++j) {
      if (obj->coeffs[j] > 0.0 && sys.free_var[j]) {
        row.push_back({static_cast<std::int32_t>(j), obj->coeffs[j] / *lambda});
      }
    }
    return row;
  };
  sys.pack = SparseMatrix(sys.n);
  sys.cover = SparseMatrix(sys.n);
  for (std::size_t r = 0; r < prog.packing().rows(); ++r) {
    sys.pack.add_row(scaled(prog.packing(), r, prog.budgets()[r]));
  }
  for (std::size_t r = 0; r < prog.covering().rows(); ++r) {
    sys.cover.add_row(scaled(prog.covering(), r, prog.demands()[r]));
  }
  if (lambda && *lambda > 0.0) {
    (min_sense ? sys.pack : sys.cover).add_row(objective_row());
  }
  return sys;
}

double objective_value(const PositiveProgram& prog, std::span<const double> x) {
  if (!prog.objective()) return 0.0;
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) v += prog.objective()->coeffs[j] * x[j];
  return v;
}

// Lower bound on min <v, x> over Ax <= b, Cx >= d from row weights y, z
// (normalized rows). Any feasible x has sum_j x_j gp_j <= Y and
// sum_j x_j gc_j >= Z, so for every s >= 0 with s gc_j - gp_j <= mu v_j:
//   <v, x> >= (s Z - Y) / mu.
// The bound is quasi-concave in s; a golden-section search picks s.
double lagrangian_bound(const PositiveProgram& prog, std::span<const double> y,
                        std::span<const double> z) {
  const std::size_t n = prog.n();
  const auto& v = prog.objective()->coeffs;
  std::vector<double> gp(n, 0.0), gc(n, 0.0);
  double y_sum = 0.0;
  double z_sum = 0.0;
  for (std::size_t r = 0; r < prog.packing().rows(); ++r) {
    const double w = y[r] / prog.budgets()[r];
    y_sum += y[r];
    const auto cols = prog.packing().row_cols(r);
    const auto vals = prog.packing().row_values(r);
    for (std::size_t e = 0; e < cols.size(); ++e) gp[cols[e]] += w * vals[e];
  }
  for (std::size_t r = 0; r < prog.covering().rows(); ++r) {
    const double w = z[r] / prog.demands()[r];
    z_sum += z[r];
    const auto cols = prog.covering().row_cols(r);
    const auto vals = prog.covering().row_values(r);
    for (std::size_t e = 0; e < cols.size(); ++e) gc[cols[e]] += w * vals[e];
  }
  if (!(z_sum > 0.0)) return 0.0;

  double s_lo = y_sum / z_sum;
  double s_hi = kBigRatio * std::max(s_lo, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (prog.free_vars()[j] && v[j] == 0.0 && gc[j] > 0.0) s_hi = std::min(s_hi, gp[j] / gc[j]);
  }
  if (!(s_hi > s_lo)) return 0.0;

  auto bound = [&](double s) {
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (prog.free_vars()[j] && v[j] > 0.0) mu = std::max(mu, (s * gc[j] - gp[j]) / v[j]);
    }
    const double num = s * z_sum - y_sum;
    if (num <= 0.0) return 0.0;
    return mu > 0.0 ? num / mu : std::numeric_limits<double>::infinity();
  };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(std::max(s_lo, 1e-300));
  double b = std::log(s_hi);
  double best = std::max(bound(s_hi), 0.0);
  for (int it = 0; it < 80 && b - a > 1e-9; ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    const double fc = bound(std::exp(c));
    const double fd = bound(std::exp(d));
    best = std::max({best, fc, fd});
    if (fc < fd) {
      a = c;
    } else {
      b = d;
    }
  }
  return best;
}

// Drives repeated feasibility solves and keeps the bookkeeping.
class MpcSearch {
 public:
  MpcSearch(const PositiveProgram& prog, double eps, ExecMode mode)
      : prog_(prog), eps_(eps), mode_(mode) {
    const auto& obj = prog.objective();
    if (!obj) {
      // x = (1-eps) xhat: covering >= 1-eps, packing <= ratio (1-eps) <= 1+eps.
      target_ = (1.0 + eps) / (1.0 - eps);
      cover_level_ = 1.0 - eps;
    } else if (obj->sense == Sense::kMin) {
      // Packing and the objective row end at <= 1 + 3eps/4, leaving a
      // (1+eps)/(1+3eps/4) factor for the lambda search.
      target_ = (1.0 + 0.75 * eps) / (1.0 - eps);
      cover_level_ = 1.0 - eps;
      rho_ = (1.0 + eps) / (1.0 + 0.75 * eps) - 1.0;
    } else {
      target_ = (1.0 + eps) / (1.0 - 0.5 * eps);
      cover_level_ = 1.0 - 0.5 * eps;
      rho_ = (1.0 - 0.5 * eps) / (1.0 - eps) - 1.0;
    }
    budget_ = mpc_iteration_budget(prog.rows() + (obj ? 1 : 0), eps);
  }

  // Returns the scaled solution, or nullopt with the certificate kept.
  std::optional<std::vector<double>> probe(std::optional<double> lambda) {
    ++probes_;
    mwu::FeasibilityResult r =
        mwu::solve_mixed(normalized_system(prog_, lambda), target_, mode_, budget_);
    iterations_ += r.iterations;
    const bool min_sense = prog_.objective() && prog_.objective()->sense == Sense::kMin;
    if (min_sense && !r.cover_dual.empty()) {
      lower_ = std::max(lower_, lagrangian_bound(prog_, r.pack_dual, r.cover_dual));
    }
    if (!r.feasible) {
      if (min_sense && lambda) lower_ = std::max(lower_, *lambda);
      pack_dual_ = std::move(r.pack_dual);
      cover_dual_ = std::move(r.cover_dual);
      return std::nullopt;
    }
    for (double& v : r.x) v *= cover_level_;
    return std::move(r.x);
  }

  MpcResult feasible(std::vector<double> x) const {
    MpcResult res;
    res.status = MpcStatus::kFeasible;
    res.solution.objective_value = objective_value(prog_, x);
    res.solution.x = std::move(x);
    res.solution.eps = eps_;
    res.solution.iterations = iterations_;
    res.solution.probes = probes_;
    return res;
  }

  MpcResult infeasible() const {
    MpcResult res;
    res.status = MpcStatus::kInfeasible;
    res.solution.eps = eps_;
    res.solution.iterations = iterations_;
    res.solution.probes = probes_;
    res.pack_dual = pack_dual_;
    res.cover_dual = cover_dual_;
    return res;
  }

  std::int64_t probes() const { return probes_; }
  double rho() const { return rho_; }
  // Proven lower bound on the min-sense optimum.
  double lower() const { return lower_; }

 private:
  const PositiveProgram& prog_;
  double eps_;
  ExecMode mode_;
  double target_ = 0.0;
  double cover_level_ = 1.0;
  double rho_ = 0.0;
  std::int64_t budget_ = 0;
  std::int64_t probes_ = 0;
  std::int64_t iterations_ = 0;
  double lower_ = 0.0;
  std::vector<double> pack_dual_;
  std::vector<double> cover_dual_;
};

MpcResult search_min(MpcSearch& search, const PositiveProgram& prog, double eps,
                     const MpcOptions& options) {
  std::optional<std::vector<double>> best;
  double hi = 0.0;
  if (options.objective_bound) {
    hi = *options.objective_bound;
    best = search.probe(hi);
    if (!best) return search.infeasible();
  } else {
    best = search.probe(std::nullopt);
    if (!best) return search.infeasible();
    hi = std::max(objective_value(prog, *best), 0.0);
    if (hi > 0.0) {
      // Relaxed solutions may undercut the optimum; grow until a probe holds.
      while (true) {
        if (search.probes() >= options.max_probes) return search.feasible(std::move(*best));
        if (auto x = search.probe(hi)) {
          best = std::move(x);
          break;
        }
        hi *= 2.0;
      }
    }
  }
  double best_value = objective_value(prog, *best);
  if (best_value == 0.0 || hi == 0.0) return search.feasible(std::move(*best));

  // lo never exceeds the optimum: it comes from infeasible probes and from
  // Lagrangian bounds on the weights of every probe.
  if (options.absolute_gap && best_value - search.lower() <= *options.absolute_gap) {
    return search.feasible(std::move(*best));
  }
  if (search.lower() == 0.0 && search.probes() < options.max_probes) {
    if (auto x = search.probe(0.0)) return search.feasible(std::move(*x));
  }
  double lo = 0.0;
  while (search.probes() < options.max_probes) {
    lo = std::max(lo, std::min(search.lower(), hi));
    if (best_value <= (1.0 + eps) * lo) break;
    if (options.absolute_gap && best_value - lo <= *options.absolute_gap) break;
    if (hi <= (1.0 + search.rho()) * lo) break;
    const double mid = 0.5 * (lo + hi);
    if (auto x = search.probe(mid)) {
      hi = mid;
      const double v = objective_value(prog, *x);
      if (v < best_value) {
        best_value = v;
        best = std::move(x);
      }
    } else {
      lo = mid;
    }
  }
  return search.feasible(std::move(*best));
}

MpcResult search_max(MpcSearch& search, const PositiveProgram& prog, double eps,
                     const MpcOptions& options) {
  const auto& coeffs = prog.objective()->coeffs;
  {
    std::vector<char> packed(prog.n(), 0);
    for (std::size_t r = 0; r < prog.packing().rows(); ++r) {
      for (std::int32_t c : prog.packing().row_cols(r)) packed[c] = 1;
    }
    for (std::size_t j = 0; j < prog.n(); ++j) {
      if (coeffs[j] > 0.0 && prog.free_vars()[j] && !packed[j]) {
        throw Error(ErrorKind::kUnbounded, "variable " + std::to_string(j) +
                                               " has positive objective and no packing row");
      }
    }
  }
  std::optional<std::vector<double>> best = search.probe(std::nullopt);
  if (!best) return search.infeasible();
  double best_value = objective_value(prog, *best);
  double lo = 0.0;
  double hi = 0.0;
  if (options.objective_bound) {
    hi = *options.objective_bound;
  } else {
    // Double until a probe is certified infeasible; that level exceeds OPT.
    hi = std::max(best_value, 1e-300) * 2.0;
    while (search.probes() < options.max_probes) {
      auto x = search.probe(hi);
      if (!x) break;
      lo = hi;
      const double v = objective_value(prog, *x);
      if (v > best_value) {
        best_value = v;
        best = std::move(x);
      }
      hi *= 2.0;
    }
  }
  while (search.probes() < options.max_probes) {
    if (best_value >= (1.0 - eps) * hi) break;
    if (lo >= hi / (1.0 + search.rho())) break;
    const double mid = 0.5 * (lo + hi);
    if (auto x = search.probe(mid)) {
      lo = mid;
      const double v = objective_value(prog, *x);
      if (v > best_value) {
        best_value = v;
        best = std::move(x);
      }
    } else {
      hi = mid;
    }
  }
  return search.feasible(std::move(*best));
}

}  // namespace

MpcResult solve_mpc(const PositiveProgram& prog, double eps, ExecMode mode,
                    const MpcOptions& options) {
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw Error(ErrorKind::kEpsOutOfRange, "solve_mpc needs eps in (0, 1/2], got " +
                                               std::to_string(eps));
  }
  MpcSearch search(prog, eps, mode);
  if (!prog.objective()) {
    auto x = search.probe(std::nullopt);
    return x ? search.feasible(std::move(*x)) : search.infeasible();
  }
  if (prog.objective()->sense == Sense::kMin) return search_min(search, prog, eps, options);
  return search_max(search, prog, eps, options);
}

PositiveProgram build_transport_mpc(const Instance& inst) {
  const std::size_t k = inst.k();
  const std::size_t l = inst.l();
  const auto p = inst.p();
  const auto q = inst.q();
  auto var = [l](std::size_t i, std::size_t j) { return static_cast<std::int32_t>(i * l + j); };

  std::vector<std::vector<SparseEntry>> mass(k), column(l);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) mass[i].push_back({var(i, j), p[j]});
  }
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t i = 0; i < k; ++i) column[j].push_back({var(i, j), 1.0});
  }
  PositiveProgram::Builder b(k * l);
  for (std::size_t i = 0; i < k; ++i) b.add_packing_row(mass[i], q[i]);
  for (std::size_t j = 0; j < l; ++j) b.add_packing_row(column[j], 1.0);
  for (std::size_t i = 0; i < k; ++i) b.add_covering_row(mass[i], q[i]);
  for (std::size_t j = 0; j < l; ++j) b.add_covering_row(column[j], 1.0);

  LinearObjective obj{Sense::kMin, std::vector<double>(k * l)};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) obj.coeffs[var(i, j)] = p[j] * inst.cost()(i, j);
  }
  b.set_objective(std::move(obj));
  return std::move(b).build();
}

TransportPlan uniform_plan_from_solution(const MpcSolution& sol, double eps,
                                         const Instance& inst) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw Error(ErrorKind::kEpsOutOfRange, "eps must lie in [0, 1)");
  }
  if (sol.x.size() != inst.k() * inst.l()) {
    throw Error(ErrorKind::kDimensionMismatch, "solution length");
  }
  Matrix x(inst.k(), inst.l(), sol.x);
  const Marginals m = marginals(x, inst);
  const auto q = inst.q();
  for (std::size_t i = 0; i < inst.k(); ++i) {
    if (m.row[i] > (1.0 + eps) * q[i] + kPlanTol || m.row[i] < (1.0 - eps) * q[i] - kPlanTol) {
      throw Error(ErrorKind::kNotRelativeApprox, "row " + std::to_string(i));
    }
  }
  for (std::size_t j = 0; j < inst.l(); ++j) {
    if (m.col[j] > 1.0 + eps + kPlanTol || m.col[j] < 1.0 - eps - kPlanTol) {
      throw Error(ErrorKind::kNotRelativeApprox, "column " + std::to_string(j));
    }
  }
  for (double& v : x.data()) v *= 1.0 - eps;
  return TransportPlan(std::move(x), PlanKind::kUniform, 1.0 - (1.0 - eps) * (1.0 - eps));
}

std::pair<TransportPlan, SolveReport> additive_approx_mpc(const Instance& inst, double delta,
                                                          ExecMode mode) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::kInvalidArgument, "delta must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.pipeline = "mpc";
  report.k = inst.k();
  report.l = inst.l();
  report.delta = delta;

  const double avg = avg_cost(inst);
  TransportPlan plan;
  if (avg == 0.0) {
    plan = oblivious_plan(inst.q(), inst.l());
  } else {
    const double eps = std::min(delta / (4.0 * avg), 0.5);
    const double solver_eps = 1.0 - std::sqrt(1.0 - 0.5 * eps);
    report.eps = eps;
    const MpcResult res = solve_mpc(build_transport_mpc(inst), solver_eps, mode,
                                    {.objective_bound = avg, .absolute_gap = 0.5 * delta});
    if (res.status != MpcStatus::kFeasible) {
      throw Error(ErrorKind::kNumericallyDegenerate, "transport program reported infeasible");
    }
    report.iterations = res.solution.iterations;
    report.probes = res.solution.probes;
    const TransportPlan uniform = uniform_plan_from_solution(res.solution, solver_eps, inst);
    plan = repair_uniform(uniform, std::min(uniform.eps(), 0.5), inst);
  }
  report.cost = plan_cost(plan, inst);
  const MarginalResiduals resid = marginal_residuals(plan.matrix(), inst);
  report.resid_row = resid.row;
  report.resid_col = resid.col;
  report.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();
  return {std::move(plan), report};
}

}  // namespace otlp
