#include "otlp/packing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "otlp/error.hpp"
#include "otlp/mwu.hpp"
#include "otlp/oblivious.hpp"

namespace otlp {

PackingProgram::Builder::Builder(std::size_t n) : n_(n), objective_(n, 0.0) {}

PackingProgram::Builder& PackingProgram::Builder::add_row(std::span<const SparseEntry> entries,
                                                          double budget) {
  if (!std::isfinite(budget)) throw Error(ErrorKind::kNonFinite, "row budget");
  if (budget < 0.0) throw Error(ErrorKind::kNegativeEntry, "row budget");
  for (const SparseEntry& e : entries) {
    if (e.col < 0 || static_cast<std::size_t>(e.col) >= n_) {
      throw Error(ErrorKind::kDimensionMismatch, "variable index " + std::to_string(e.col));
    }
    if (!std::isfinite(e.value)) throw Error(ErrorKind::kNonFinite, "row coefficient");
    if (e.value < 0.0) throw Error(ErrorKind::kNegativeEntry, "row coefficient");
  }
  rows_.push_back({{entries.begin(), entries.end()}, budget});
  return *this;
}

PackingProgram::Builder& PackingProgram::Builder::set_objective(std::vector<double> c) {
  if (c.size() != n_) throw Error(ErrorKind::kDimensionMismatch, "objective length");
  for (double v : c) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFinite, "objective coefficient");
    if (v < 0.0) throw Error(ErrorKind::kNegativeEntry, "objective coefficient");
  }
  objective_ = std::move(c);
  return *this;
}

PackingProgram::Builder& PackingProgram::Builder::set_lambda(double lambda) {
  lambda_ = lambda;
  return *this;
}

PackingProgram PackingProgram::Builder::build() && {
  PackingProgram prog;
  prog.n_ = n_;
  prog.free_.assign(n_, 1);
  for (const Row& row : rows_) {
    if (row.budget > 0.0) continue;
    for (const SparseEntry& e : row.entries) {
      if (e.value > 0.0) prog.free_[e.col] = 0;
    }
  }
  prog.rows_ = SparseMatrix(n_);
  for (const Row& row : rows_) {
    if (row.budget == 0.0) continue;
    std::vector<SparseEntry> kept;
    for (const SparseEntry& e : row.entries) {
      if (e.value > 0.0 && prog.free_[e.col]) kept.push_back(e);
    }
    prog.rows_.add_row(kept);
    prog.budgets_.push_back(row.budget);
  }
  prog.objective_ = std::move(objective_);
  prog.lambda_ = lambda_;
  return prog;
}

namespace {

std::int64_t packing_budget(std::size_t rows, double eps) {
  const double m = static_cast<double>(std::max<std::size_t>(rows, 2));
  return 64 * static_cast<std::int64_t>(std::ceil(std::log(m) / (eps * eps)));
}

}  // namespace

PackingSolution solve_packing(const PackingProgram& prog, double eps, ExecMode mode,
                              const PackingSolveOptions& options) {
  mwu::PackingSystem sys;
  sys.n = prog.n();
  sys.rows = SparseMatrix(sys.n);
  for (std::size_t r = 0; r < prog.rows().rows(); ++r) {
    const auto cols = prog.rows().row_cols(r);
    const auto vals = prog.rows().row_values(r);
    std::vector<SparseEntry> row(cols.size());
    for (std::size_t e = 0; e < cols.size(); ++e) row[e] = {cols[e], vals[e] / prog.budgets()[r]};
    sys.rows.add_row(row);
  }
  sys.objective.assign(prog.objective().begin(), prog.objective().end());
  sys.free_var.assign(prog.free_vars().begin(), prog.free_vars().end());

  mwu::PackingOptions opts;
  opts.eps = eps;
  opts.mode = mode;
  opts.seed = options.seed;
  opts.iteration_budget = packing_budget(prog.rows().rows(), eps);
  opts.target = options.target;
  mwu::PackingResult r = mwu::solve_packing_system(sys, opts);
  return {std::move(r.x), r.objective, r.iterations};
}

PackingProgram build_tp(const Instance& inst, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::kInvalidArgument, "lambda must be finite and >= 0");
  }
  const std::size_t k = inst.k();
  const std::size_t l = inst.l();
  const auto p = inst.p();
  const auto q = inst.q();
  auto var = [l](std::size_t i, std::size_t j) { return static_cast<std::int32_t>(i * l + j); };

  PackingProgram::Builder b(k * l);
  std::vector<SparseEntry> row;
  for (std::size_t j = 0; j < l; ++j) {
    row.clear();
    for (std::size_t i = 0; i < k; ++i) row.push_back({var(i, j), 1.0});
    b.add_row(row, 1.0);
  }
  for (std::size_t i = 0; i < k; ++i) {
    row.clear();
    for (std::size_t j = 0; j < l; ++j) row.push_back({var(i, j), p[j]});
    b.add_row(row, q[i]);
  }
  row.clear();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) row.push_back({var(i, j), inst.cost()(i, j) * p[j]});
  }
  b.add_row(row, lambda);

  std::vector<double> c(k * l);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) c[var(i, j)] = p[j];
  }
  b.set_objective(std::move(c));
  b.set_lambda(lambda);
  return std::move(b).build();
}

LambdaSearchState lambda_search(const Instance& inst, double eps, double delta_cost,
                                ExecMode mode, std::uint64_t seed) {
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw Error(ErrorKind::kEpsOutOfRange, "lambda_search needs eps in (0, 1/2]");
  }
  if (!(delta_cost > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "delta_cost must be positive");
  }
  LambdaSearchState st;
  st.hi = avg_cost(inst);

  auto probe = [&](double lambda) {
    ++st.probes;
    const PackingSolution sol = solve_packing(build_tp(inst, lambda), eps, mode,
                                              {.seed = seed, .target = 1.0 - eps});
    st.iterations += sol.iterations;
    if (sol.objective < 1.0 - eps) return false;
    TransportPlan plan(Matrix(inst.k(), inst.l(), sol.x), PlanKind::kMass, eps);
    st.best.emplace(std::move(plan), lambda);
    return true;
  };

  if (!probe(st.hi)) {
    throw Error(ErrorKind::kNumericallyDegenerate,
                "TP(avg_cost) did not reach mass 1 - eps; the oblivious plan is feasible there");
  }
  while (st.hi - st.lo > delta_cost && st.probes < kMaxLambdaProbes) {
    const double mid = 0.5 * (st.lo + st.hi);
    if (probe(mid)) {
      st.hi = mid;
    } else {
      st.lo = mid;
    }
  }
  return st;
}

std::pair<TransportPlan, SolveReport> additive_approx_packing(const Instance& inst, double delta,
                                                              ExecMode mode,
                                                              std::uint64_t seed) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::kInvalidArgument, "delta must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.pipeline = "packing";
  report.k = inst.k();
  report.l = inst.l();
  report.delta = delta;
  report.seed = seed;

  const double cmax = max_cost(inst);
  TransportPlan plan;
  if (cmax == 0.0) {
    plan = oblivious_plan(inst.q(), inst.l());
  } else {
    const double eps = std::min(delta / (2.0 * cmax), 0.5);
    report.eps = eps;
    const LambdaSearchState st = lambda_search(inst, eps, delta / 2.0, mode, seed);
    report.iterations = st.iterations;
    report.probes = st.probes;
    plan = repair_mass(st.best->first, inst);
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
