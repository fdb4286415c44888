#include <doctest.h>

#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "otlp/error.hpp"
#include "otlp/io.hpp"
#include "otlp/mpc.hpp"
#include "otlp/oracle.hpp"

using namespace otlp;
using test::make;

namespace {

struct Loads {
  double max_pack = 0.0;  // max_r (Ax)_r / b_r
  double min_cover = 0.0;  // min_r (Cx)_r / d_r
};

Loads loads(const PositiveProgram& prog, const std::vector<double>& x) {
  Loads out{0.0, INFINITY};
  for (std::size_t r = 0; r < prog.packing().rows(); ++r) {
    double s = 0.0;
    const auto cols = prog.packing().row_cols(r);
    const auto vals = prog.packing().row_values(r);
    for (std::size_t e = 0; e < cols.size(); ++e) s += vals[e] * x[cols[e]];
    out.max_pack = std::max(out.max_pack, s / prog.budgets()[r]);
  }
  for (std::size_t r = 0; r < prog.covering().rows(); ++r) {
    double s = 0.0;
    const auto cols = prog.covering().row_cols(r);
    const auto vals = prog.covering().row_values(r);
    for (std::size_t e = 0; e < cols.size(); ++e) s += vals[e] * x[cols[e]];
    out.min_cover = std::min(out.min_cover, s / prog.demands()[r]);
  }
  return out;
}

std::vector<SparseEntry> row(std::initializer_list<SparseEntry> e) { return e; }

}  // namespace

TEST_CASE("build_transport_mpc shapes") {
  const PositiveProgram one = build_transport_mpc(make({1}, {1}, {{0}}));
  CHECK(one.n() == 1);
  CHECK(one.packing().rows() == 2);
  CHECK(one.covering().rows() == 2);

  const PositiveProgram p23 = build_transport_mpc(generate_instance(2, 3, CostModel::kUniform01, 1));
  CHECK(p23.n() == 6);
  CHECK(p23.rows() == 2 * (2 + 3));
  CHECK(p23.nonzeros() == 4 * 6);
  CHECK(p23.objective()->sense == Sense::kMin);

  const PositiveProgram zero = build_transport_mpc(make({0.5, 0.5}, {0, 1}, {{1, 2}, {3, 4}}));
  CHECK(zero.covering().rows() == 3);
  CHECK(zero.packing().rows() == 3);
  CHECK(zero.free_vars()[0] == 0);
  CHECK(zero.free_vars()[1] == 0);
  CHECK(zero.free_vars()[2] == 1);
  CHECK(zero.free_vars()[3] == 1);
}

TEST_CASE("columns with zero source mass keep their variables") {
  const PositiveProgram prog = build_transport_mpc(make({0, 1}, {0.5, 0.5}, {{1, 2}, {3, 4}}));
  for (char f : prog.free_vars()) CHECK(f == 1);
  CHECK(prog.objective()->coeffs[0] == 0.0);
}

TEST_CASE("iteration budget formula") {
  CHECK(mpc_iteration_budget(10, 0.1) == 64 * 231);
  CHECK(mpc_iteration_budget(1, 0.5) == 64 * 3);
}

TEST_CASE("solve_mpc on the swap instance reaches the zero optimum") {
  const Instance inst = make({0.5, 0.5}, {0.5, 0.5}, {{0, 1}, {1, 0}});
  const PositiveProgram prog = build_transport_mpc(inst);
  const MpcResult r = solve_mpc(prog, 0.1, ExecMode::kSequential);
  REQUIRE(r.status == MpcStatus::kFeasible);
  CHECK(r.solution.objective_value <= 1.1 * test::reference_ot(inst) + 1e-12);
  const Loads l = loads(prog, r.solution.x);
  CHECK(l.max_pack <= 1.1 + 1e-9);
  CHECK(l.min_cover >= 0.9 - 1e-9);
}

TEST_CASE("solve_mpc on a single cell") {
  const Instance inst = make({1}, {1}, {{5}});
  const PositiveProgram prog = build_transport_mpc(inst);
  const MpcResult r = solve_mpc(prog, 0.05, ExecMode::kSequential);
  REQUIRE(r.status == MpcStatus::kFeasible);
  CHECK(r.solution.x[0] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(r.solution.objective_value <= 1.05 * 5.0 + 1e-9);
  CHECK(r.solution.objective_value >= 0.95 * 5.0 - 1e-9);
}

TEST_CASE("solve_mpc certifies infeasibility") {
  PositiveProgram::Builder b(1);
  b.add_packing_row(row({{0, 1.0}}), 1.0);
  b.add_covering_row(row({{0, 1.0}}), 3.0);
  const PositiveProgram prog = std::move(b).build();
  const MpcResult r = solve_mpc(prog, 0.1, ExecMode::kSequential);
  CHECK(r.status == MpcStatus::kInfeasible);
  // y = z = 1 separates: the packing side caps x at 1, the covering side needs 3.
  REQUIRE(r.pack_dual.size() == 1);
  REQUIRE(r.cover_dual.size() == 1);
  CHECK(r.pack_dual[0] * 1.0 > r.cover_dual[0] * (1.0 / 3.0));
}

TEST_CASE("solve_mpc feasibility without objective") {
  PositiveProgram::Builder b(2);
  b.add_packing_row(row({{0, 1.0}, {1, 1.0}}), 2.0);
  b.add_covering_row(row({{0, 1.0}}), 0.5);
  b.add_covering_row(row({{1, 2.0}}), 1.0);
  b.add_covering_row(row({{1, 1.0}}), 0.0);  // dropped
  const PositiveProgram prog = std::move(b).build();
  CHECK(prog.covering().rows() == 2);
  const MpcResult r = solve_mpc(prog, 0.1, ExecMode::kDataParallel);
  REQUIRE(r.status == MpcStatus::kFeasible);
  const Loads l = loads(prog, r.solution.x);
  CHECK(l.max_pack <= 1.1 + 1e-9);
  CHECK(l.min_cover >= 0.9 - 1e-9);
}

TEST_CASE("solve_mpc maximization") {
  // max x0 + x1 with x0 + 2 x1 <= 4, 3 x0 + x1 <= 6, x0 + x1 >= 1: OPT 2.8 at (1.6, 1.2).
  PositiveProgram::Builder b(2);
  b.add_packing_row(row({{0, 1.0}, {1, 2.0}}), 4.0);
  b.add_packing_row(row({{0, 3.0}, {1, 1.0}}), 6.0);
  b.add_covering_row(row({{0, 1.0}, {1, 1.0}}), 1.0);
  b.set_objective({Sense::kMax, {1.0, 1.0}});
  const PositiveProgram prog = std::move(b).build();
  for (double eps : {0.1, 0.05}) {
    const MpcResult r = solve_mpc(prog, eps, ExecMode::kSequential);
    REQUIRE(r.status == MpcStatus::kFeasible);
    CHECK(r.solution.objective_value >= (1.0 - eps) * 2.8 - 1e-9);
    const Loads l = loads(prog, r.solution.x);
    CHECK(l.max_pack <= 1.0 + eps + 1e-9);
    CHECK(l.min_cover >= 1.0 - eps - 1e-9);
  }

  PositiveProgram::Builder u(2);
  u.add_packing_row(row({{0, 1.0}}), 1.0);
  u.add_covering_row(row({{0, 1.0}}), 0.5);
  u.set_objective({Sense::kMax, {0.0, 1.0}});
  CHECK_THROWS_AS(solve_mpc(std::move(u).build(), 0.1, ExecMode::kSequential), Error);
}

TEST_CASE("solve_mpc argument checks") {
  const PositiveProgram prog = build_transport_mpc(make({1}, {1}, {{1}}));
  for (double eps : {0.0, -0.1, 0.51}) {
    try {
      solve_mpc(prog, eps, ExecMode::kSequential);
      FAIL("expected EpsOutOfRange");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kEpsOutOfRange);
    }
  }
  PositiveProgram::Builder b(2);
  CHECK_THROWS(b.add_packing_row(row({{0, -1.0}}), 1.0));
  CHECK_THROWS(b.add_covering_row(row({{2, 1.0}}), 1.0));
  CHECK_THROWS(b.set_objective({Sense::kMin, {1.0}}));
}

TEST_CASE("solve_mpc contracts on random transport programs") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Instance inst = generate_instance(2 + seed % 5, 2 + (seed * 3) % 5,
                                            seed % 2 ? CostModel::kSparseZero : CostModel::kUniform01,
                                            seed);
    const double opt = test::reference_ot(inst);
    const PositiveProgram prog = build_transport_mpc(inst);
    for (double eps : {0.2, 0.1}) {
      const MpcResult r = solve_mpc(prog, eps, ExecMode::kSequential);
      REQUIRE(r.status == MpcStatus::kFeasible);
      const Loads l = loads(prog, r.solution.x);
      CHECK(l.max_pack <= 1.0 + eps + 1e-9);
      CHECK(l.min_cover >= 1.0 - eps - 1e-9);
      CHECK(r.solution.objective_value <= (1.0 + eps) * opt + 1e-9);
    }
  }
}

TEST_CASE("solve_mpc is deterministic and mode independent") {
  const PositiveProgram prog = build_transport_mpc(generate_instance(9, 7, CostModel::kUniform01, 4));
  const MpcResult a = solve_mpc(prog, 0.1, ExecMode::kSequential);
  const MpcResult b = solve_mpc(prog, 0.1, ExecMode::kSequential);
  const MpcResult c = solve_mpc(prog, 0.1, ExecMode::kDataParallel);
  REQUIRE(a.solution.x.size() == b.solution.x.size());
  CHECK(std::memcmp(a.solution.x.data(), b.solution.x.data(), a.solution.x.size() * 8) == 0);
  for (std::size_t j = 0; j < a.solution.x.size(); ++j) {
    CHECK(std::abs(a.solution.x[j] - c.solution.x[j]) <= 1e-12);
  }
  CHECK(a.solution.iterations == c.solution.iterations);
}

TEST_CASE("uniform_plan_from_solution") {
  const Instance inst = make({0.3, 0.7}, {0.6, 0.4}, {{0, 1}, {1, 0}});
  const Matrix opt = exact_ot(inst).plan;
  MpcSolution exact;
  exact.x.assign(opt.data().begin(), opt.data().end());
  const TransportPlan same = uniform_plan_from_solution(exact, 0.0, inst);
  CHECK(same.matrix() == opt);

  // Every marginal at (1 + eps) times its target: scaling brings it under.
  MpcSolution over = exact;
  for (double& v : over.x) v *= 1.1;
  const TransportPlan scaled = uniform_plan_from_solution(over, 0.1, inst);
  CHECK(satisfies_kind(scaled, inst));
  const Marginals m = marginals(scaled.matrix(), inst);
  for (std::size_t i = 0; i < 2; ++i) CHECK(m.row[i] <= inst.q()[i] + 1e-12);

  MpcSolution bad = exact;
  for (double& v : bad.x) v *= 1.5;
  try {
    uniform_plan_from_solution(bad, 0.1, inst);
    FAIL("expected NotRelativeApprox");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotRelativeApprox);
  }
}

TEST_CASE("uniform_plan_from_solution on a solver output") {
  const Instance inst = generate_instance(4, 4, CostModel::kUniform01, 8);
  const MpcResult r = solve_mpc(build_transport_mpc(inst), 0.1, ExecMode::kSequential);
  const TransportPlan u = uniform_plan_from_solution(r.solution, 0.1, inst);
  CHECK(u.kind() == PlanKind::kUniform);
  CHECK(u.eps() == doctest::Approx(0.19).epsilon(1e-12));
  CHECK(satisfies_kind(u, inst));
  CHECK(plan_cost(u, inst) <= 1.1 * test::reference_ot(inst) + 1e-9);
}

TEST_CASE("additive_approx_mpc") {
  SUBCASE("zero-diagonal costs") {
    const Instance inst = make({0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
    const auto [plan, report] = additive_approx_mpc(inst, 0.01, ExecMode::kSequential);
    CHECK(plan_cost(plan, inst) <= 0.01);
    CHECK(report.cost == plan_cost(plan, inst));
    CHECK(satisfies_kind(plan, inst));
  }
  SUBCASE("zero cost matrix takes the oblivious branch") {
    const Instance inst = make({0.4, 0.6}, {0.1, 0.9}, {{0, 0}, {0, 0}});
    const auto [plan, report] = additive_approx_mpc(inst, 0.1, ExecMode::kSequential);
    CHECK(plan.matrix() == test::mat({{0.1, 0.1}, {0.9, 0.9}}));
    CHECK(report.cost == 0.0);
    CHECK(report.iterations == 0);
  }
  SUBCASE("random 20x20") {
    const Instance inst = generate_instance(20, 20, CostModel::kUniform01, 20);
    const auto [plan, report] = additive_approx_mpc(inst, 0.05, ExecMode::kSequential);
    const PlanVerdict v = check_plan(plan, inst, 0.05);
    CHECK(v.pass);
    CHECK(report.eps == doctest::Approx(0.05 / (4 * avg_cost(inst))));
  }
  CHECK_THROWS_AS(additive_approx_mpc(make({1}, {1}, {{1}}), 0.0, ExecMode::kSequential), Error);
}
