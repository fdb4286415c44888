#include "otlp/run.hpp"

#include <charconv>
#include <chrono>
#include <string>
#include <tuple>

#include "otlp/error.hpp"
#include "otlp/mpc.hpp"
#include "otlp/oblivious.hpp"
#include "otlp/oracle.hpp"
#include "otlp/packing.hpp"

namespace otlp {

const char* PipelineName(Pipeline pipeline) {
  switch (pipeline) {
    case Pipeline::kMpc: return "mpc";
    case Pipeline::kPacking: return "packing";
    case Pipeline::kOblivious: return "oblivious";
    case Pipeline::kExact: return "exact";
  }
  return "?";
}

Pipeline parse_pipeline(std::string_view name) {
  for (Pipeline p : {Pipeline::kMpc, Pipeline::kPacking, Pipeline::kOblivious, Pipeline::kExact}) {
    if (name == PipelineName(p)) return p;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown pipeline " + std::string(name));
}

GeneratorSpec parse_generator(std::string_view spec) {
  auto bad = [&]() -> Error {
    return Error(ErrorKind::kInvalidArgument,
                 "generator spec must be k,l,model, got " + std::string(spec));
  };
  const std::size_t a = spec.find(',');
  const std::size_t b = a == std::string_view::npos ? a : spec.find(',', a + 1);
  if (b == std::string_view::npos) throw bad();
  GeneratorSpec g;
  auto dim = [&](std::string_view s, std::size_t& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || out < 1) throw bad();
  };
  dim(spec.substr(0, a), g.k);
  dim(spec.substr(a + 1, b - a - 1), g.l);
  g.model = parse_cost_model(spec.substr(b + 1));
  return g;
}

RunResult run(const RunConfig& config) {
  if (config.input.has_value() == config.generate.has_value()) {
    throw Error(ErrorKind::kInvalidArgument, "exactly one of input and generator is required");
  }
  const bool approximate =
      config.pipeline == Pipeline::kMpc || config.pipeline == Pipeline::kPacking;
  if (approximate && !(config.delta > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "delta must be positive");
  }
  const Instance inst = config.input ? load_instance(*config.input)
                                     : generate_instance(config.generate->k, config.generate->l,
                                                         config.generate->model, config.seed);

  const auto start = std::chrono::steady_clock::now();
  std::optional<ExactResult> exact;
  TransportPlan plan;
  SolveReport report;
  switch (config.pipeline) {
    case Pipeline::kMpc:
      std::tie(plan, report) = additive_approx_mpc(inst, config.delta, config.mode);
      break;
    case Pipeline::kPacking:
      std::tie(plan, report) = additive_approx_packing(inst, config.delta, config.mode, config.seed);
      break;
    case Pipeline::kOblivious:
      plan = oblivious_plan(inst.q(), inst.l());
      break;
    case Pipeline::kExact:
      exact = exact_ot(inst);
      plan = TransportPlan(exact->plan, PlanKind::kExact);
      report.iterations = exact->iterations;
      break;
  }
  report.pipeline = PipelineName(config.pipeline);
  report.k = inst.k();
  report.l = inst.l();
  report.delta = config.delta;
  report.seed = config.seed;
  report.cost = plan_cost(plan, inst);
  const MarginalResiduals resid = marginal_residuals(plan.matrix(), inst);
  report.resid_row = resid.row;
  report.resid_col = resid.col;
  report.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();

  RunResult out;
  out.pass = resid.row <= kPlanTol && resid.col <= kPlanTol;
  if (config.oracle && inst.k() * inst.l() <= kOracleAutoLimit) {
    const double opt = exact ? exact->cost : exact_ot(inst).cost;
    report.oracle = opt;
    report.gap = report.cost - opt;
    // The oblivious plan promises only avg_cost, not OT + delta.
    const double allowed = config.pipeline == Pipeline::kOblivious ? avg_cost(inst) - opt
                           : approximate                           ? config.delta
                                                                   : 0.0;
    out.pass = out.pass && *report.gap <= allowed + kPlanTol;
  }
  out.report = report;
  out.plan = plan_json(plan, inst);
  if (config.output) write_text(*config.output, out.plan);
  if (config.report) append_report(*config.report, report);
  return out;
}

}  // namespace otlp
