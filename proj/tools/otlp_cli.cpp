#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otlp/error.hpp"
#include "otlp/run.hpp"

namespace {

enum Exit { kPass = 0, kInvariant = 2, kInput = 3, kBudget = 4 };

int exit_code(const otlp::Error& e) {
  switch (e.kind()) {
    case otlp::ErrorKind::kIterationBudgetExceeded:
      return kBudget;
    case otlp::ErrorKind::kNegativeEntry:
    case otlp::ErrorKind::kNotADistribution:
    case otlp::ErrorKind::kDimensionMismatch:
    case otlp::ErrorKind::kNonFinite:
    case otlp::ErrorKind::kParseError:
    case otlp::ErrorKind::kInvalidArgument:
    case otlp::ErrorKind::kTooLarge:
      return kInput;
    default:
      return kInvariant;
  }
}

// plan.json -> plan-<seed>.json
std::string batch_path(const std::string& path, std::uint64_t seed) {
  const std::size_t dot = path.rfind('.');
  const std::size_t slash = path.rfind('/');
  const std::string tag = "-" + std::to_string(seed);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additive-error optimal transport through positive LP solvers"};
  std::string pipeline = "mpc";
  std::string mode = "sequential";
  std::string generate;
  std::string input;
  std::string output;
  std::string report;
  bool no_oracle = false;
  int batch = 1;
  otlp::RunConfig cfg;

  app.add_option("--pipeline", pipeline, "mpc, packing, oblivious or exact")
      ->check(CLI::IsMember({"mpc", "packing", "oblivious", "exact"}));
  app.add_option("--delta", cfg.delta, "additive error target")->check(CLI::PositiveNumber);
  app.add_option("--mode", mode, "sequential or data_parallel")
      ->check(CLI::IsMember({"sequential", "data_parallel"}));
  app.add_option("--seed", cfg.seed, "generator and solver seed");
  auto* in_opt = app.add_option("--input", input, "instance JSON");
  auto* gen_opt = app.add_option("--generate", generate, "k,l,model with model one of "
                                                         "uniform01, euclidean_grid, sparse_zero");
  in_opt->excludes(gen_opt);
  app.add_option("--output", output, "plan JSON path");
  app.add_option("--report", report, "CSV report to append to (default: stdout)");
  app.add_flag("--no-oracle", no_oracle, "skip the exact comparison");
  app.add_option("--batch", batch, "run n generated instances with seeds seed..seed+n-1")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInput;
  }

  std::vector<otlp::RunConfig> configs;
  try {
    cfg.pipeline = otlp::parse_pipeline(pipeline);
    cfg.mode = mode == "data_parallel" ? otlp::ExecMode::kDataParallel : otlp::ExecMode::kSequential;
    cfg.oracle = !no_oracle;
    if (!input.empty()) cfg.input = input;
    if (!generate.empty()) cfg.generate = otlp::parse_generator(generate);
    if (!cfg.input && !cfg.generate) {
      std::cerr << "one of --input or --generate is required\n";
      return kInput;
    }
    if (batch > 1 && !cfg.generate) {
      std::cerr << "--batch needs --generate\n";
      return kInput;
    }
    for (int b = 0; b < batch; ++b) {
      otlp::RunConfig c = cfg;
      c.seed = cfg.seed + static_cast<std::uint64_t>(b);
      if (!output.empty()) c.output = batch > 1 ? batch_path(output, c.seed) : output;
      configs.push_back(c);
    }
  } catch (const otlp::Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e);
  }

  // Instances are independent; reports are emitted afterwards in seed order.
  std::vector<otlp::RunResult> results(configs.size());
  std::vector<int> codes(configs.size(), kPass);
  std::vector<std::string> errors(configs.size());
#pragma omp parallel for schedule(dynamic) if (configs.size() > 1)
  for (std::size_t b = 0; b < configs.size(); ++b) {
    try {
      results[b] = otlp::run(configs[b]);
      if (!results[b].pass) codes[b] = kInvariant;
    } catch (const otlp::Error& e) {
      errors[b] = e.what();
      codes[b] = exit_code(e);
    }
  }

  int rc = kPass;
  bool header = false;
  for (std::size_t b = 0; b < configs.size(); ++b) {
    if (!errors[b].empty()) {
      std::cerr << "seed " << configs[b].seed << ": " << errors[b] << '\n';
    } else if (!report.empty()) {
      otlp::append_report(report, results[b].report);
    } else {
      if (!header) std::cout << otlp::kReportHeader << '\n';
      header = true;
      std::cout << otlp::report_csv_row(results[b].report) << '\n';
    }
    rc = std::max(rc, codes[b]);
  }
  return rc;
}
