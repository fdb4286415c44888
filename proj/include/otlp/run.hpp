#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "otlp/io.hpp"
#include "otlp/kernels.hpp"
#include "otlp/report.hpp"

namespace otlp {

enum class Pipeline { kMpc, kPacking, kOblivious, kExact };

const char* PipelineName(Pipeline pipeline);
Pipeline parse_pipeline(std::string_view name);

struct GeneratorSpec {
  std::size_t k = 1;
  std::size_t l = 1;
  CostModel model = CostModel::kUniform01;
};

// "k,l,model"
GeneratorSpec parse_generator(std::string_view spec);

inline constexpr std::size_t kOracleAutoLimit = 4096;

struct RunConfig {
  Pipeline pipeline = Pipeline::kMpc;
  double delta = 0.05;
  ExecMode mode = ExecMode::kSequential;
  std::uint64_t seed = 0;
  std::optional<std::string> input;
  std::optional<GeneratorSpec> generate;
  std::optional<std::string> output;  // plan JSON
  std::optional<std::string> report;  // CSV, appended
  bool oracle = true;                 // still skipped above kOracleAutoLimit entries
};

struct RunResult {
  SolveReport report;
  std::string plan;  // plan JSON
  bool pass = false;
};

// Loads or generates the instance, runs the pipeline, checks the plan
// (against the oracle when enabled) and writes plan and report if asked.
RunResult run(const RunConfig& config);

}  // namespace otlp
