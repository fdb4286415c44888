#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace otlp {

// One run of a pipeline; one CSV row of the CLI report.
struct SolveReport {
  std::string pipeline;
  std::size_t k = 0;
  std::size_t l = 0;
  double delta = 0.0;
  double eps = 0.0;
  std::int64_t iterations = 0;
  std::int64_t probes = 0;
  double cost = 0.0;
  std::optional<double> oracle;
  std::optional<double> gap;
  double resid_row = 0.0;
  double resid_col = 0.0;
  double ms = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace otlp
