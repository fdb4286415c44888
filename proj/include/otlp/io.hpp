#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "otlp/core.hpp"
#include "otlp/report.hpp"

namespace otlp {

// {"k": int, "l": int, "p": [l], "q": [k], "C": [[l] x k]}
Instance parse_instance(std::string_view text, const std::string& source = "<string>");
Instance load_instance(const std::string& path);

// Decimals carry 17 significant digits, so a reload is bit-exact.
std::string instance_json(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

// {"kind": "exact", "cost": c, "X": [[l] x k]}
std::string plan_json(const TransportPlan& plan, const Instance& inst);

enum class CostModel { kUniform01, kEuclideanGrid, kSparseZero };

const char* CostModelName(CostModel model);
CostModel parse_cost_model(std::string_view name);

// p, q ~ Dirichlet(1); costs per model. Same arguments, same instance.
Instance generate_instance(std::size_t k, std::size_t l, CostModel model, std::uint64_t seed);

inline constexpr const char* kReportHeader =
    "pipeline,k,l,delta,eps,iterations,probes,cost,oracle,gap,resid_row,resid_col,ms,seed";

std::string report_csv_row(const SolveReport& report);

// Appends one row, writing the header first when the file is new or empty.
void append_report(const std::string& path, const SolveReport& report);

void write_text(const std::string& path, const std::string& text);

}  // namespace otlp
