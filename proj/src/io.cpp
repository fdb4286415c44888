#include "otlp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "otlp/error.hpp"

namespace otlp {

namespace {

using json = nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_array(std::string& out, std::span<const double> v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += num(v[i]);
  }
  out += ']';
}

void append_rows(std::string& out, const Matrix& m) {
  out += "[\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += "    ";
    append_array(out, m.row(i));
    out += i + 1 < m.rows() ? ",\n" : "\n";
  }
  out += "  ]";
}

[[noreturn]] void parse_fail(const std::string& source, const std::string& what) {
  throw Error(ErrorKind::kParseError, source + ": " + what);
}

std::vector<double> number_array(const json& doc, std::size_t expected,
                                 const std::string& source, const std::string& where) {
  if (!doc.is_array()) parse_fail(source, where + " must be an array");
  if (doc.size() != expected) {
    parse_fail(source, where + " has " + std::to_string(doc.size()) + " entries, expected " +
                           std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) {
      parse_fail(source, where + "[" + std::to_string(i) + "] is not a number");
    }
    out.push_back(doc[i].get<double>());
  }
  return out;
}

std::size_t dimension(const json& doc, const char* field, const std::string& source) {
  if (!doc.contains(field)) parse_fail(source, std::string("missing field \"") + field + "\"");
  const json& v = doc[field];
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    parse_fail(source, std::string("field \"") + field + "\" must be a positive integer");
  }
  return v.get<std::size_t>();
}

// Uniform double in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> dirichlet_one(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = -std::log1p(-unit(rng));
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(s > 0.0)) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(n));
    return v;
  }
  for (double& x : v) x /= s;
  return v;
}

}  // namespace

Instance parse_instance(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(source, e.what());
  }
  if (!doc.is_object()) parse_fail(source, "top level must be an object");
  const std::size_t k = dimension(doc, "k", source);
  const std::size_t l = dimension(doc, "l", source);
  for (const char* f : {"p", "q", "C"}) {
    if (!doc.contains(f)) parse_fail(source, std::string("missing field \"") + f + "\"");
  }
  std::vector<double> p = number_array(doc["p"], l, source, "p");
  std::vector<double> q = number_array(doc["q"], k, source, "q");
  const json& c = doc["C"];
  if (!c.is_array() || c.size() != k) parse_fail(source, "C must be an array of k rows");
  std::vector<double> cost;
  cost.reserve(k * l);
  for (std::size_t i = 0; i < k; ++i) {
    const std::vector<double> row =
        number_array(c[i], l, source, "C[" + std::to_string(i) + "]");
    cost.insert(cost.end(), row.begin(), row.end());
  }
  return validate_instance(std::move(p), std::move(q), Matrix(k, l, std::move(cost)));
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), path);
}

std::string instance_json(const Instance& inst) {
  std::string out = "{\n  \"k\": " + std::to_string(inst.k()) +
                    ",\n  \"l\": " + std::to_string(inst.l()) + ",\n  \"p\": ";
  append_array(out, inst.p());
  out += ",\n  \"q\": ";
  append_array(out, inst.q());
  out += ",\n  \"C\": ";
  append_rows(out, inst.cost());
  out += "\n}\n";
  return out;
}

void save_instance(const Instance& inst, const std::string& path) {
  write_text(path, instance_json(inst));
}

std::string plan_json(const TransportPlan& plan, const Instance& inst) {
  std::string out = "{\n  \"kind\": \"";
  out += PlanKindName(plan.kind());
  out += "\",\n  \"cost\": " + num(plan_cost(plan, inst)) + ",\n  \"X\": ";
  append_rows(out, plan.matrix());
  out += "\n}\n";
  return out;
}

const char* CostModelName(CostModel model) {
  switch (model) {
    case CostModel::kUniform01: return "uniform01";
    case CostModel::kEuclideanGrid: return "euclidean_grid";
    case CostModel::kSparseZero: return "sparse_zero";
  }
  return "?";
}

CostModel parse_cost_model(std::string_view name) {
  for (CostModel m : {CostModel::kUniform01, CostModel::kEuclideanGrid, CostModel::kSparseZero}) {
    if (name == CostModelName(m)) return m;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown cost model " + std::string(name));
}

Instance generate_instance(std::size_t k, std::size_t l, CostModel model, std::uint64_t seed) {
  if (k < 1 || l < 1) throw Error(ErrorKind::kInvalidArgument, "k and l must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> p = dirichlet_one(l, rng);
  std::vector<double> q = dirichlet_one(k, rng);
  Matrix c(k, l, 0.0);
  if (model == CostModel::kEuclideanGrid) {
    const auto w = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max(k, l)))));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < l; ++j) {
        const double dx = static_cast<double>(i % w) - static_cast<double>(j % w);
        const double dy = static_cast<double>(i / w) - static_cast<double>(j / w);
        c(i, j) = std::hypot(dx, dy);
      }
    }
  } else {
    for (double& v : c.data()) v = unit(rng);
    if (model == CostModel::kSparseZero) {
      std::vector<std::size_t> idx(k * l);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      const auto zeros = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(k * l)));
      for (std::size_t t = 0; t < zeros; ++t) c.data()[idx[t]] = 0.0;
    }
  }
  return validate_instance(std::move(p), std::move(q), std::move(c));
}

std::string report_csv_row(const SolveReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  std::string out = r.pipeline;
  out += ',' + std::to_string(r.k) + ',' + std::to_string(r.l) + ',' + num(r.delta) + ',' +
         num(r.eps) + ',' + std::to_string(r.iterations) + ',' + std::to_string(r.probes) + ',' +
         num(r.cost) + ',' + opt(r.oracle) + ',' + opt(r.gap) + ',' + num(r.resid_row) + ',' +
         num(r.resid_col) + ',';
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", r.ms);
  out += ms;
  out += ',' + std::to_string(r.seed);
  return out;
}

void append_report(const std::string& path, const SolveReport& report) {
  bool fresh = true;
  {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    fresh = !in || in.tellg() == 0;
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
  if (fresh) out << kReportHeader << '\n';
  out << report_csv_row(report) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
  out << text;
}

}  // namespace otlp
