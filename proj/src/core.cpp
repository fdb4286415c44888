#include "otlp/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "otlp/error.hpp"

namespace otlp {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNegativeEntry: return "NegativeEntry";
    case ErrorKind::kNotADistribution: return "NotADistribution";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kNotUniform: return "NotUniform";
    case ErrorKind::kNotSubFeasible: return "NotSubFeasible";
    case ErrorKind::kNotRelativeApprox: return "NotRelativeApprox";
    case ErrorKind::kEpsOutOfRange: return "EpsOutOfRange";
    case ErrorKind::kIterationBudgetExceeded: return "IterationBudgetExceeded";
    case ErrorKind::kUnbounded: return "Unbounded";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kNumericallyDegenerate: return "NumericallyDegenerate";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::kDimensionMismatch, "matrix data does not match " +
                                                   std::to_string(rows) + "x" +
                                                   std::to_string(cols));
  }
}

namespace {

void check_entries(std::span<const double> values, const char* name) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::kNonFinite, std::string(name) + "[" + std::to_string(i) + "]");
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) {
      throw Error(ErrorKind::kNegativeEntry, std::string(name) + "[" + std::to_string(i) +
                                                 "] = " + std::to_string(values[i]));
    }
  }
}

double sequential_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Returns the raw sum; rescales v in place when it is off by more than the
// identity tolerance but still within the renormalization window.
double normalize_distribution(std::vector<double>& v, const char* name) {
  const double sum = sequential_sum(v);
  const double dev = std::abs(sum - 1.0);
  if (dev > kRenormalizeTol) {
    throw Error(ErrorKind::kNotADistribution,
                std::string(name) + " sums to " + std::to_string(sum));
  }
  if (dev <= kIdentityTol) return 1.0;
  for (double& x : v) x /= sum;
  return sum;
}

}  // namespace

Instance validate_instance(std::vector<double> p, std::vector<double> q, Matrix cost) {
  if (p.empty() || q.empty()) {
    throw Error(ErrorKind::kDimensionMismatch, "p and q must be nonempty");
  }
  if (cost.rows() != q.size() || cost.cols() != p.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "C is " + std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()) +
                    ", expected " + std::to_string(q.size()) + "x" + std::to_string(p.size()));
  }
  check_entries(p, "p");
  check_entries(q, "q");
  check_entries(cost.data(), "C");

  Instance inst;
  inst.raw_p_sum_ = normalize_distribution(p, "p");
  inst.raw_q_sum_ = normalize_distribution(q, "q");
  inst.p_ = std::move(p);
  inst.q_ = std::move(q);
  inst.cost_ = std::move(cost);
  return inst;
}

const char* PlanKindName(PlanKind kind) {
  switch (kind) {
    case PlanKind::kExact: return "exact";
    case PlanKind::kUniform: return "uniform";
    case PlanKind::kMass: return "mass";
  }
  return "unknown";
}

TransportPlan::TransportPlan(Matrix x, PlanKind kind, double eps)
    : x_(std::move(x)), kind_(kind), eps_(eps) {
  for (double v : x_.data()) {
    if (!(v >= 0.0)) throw Error(ErrorKind::kNegativeEntry, "transport plan entry");
  }
}

namespace {

void check_dims(const Matrix& x, const Instance& inst) {
  if (x.rows() != inst.k() || x.cols() != inst.l()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "plan is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                    ", instance is " + std::to_string(inst.k()) + "x" + std::to_string(inst.l()));
  }
}

}  // namespace

Marginals marginals(const Matrix& x, const Instance& inst) {
  check_dims(x, inst);
  const auto p = inst.p();
  Marginals m{std::vector<double>(x.rows(), 0.0), std::vector<double>(x.cols(), 0.0)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      acc += row[j] * p[j];
      m.col[j] += row[j];
    }
    m.row[i] = acc;
  }
  return m;
}

double plan_cost(const Matrix& x, const Instance& inst) {
  check_dims(x, inst);
  const auto p = inst.p();
  const Matrix& c = inst.cost();
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) acc += c(i, j) * x(i, j) * p[j];
    total += acc;
  }
  return total;
}

double avg_cost(const Instance& inst) {
  const auto p = inst.p();
  const auto q = inst.q();
  const Matrix& c = inst.cost();
  double total = 0.0;
  for (std::size_t i = 0; i < inst.k(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < inst.l(); ++j) acc += c(i, j) * p[j];
    total += q[i] * acc;
  }
  return total;
}

double max_cost(const Instance& inst) {
  const auto data = inst.cost().data();
  return *std::max_element(data.begin(), data.end());
}

MarginalResiduals marginal_residuals(const Matrix& x, const Instance& inst) {
  const Marginals m = marginals(x, inst);
  MarginalResiduals r;
  for (std::size_t i = 0; i < m.row.size(); ++i) {
    r.row = std::max(r.row, std::abs(m.row[i] - inst.q()[i]));
  }
  for (double c : m.col) r.col = std::max(r.col, std::abs(c - 1.0));
  return r;
}

bool satisfies_kind(const TransportPlan& plan, const Instance& inst, double tol) {
  const Marginals m = marginals(plan.matrix(), inst);
  const auto q = inst.q();
  const double e = plan.eps();
  for (double v : plan.matrix().data()) {
    if (v < 0.0) return false;
  }
  switch (plan.kind()) {
    case PlanKind::kExact: {
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (std::abs(m.row[i] - q[i]) > tol) return false;
      }
      for (double c : m.col) {
        if (std::abs(c - 1.0) > tol) return false;
      }
      return true;
    }
    case PlanKind::kUniform: {
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (m.row[i] > q[i] + tol || m.row[i] < (1.0 - e) * q[i] - tol) return false;
      }
      for (double c : m.col) {
        if (c > 1.0 + tol || c < (1.0 - e) - tol) return false;
      }
      return true;
    }
    case PlanKind::kMass: {
      double moved = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (m.row[i] > q[i] + tol) return false;
        moved += m.row[i];
      }
      for (double c : m.col) {
        if (c > 1.0 + tol) return false;
      }
      return moved >= 1.0 - e - tol;
    }
  }
  return false;
}

Residual residual(const Matrix& x, const Instance& inst) {
  const Marginals m = marginals(x, inst);
  const auto p = inst.p();
  const auto q = inst.q();
  Residual r;
  r.p_resid.resize(inst.l());
  r.q_resid.resize(inst.k());
  for (std::size_t j = 0; j < inst.l(); ++j) {
    r.p_resid[j] = std::max(0.0, 1.0 - m.col[j]) * p[j];
  }
  for (std::size_t i = 0; i < inst.k(); ++i) {
    r.q_resid[i] = std::max(0.0, q[i] - m.row[i]);
    r.alpha += r.q_resid[i];
  }
  return r;
}

}  // namespace otlp
