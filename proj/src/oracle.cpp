#include "otlp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "otlp/error.hpp"

namespace otlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Remaining supply or demand below this counts as exhausted.
constexpr double kMassEps = 1e-15;
constexpr double kCompareEps = 1e-12;

// Dense successive shortest paths. Node numbering: sources 0..l-1, sinks
// l..l+k-1. Forward arcs j -> i are uncapacitated, reverse arcs i -> j carry
// the current flow.
class Ssp {
 public:
  explicit Ssp(const Instance& inst)
      : inst_(inst),
        k_(inst.k()),
        l_(inst.l()),
        flow_(inst.k(), inst.l(), 0.0),
        supply_(inst.p().begin(), inst.p().end()),
        demand_(inst.q().begin(), inst.q().end()),
        pot_(inst.k() + inst.l(), 0.0) {
    if (k_ * l_ > kOracleMaxEntries) {
      throw Error(ErrorKind::kTooLarge,
                  std::to_string(k_) + "x" + std::to_string(l_) + " exceeds the oracle guard");
    }
  }

  // Sends one augmenting path; returns false when no more mass can move.
  // path_cost receives the true cost per unit of the path.
  bool augment(double& amount, double& path_cost) {
    const std::size_t nodes = k_ + l_;
    std::vector<double> dist(nodes, kInf);
    std::vector<std::int64_t> prev(nodes, -1);
    std::vector<char> done(nodes, 0);
    bool any_source = false;
    for (std::size_t j = 0; j < l_; ++j) {
      if (supply_[j] > kMassEps) {
        dist[j] = 0.0;
        any_source = true;
      }
    }
    if (!any_source) return false;

    std::int64_t sink = -1;
    while (true) {
      std::int64_t u = -1;
      for (std::size_t v = 0; v < nodes; ++v) {
        if (!done[v] && dist[v] < kInf && (u < 0 || dist[v] < dist[u] - kCompareEps)) {
          u = static_cast<std::int64_t>(v);
        }
      }
      if (u < 0) break;
      done[u] = 1;
      if (static_cast<std::size_t>(u) >= l_) {
        const std::size_t i = u - l_;
        if (demand_[i] > kMassEps) {
          sink = u;
          break;
        }
        for (std::size_t j = 0; j < l_; ++j) {
          if (flow_(i, j) <= 0.0 || done[j]) continue;
          const double reduced = std::max(0.0, -inst_.cost()(i, j) + pot_[u] - pot_[j]);
          if (dist[u] + reduced < dist[j] - kCompareEps) {
            dist[j] = dist[u] + reduced;
            prev[j] = u;
          }
        }
      } else {
        const std::size_t j = u;
        for (std::size_t i = 0; i < k_; ++i) {
          const std::size_t v = l_ + i;
          if (done[v]) continue;
          const double reduced = std::max(0.0, inst_.cost()(i, j) + pot_[j] - pot_[v]);
          if (dist[u] + reduced < dist[v] - kCompareEps) {
            dist[v] = dist[u] + reduced;
            prev[v] = u;
          }
        }
      }
    }
    if (sink < 0) return false;

    const double d_sink = dist[sink];
    for (std::size_t v = 0; v < nodes; ++v) pot_[v] += std::min(dist[v], d_sink);

    amount = demand_[sink - l_];
    path_cost = 0.0;
    std::int64_t v = sink;
    while (prev[v] >= 0) {
      const std::int64_t u = prev[v];
      if (static_cast<std::size_t>(u) >= l_) amount = std::min(amount, flow_(u - l_, v));
      v = u;
    }
    amount = std::min(amount, supply_[v]);

    v = sink;
    while (prev[v] >= 0) {
      const std::int64_t u = prev[v];
      if (static_cast<std::size_t>(u) < l_) {
        flow_(v - l_, u) += amount;
        path_cost += inst_.cost()(v - l_, u);
      } else {
        double& f = flow_(u - l_, v);
        f -= amount;
        if (f < kMassEps * 1e-3) f = 0.0;
        path_cost -= inst_.cost()(u - l_, v);
      }
      v = u;
    }
    supply_[v] -= amount;
    demand_[sink - l_] -= amount;
    ++iterations_;
    return true;
  }

  const Matrix& flow() const { return flow_; }
  std::int64_t iterations() const { return iterations_; }

  // Primal flow cost minus the dual value of the final potentials.
  double duality_gap() const {
    const auto p = inst_.p();
    const auto q = inst_.q();
    double primal = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = 0; j < l_; ++j) primal += inst_.cost()(i, j) * flow_(i, j);
    }
    // v_j = -pot_j, u_i = min_j (C_ij + pot_j) is dual feasible.
    double dual = 0.0;
    for (std::size_t j = 0; j < l_; ++j) dual -= p[j] * pot_[j];
    for (std::size_t i = 0; i < k_; ++i) {
      double u = kInf;
      for (std::size_t j = 0; j < l_; ++j) u = std::min(u, inst_.cost()(i, j) + pot_[j]);
      dual += q[i] * u;
    }
    return primal - dual;
  }

 private:
  const Instance& inst_;
  std::size_t k_;
  std::size_t l_;
  Matrix flow_;
  std::vector<double> supply_;
  std::vector<double> demand_;
  std::vector<double> pot_;
  std::int64_t iterations_ = 0;
};

}  // namespace

ExactResult exact_ot(const Instance& inst) {
  Ssp ssp(inst);
  double amount = 0.0;
  double path_cost = 0.0;
  while (ssp.augment(amount, path_cost)) {
  }
  const std::size_t k = inst.k();
  const std::size_t l = inst.l();
  const auto q = inst.q();

  ExactResult res;
  res.plan = Matrix(k, l, 0.0);
  for (std::size_t j = 0; j < l; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < k; ++i) col += ssp.flow()(i, j);
    for (std::size_t i = 0; i < k; ++i) {
      res.plan(i, j) = col > 0.0 ? ssp.flow()(i, j) / col : q[i];
    }
  }
  res.iterations = ssp.iterations();
  res.dual_gap = ssp.duality_gap();
  const double scale = std::max(1.0, max_cost(inst));
  if (!(std::abs(res.dual_gap) <= 1e-10 * scale)) {
    throw Error(ErrorKind::kNumericallyDegenerate,
                "duality gap " + std::to_string(res.dual_gap) + " after SSP");
  }
  res.cost = plan_cost(res.plan, inst);
  return res;
}

double max_mass_within_budget(const Instance& inst, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda must be >= 0");
  Ssp ssp(inst);
  double mass = 0.0;
  double spent = 0.0;
  double amount = 0.0;
  double path_cost = 0.0;
  // Path costs are nondecreasing, so the min-cost curve is convex and the
  // budget is exhausted part way through the first path it cannot pay for.
  while (ssp.augment(amount, path_cost)) {
    const double unit = std::max(path_cost, 0.0);
    if (spent + unit * amount <= lambda) {
      spent += unit * amount;
      mass += amount;
      continue;
    }
    mass += (lambda - spent) / unit;
    break;
  }
  return std::min(mass, 1.0);
}

PlanVerdict check_plan(const TransportPlan& plan, const Instance& inst, double delta,
                       double oracle_cost) {
  PlanVerdict v;
  const MarginalResiduals r = marginal_residuals(plan.matrix(), inst);
  v.resid_row = r.row;
  v.resid_col = r.col;
  v.cost = plan_cost(plan, inst);
  v.oracle = oracle_cost;
  v.gap = v.cost - oracle_cost;
  v.pass = v.resid_row <= kPlanTol && v.resid_col <= kPlanTol && v.gap <= delta + kPlanTol;
  return v;
}

PlanVerdict check_plan(const TransportPlan& plan, const Instance& inst, double delta) {
  return check_plan(plan, inst, delta, exact_ot(inst).cost);
}

}  // namespace otlp
