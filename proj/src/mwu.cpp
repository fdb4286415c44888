#include "otlp/mwu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "otlp/error.hpp"

namespace otlp::mwu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_of(std::span<const double> v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  return m;
}

// Largest |coefficient| per column, read from the transpose.
std::vector<double> column_max(const SparseMatrix& transposed) {
  std::vector<double> out(transposed.rows(), 0.0);
  for (std::size_t j = 0; j < transposed.rows(); ++j) {
    for (double v : transposed.row_values(j)) out[j] = std::max(out[j], v);
  }
  return out;
}

[[noreturn]] void budget_exceeded(std::int64_t budget) {
  throw Error(ErrorKind::kIterationBudgetExceeded,
              "no certificate after " + std::to_string(budget) + " rounds");
}

double potential_ratio(double e) { return (1.0 + e) * -std::log1p(-e) / std::log1p(e); }

}  // namespace

double mixed_weight_eps(double target_ratio) {
  const double goal = 1.0 + 0.5 * (target_ratio - 1.0);
  double lo = 0.0;
  double hi = 0.5;
  if (potential_ratio(hi) <= goal) return hi;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (potential_ratio(mid) <= goal ? lo : hi) = mid;
  }
  return lo;
}

FeasibilityResult solve_mixed(const MixedSystem& sys, double target_ratio, ExecMode mode,
                              std::int64_t iteration_budget) {
  if (!(target_ratio > 1.0)) {
    throw Error(ErrorKind::kEpsOutOfRange, "target ratio must exceed 1");
  }
  const std::size_t n = sys.n;
  const std::size_t mp = sys.pack.rows();
  const std::size_t mc = sys.cover.rows();
  const SparseMatrix pack_t = sys.pack.transpose();
  const SparseMatrix cover_t = sys.cover.transpose();

  FeasibilityResult out;
  out.x.assign(n, 0.0);
  if (mc == 0) {
    out.feasible = true;
    return out;
  }

  // A covering row none of whose variables may move is unsatisfiable.
  for (std::size_t r = 0; r < mc; ++r) {
    const auto cols = sys.cover.row_cols(r);
    const auto vals = sys.cover.row_values(r);
    bool reachable = false;
    for (std::size_t e = 0; e < cols.size() && !reachable; ++e) {
      reachable = sys.free_var[cols[e]] && vals[e] > 0.0;
    }
    if (!reachable) {
      out.pack_dual.assign(mp, 0.0);
      out.cover_dual.assign(mc, 0.0);
      out.cover_dual[r] = 1.0;
      return out;
    }
  }

  const double e = mixed_weight_eps(target_ratio);
  const double lp = std::log1p(e);
  const double lm = -std::log1p(-e);

  // Start every useful variable small enough that each packing load is <= 1.
  const std::vector<double> pack_col = column_max(pack_t);
  const std::vector<double> cover_col = column_max(cover_t);
  std::vector<char> live(n, 0);
  std::size_t live_count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    live[j] = sys.free_var[j] && cover_col[j] > 0.0;
    live_count += live[j];
  }
  std::vector<double>& x = out.x;
  for (std::size_t j = 0; j < n; ++j) {
    if (!live[j]) continue;
    const double scale = pack_col[j] > 0.0 ? pack_col[j] : cover_col[j];
    x[j] = 1.0 / (static_cast<double>(live_count) * scale);
  }

  std::vector<double> pl(mp), cl(mc);
  kernels::multiply(mode, sys.pack, x, pl);
  kernels::multiply(mode, sys.cover, x, cl);

  std::vector<double> y(mp), z(mc), gp(n), gc(n), dx(n), incp(mp), incc(mc);
  double ln_phi0 = 0.0;
  if (mp > 0) {
    kernels::exp_shifted(mode, pl, lp, 0.0, y);
    ln_phi0 = std::log(kernels::sum(mode, y));
  }
  // Potential bound: once every covering row passes this threshold,
  // max(Px) <= target * min(Cx) unless a certificate appeared first.
  double threshold = (ln_phi0 + (1.0 + e) * (std::log(static_cast<double>(mc)) + lm)) /
                     (lp * target_ratio - (1.0 + e) * lm);
  threshold = std::max(threshold, 1.0);

  std::vector<char> active(mc), fav(n);
  for (std::size_t r = 0; r < mc; ++r) active[r] = cl[r] < threshold;

  auto keep_duals = [&](std::span<const double> yw, double y_sum, std::span<const double> zw,
                        double z_sum) {
    out.pack_dual.assign(mp, 0.0);
    out.cover_dual.assign(mc, 0.0);
    for (std::size_t r = 0; r < mp; ++r) out.pack_dual[r] = yw[r] / y_sum;
    for (std::size_t r = 0; r < mc; ++r) out.cover_dual[r] = zw[r] / z_sum;
  };

  auto certified = [&](double max_p, double min_c) {
    return min_c > 0.0 && max_p <= target_ratio * min_c;
  };

  for (std::int64_t iter = 0;; ++iter) {
    double max_p = mp > 0 ? max_of(pl) : 0.0;
    double min_c = kInf;
    for (double v : cl) min_c = std::min(min_c, v);
    if (certified(max_p, min_c)) {
      // Confirm against loads recomputed from x; incremental loads drift.
      kernels::multiply(mode, sys.pack, x, pl);
      kernels::multiply(mode, sys.cover, x, cl);
      max_p = mp > 0 ? max_of(pl) : 0.0;
      min_c = kInf;
      for (double v : cl) min_c = std::min(min_c, v);
      if (certified(max_p, min_c)) {
        if (mp > 0) {
          kernels::exp_shifted(mode, pl, lp, max_p, y);
        }
        kernels::exp_shifted(mode, cl, -lm, min_c, z);
        keep_duals(y, mp > 0 ? kernels::sum(mode, y) : 0.0, z, kernels::sum(mode, z));
        for (double& v : x) v /= min_c;
        out.feasible = true;
        out.ratio = max_p / min_c;
        out.iterations = iter;
        return out;
      }
    }
    if (iter >= iteration_budget) budget_exceeded(iteration_budget);

    double min_active = kInf;
    for (std::size_t r = 0; r < mc; ++r) {
      if (active[r]) min_active = std::min(min_active, cl[r]);
    }
    if (min_active == kInf) {
      // Rounding pushed every row past the threshold without certifying;
      // a larger threshold only tightens the potential bound.
      threshold *= 2.0;
      for (std::size_t r = 0; r < mc; ++r) active[r] = cl[r] < threshold;
      continue;
    }

    double y_sum = 0.0;
    if (mp > 0) {
      kernels::exp_shifted(mode, pl, lp, max_p, y);
      y_sum = kernels::sum(mode, y);
    }
    kernels::exp_shifted(mode, cl, -lm, min_active, z);
    kernels::select(mode, z, active, z);
    const double z_sum = kernels::sum(mode, z);

    kernels::multiply(mode, pack_t, y, gp);
    kernels::multiply(mode, cover_t, z, gc);
    const double slack = 1.0 + e;
    kernels::for_each_index(mode, n, [&](std::size_t j) {
      fav[j] = live[j] && gc[j] > 0.0 && gp[j] * z_sum <= slack * gc[j] * y_sum;
    });
    // Weak duality: if (P^t y)_j Z > (C^t z)_j Y for every variable that
    // covers anything, y^t P x <= Y and z^t C x >= Z cannot both hold.
    bool separating = true;
    for (std::size_t j = 0; j < n && separating; ++j) {
      separating = !(live[j] && gc[j] > 0.0 && gp[j] * z_sum <= gc[j] * y_sum);
    }
    if (separating) {
      keep_duals(y, y_sum, z, z_sum);
      out.iterations = iter;
      return out;
    }

    kernels::select(mode, x, fav, dx);
    kernels::multiply(mode, sys.pack, dx, incp);
    kernels::multiply(mode, sys.cover, dx, incc);
    double step_load = mp > 0 ? max_of(incp) : 0.0;
    for (std::size_t r = 0; r < mc; ++r) {
      if (active[r]) step_load = std::max(step_load, incc[r]);
    }
    const double beta = 1.0 / step_load;
    kernels::axpy(mode, beta, dx, x);
    kernels::axpy(mode, beta, incp, pl);
    kernels::axpy(mode, beta, incc, cl);
    for (std::size_t r = 0; r < mc; ++r) active[r] = active[r] && cl[r] < threshold;
  }
}

namespace {

struct PackingState {
  const PackingSystem& sys;
  const PackingOptions& opts;
  SparseMatrix rows_t;
  std::vector<double> col_max;
  std::vector<char> live;
  std::vector<double> x, load, y, g;
  double lp = 0.0;
  double best_dual = kInf;

  // Primal value of x scaled down to feasibility.
  double primal(double max_load) const {
    if (!(max_load > 0.0)) return 0.0;
    double c = 0.0;
    for (std::size_t j = 0; j < sys.n; ++j) c += sys.objective[j] * x[j];
    return c / max_load;
  }

  // Refreshes weights and returns the min normalized cost/benefit ratio
  // min_j (A^t y)_j / (c_j |y|), updating the weak-duality bound.
  double refresh(double shift, double& y_sum) {
    kernels::exp_shifted(opts.mode, load, lp, shift, y);
    y_sum = kernels::sum(opts.mode, y);
    kernels::multiply(opts.mode, rows_t, y, g);
    double best = kInf;
    for (std::size_t j = 0; j < sys.n; ++j) {
      if (live[j]) best = std::min(best, g[j] / sys.objective[j]);
    }
    if (best > 0.0) best_dual = std::min(best_dual, y_sum / best);
    return best / y_sum;
  }
};

}  // namespace

PackingResult solve_packing_system(const PackingSystem& sys, const PackingOptions& opts) {
  if (!(opts.eps > 0.0 && opts.eps <= 0.5)) {
    throw Error(ErrorKind::kEpsOutOfRange, "packing eps must lie in (0, 1/2], got " +
                                               std::to_string(opts.eps));
  }
  const std::size_t n = sys.n;
  const std::size_t m = sys.rows.rows();
  PackingState st{sys, opts, sys.rows.transpose(), {}, {}, {}, {}, {}, {}, 0.0, kInf};
  st.col_max = column_max(st.rows_t);
  st.live.assign(n, 0);
  std::size_t live_count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!sys.free_var[j] || !(sys.objective[j] > 0.0)) continue;
    if (!(st.col_max[j] > 0.0)) {
      throw Error(ErrorKind::kUnbounded, "variable " + std::to_string(j) +
                                             " has positive objective and no packing row");
    }
    st.live[j] = 1;
    ++live_count;
  }

  PackingResult out;
  out.x.assign(n, 0.0);
  if (live_count == 0) return out;

  const double e = opts.eps / 3.0;
  st.lp = std::log1p(e);
  st.x.assign(n, 0.0);
  st.load.assign(m, 0.0);
  st.y.assign(m, 0.0);
  st.g.assign(n, 0.0);

  const bool gauss_seidel = opts.mode == ExecMode::kSequential;
  if (!gauss_seidel) {
    for (std::size_t j = 0; j < n; ++j) {
      if (st.live[j]) st.x[j] = 1.0 / (static_cast<double>(live_count) * st.col_max[j]);
    }
  }
  std::vector<std::int32_t> order;
  for (std::size_t j = 0; j < n; ++j) {
    if (st.live[j]) order.push_back(static_cast<std::int32_t>(j));
  }
  std::mt19937_64 rng(opts.seed);
  std::vector<char> fav(n);
  std::vector<double> dx(n), inc(m);

  auto finish = [&](std::int64_t iter, bool below) {
    // Hard feasibility: scale by 1 / max_r (Ax)_r using exact loads.
    kernels::multiply(opts.mode, sys.rows, st.x, st.load);
    const double exact_max = max_of(st.load);
    const double scale = exact_max > 0.0 ? 1.0 / exact_max : 0.0;
    for (std::size_t j = 0; j < n; ++j) out.x[j] = st.x[j] * scale;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += sys.objective[j] * out.x[j];
    out.objective = obj;
    out.dual_bound = st.best_dual;
    out.iterations = iter;
    out.below_target = below;
    return out;
  };

  for (std::int64_t iter = 0;; ++iter) {
    kernels::multiply(opts.mode, sys.rows, st.x, st.load);
    const double max_load = max_of(st.load);
    double y_sum = 0.0;
    const double min_ratio = st.refresh(max_load, y_sum);
    const double primal = st.primal(max_load);

    if (opts.target) {
      if (primal >= *opts.target) return finish(iter, false);
      if (st.best_dual < *opts.target) return finish(iter, true);
    }
    if (primal >= (1.0 - opts.eps) * st.best_dual) return finish(iter, false);
    if (iter >= opts.iteration_budget) budget_exceeded(opts.iteration_budget);

    const double threshold = (1.0 + e) * min_ratio;
    if (gauss_seidel) {
      std::shuffle(order.begin(), order.end(), rng);
      double shift = max_load;
      for (std::int32_t j : order) {
        const auto rows = st.rows_t.row_cols(j);
        const auto vals = st.rows_t.row_values(j);
        double gj = 0.0;
        for (std::size_t t = 0; t < rows.size(); ++t) gj += vals[t] * st.y[rows[t]];
        if (gj > threshold * sys.objective[j] * y_sum) continue;
        const double d = 1.0 / st.col_max[j];
        bool rescale = false;
        for (std::size_t t = 0; t < rows.size(); ++t) {
          const std::int32_t r = rows[t];
          st.load[r] += vals[t] * d;
          const double expo = st.lp * (st.load[r] - shift);
          const double w = std::exp(expo);
          y_sum += w - st.y[r];
          st.y[r] = w;
          rescale = rescale || expo > 600.0;
        }
        st.x[j] += d;
        if (rescale) {
          shift = max_of(st.load);
          kernels::exp_shifted(opts.mode, st.load, st.lp, shift, st.y);
          y_sum = kernels::sum(opts.mode, st.y);
        }
      }
    } else {
      kernels::for_each_index(opts.mode, n, [&](std::size_t j) {
        fav[j] = st.live[j] && st.g[j] <= threshold * sys.objective[j] * y_sum;
      });
      kernels::select(opts.mode, st.x, fav, dx);
      kernels::multiply(opts.mode, sys.rows, dx, inc);
      const double beta = 1.0 / max_of(inc);
      kernels::axpy(opts.mode, beta, dx, st.x);
    }
  }
}

}  // namespace otlp::mwu
