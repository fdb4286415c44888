#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "otlp/core.hpp"

namespace otlp::test {

inline Instance make(std::vector<double> p, std::vector<double> q,
                     std::vector<std::vector<double>> c) {
  const std::size_t k = q.size();
  const std::size_t l = p.size();
  std::vector<double> flat;
  for (const auto& row : c) flat.insert(flat.end(), row.begin(), row.end());
  return validate_instance(std::move(p), std::move(q), Matrix(k, l, std::move(flat)));
}

inline Matrix mat(std::vector<std::vector<double>> rows) {
  std::vector<double> flat;
  for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  return Matrix(rows.size(), rows.empty() ? 0 : rows[0].size(), std::move(flat));
}

// Reference optimum by a different route than the library oracle:
// northwest-corner start, then cancel negative cycles found by
// Bellman-Ford on the residual graph until none is left.
inline double reference_ot(const Instance& inst) {
  const std::size_t k = inst.k();
  const std::size_t l = inst.l();
  std::vector<double> f(k * l, 0.0);
  {
    std::vector<double> sup(inst.p().begin(), inst.p().end());
    std::vector<double> dem(inst.q().begin(), inst.q().end());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < k && j < l) {
      const double m = std::min(sup[j], dem[i]);
      f[i * l + j] += m;
      sup[j] -= m;
      dem[i] -= m;
      if (dem[i] <= sup[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  // Nodes: sources 0..l-1, sinks l..l+k-1.
  const std::size_t n = k + l;
  for (int round = 0; round < 100000; ++round) {
    std::vector<double> dist(n, 0.0);
    std::vector<long> pred(n, -1);
    long touched = -1;
    for (std::size_t pass = 0; pass < n; ++pass) {
      touched = -1;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
          const double c = inst.cost()(i, j);
          if (dist[j] + c < dist[l + i] - 1e-13) {
            dist[l + i] = dist[j] + c;
            pred[l + i] = static_cast<long>(j);
            touched = static_cast<long>(l + i);
          }
          if (f[i * l + j] > 1e-15 && dist[l + i] - c < dist[j] - 1e-13) {
            dist[j] = dist[l + i] - c;
            pred[j] = static_cast<long>(l + i);
            touched = static_cast<long>(j);
          }
        }
      }
      if (touched < 0) break;
    }
    if (touched < 0) break;
    long v = touched;
    for (std::size_t s = 0; s < n; ++s) v = pred[v];
    std::vector<long> cycle{v};
    for (long u = pred[v]; u != v; u = pred[u]) cycle.push_back(u);
    double push = std::numeric_limits<double>::infinity();
    for (long u : cycle) {
      const long w = pred[u];
      if (w >= static_cast<long>(l)) push = std::min(push, f[(w - l) * l + u]);
    }
    for (long u : cycle) {
      const long w = pred[u];
      if (w >= static_cast<long>(l)) {
        f[(w - l) * l + u] -= push;
      } else {
        f[(u - l) * l + w] += push;
      }
    }
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) cost += inst.cost()(i, j) * f[i * l + j];
  }
  return cost;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t t = 0; t < a.data().size(); ++t) {
    d = std::max(d, std::abs(a.data()[t] - b.data()[t]));
  }
  return d;
}

}  // namespace otlp::test
