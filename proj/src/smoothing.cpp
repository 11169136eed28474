#include "regcheck/smoothing.hpp"

#include <algorithm>
#include <stdexcept>

namespace regcheck {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double gauss(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }
}  // namespace

double kde(const Vec& sample, const KernelConfig& cfg, double t) {
  const int n = static_cast<int>(sample.size());
  const double h = cfg.bandwidth(n);
  if (h <= 0) throw std::invalid_argument("kde: bandwidth <= 0");
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += gauss((t - sample[i]) / h);
  return acc / (n * h);
}

double kde_deriv(const Vec& sample, const KernelConfig& cfg, double t) {
  const int n = static_cast<int>(sample.size());
  const double h = cfg.bandwidth(n);
  if (h <= 0) throw std::invalid_argument("kde_deriv: bandwidth <= 0");
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = (t - sample[i]) / h;
    acc += -u * gauss(u);  // K'(u) = -u K(u)
  }
  return acc / (n * h * h);
}

ScoreTable score_table(const Vec& residuals, const KernelConfig& cfg, TestKind kind) {
  const int n = static_cast<int>(residuals.size());
  if (n < 10) throw std::invalid_argument("score_table: need n >= 10");

  ScoreTable table;
  table.dim = kind == TestKind::Mean ? 2 : 3;
  table.bandwidth = cfg.bandwidth(n);
  table.points = residuals;
  std::sort(table.points.data(), table.points.data() + n);
  table.f_hat.resize(n);
  table.fdot_hat.resize(n);

  const double h = table.bandwidth;
  for (int k = 0; k < n; ++k) {
    double f = 0.0, fd = 0.0;
    const double t = table.points[k];
    for (int i = 0; i < n; ++i) {
      const double u = (t - table.points[i]) / h;
      const double kv = gauss(u);
      f += kv;
      fd += -u * kv;
    }
    table.f_hat[k] = f / (n * h);
    table.fdot_hat[k] = fd / (n * h * h);
  }

  const double floor_val = cfg.floor_rel * table.f_hat.maxCoeff();
  table.floored_count = 0;
  table.h.resize(n, table.dim);
  for (int k = 0; k < n; ++k) {
    if (table.f_hat[k] < floor_val) {
      table.f_hat[k] = floor_val;
      ++table.floored_count;
    }
    const double score = table.fdot_hat[k] / table.f_hat[k];
    table.h(k, 0) = 1.0;
    table.h(k, 1) = score;
    if (table.dim == 3) table.h(k, 2) = 1.0 + table.points[k] * score;
  }
  return table;
}

}  // namespace regcheck
