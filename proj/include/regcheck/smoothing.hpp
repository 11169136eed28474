#pragma once

#include <cmath>

#include "regcheck/linalg.hpp"

namespace regcheck {

// Gaussian-kernel configuration with the fixed-rate bandwidth h = c * n^{-1/10}.
struct KernelConfig {
  double c = 1.0;
  double floor_rel = 1e-4;  // density floor, relative to the table maximum

  double bandwidth(int n) const { return c * std::pow(static_cast<double>(n), -0.1); }
};

// f_hat(t) = (nh)^{-1} sum_i K((t - e_i)/h), standard normal kernel.
double kde(const Vec& sample, const KernelConfig& cfg, double t);

// d/dt f_hat(t) = (n h^2)^{-1} sum_i K'((t - e_i)/h).
double kde_deriv(const Vec& sample, const KernelConfig& cfg, double t);

enum class TestKind { Mean, Variance };

// Score vectors at every sorted residual: [1, fdot/f] for the mean test and
// [1, fdot/f, 1 + t fdot/f] for the variance test. The density is floored at
// floor_rel times its maximum over the table before ratios are formed, so
// tail points cannot blow up the score.
struct ScoreTable {
  Vec points;    // sorted residuals
  Vec f_hat;     // floored density values
  Vec fdot_hat;
  Mat h;         // n x dim score vectors, h(k,0) == 1
  int dim = 2;
  int floored_count = 0;
  double bandwidth = 0.0;
};

ScoreTable score_table(const Vec& residuals, const KernelConfig& cfg, TestKind kind);

}  // namespace regcheck
