#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "regcheck/estimation.hpp"
#include "regcheck/linalg.hpp"
#include "regcheck/models.hpp"
#include "regcheck/rng.hpp"
#include "regcheck/weights.hpp"

namespace regcheck {

struct BootstrapConfig {
  int B = 300;
  double v_n = 0.2;  // smoothing scale of the added normal noise
  std::uint64_t seed = 0;
  int threads = 1;
};

// Smooth residual bootstrap errors: eps*_i = etilde*_i + v_n Z_i, where
// etilde* is drawn with replacement from the centered residuals and Z is
// standard normal. The centered residuals are sorted before resampling, so
// draws depend on the residual multiset only, not on its input order; the
// generator treats every position i identically, which keeps the bootstrap
// errors homoscedastic by construction.
Vec bootstrap_errors(const Vec& residuals, double v_n, Rng& rng);

// Statistic recomputed on a bootstrap sample. The full construction runs
// again per replicate — in particular, estimated weight functions are
// re-estimated from the bootstrap data, since the weight-selection noise is
// part of the null distribution the bootstrap has to reproduce.
using BootstrapStatistic =
    std::function<double(const Dataset& boot_sample, const MeanFit& refit)>;

// One replicate: draw errors, rebuild responses from the fitted mean, refit,
// and evaluate `stat_fn` on the bootstrap sample. A non-converged refit is
// redrawn once; a second failure is an error.
double bootstrap_statistic(const Dataset& data, const MeanModel& model,
                           const MeanFit& fit, double v_n, Rng& rng,
                           const BootstrapStatistic& stat_fn);

struct BootstrapDistribution {
  std::vector<double> stats;  // ascending
  // Upper-level quantile: order statistic ceil((1 - tau)(B + 1)), clamped.
  double critical_value(double tau) const;
  // (1 + #{stat* >= value}) / (B + 1).
  double p_value(double value) const;
};

BootstrapDistribution bootstrap_distribution(const Dataset& data,
                                             const MeanModel& model,
                                             const MeanFit& fit,
                                             const BootstrapConfig& cfg,
                                             const BootstrapStatistic& stat_fn);

using VarianceBootstrapStatistic = std::function<double(
    const Dataset& boot_sample, const MeanFit& mean_refit, const VarianceFit& var_refit)>;

// Variance-test analogue: resamples standardized residuals (smooth, centered),
// rebuilds Y* = m(x, beta_hat) + sigma(x, theta_hat) eta*, refits both stages,
// and evaluates `stat_fn` on the bootstrap sample.
double bootstrap_variance_statistic(const Dataset& data, const MeanModel& mean_model,
                                    const MeanFit& mean_fit,
                                    const VarianceModel& var_model,
                                    const VarianceFit& var_fit, double v_n, Rng& rng,
                                    const VarianceBootstrapStatistic& stat_fn);

BootstrapDistribution bootstrap_variance_distribution(
    const Dataset& data, const MeanModel& mean_model, const MeanFit& mean_fit,
    const VarianceModel& var_model, const VarianceFit& var_fit,
    const BootstrapConfig& cfg, const VarianceBootstrapStatistic& stat_fn);

}  // namespace regcheck
