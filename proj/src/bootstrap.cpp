#include "regcheck/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "regcheck/parallel.hpp"

namespace regcheck {

Vec bootstrap_errors(const Vec& residuals, double v_n, Rng& rng) {
  const int n = static_cast<int>(residuals.size());
  if (n < 2) throw std::invalid_argument("bootstrap_errors: need n >= 2");
  if (v_n < 0) throw std::invalid_argument("bootstrap_errors: v_n < 0");
  Vec centered = residuals.array() - residuals.mean();
  std::sort(centered.data(), centered.data() + n);
  Vec out(n);
  for (int i = 0; i < n; ++i)
    out[i] = centered[static_cast<int>(rng.bounded(n))] + v_n * rng.normal();
  return out;
}

namespace {

struct MeanRefitter {
  const Dataset& data;
  const MeanModel& model;
  const MeanFit& fit;
  const LinearLs* lin;  // non-null for linear families

  MeanFit operator()(const Vec& y_star, bool& ok) const {
    ok = true;
    if (lin) {
      MeanFit refit;
      refit.beta = lin->solve(y_star);
      refit.residuals = y_star - data.x * refit.beta;
      refit.sse = refit.residuals.squaredNorm();
      refit.converged = true;
      return refit;
    }
    Dataset boot{data.x, y_star};
    MeanFit refit = fit_mean_ls(boot, model, fit.beta);
    ok = refit.converged;
    return refit;
  }
};

BootstrapDistribution run_replicates(int B, std::uint64_t seed, int threads,
                                     const std::function<double(Rng&)>& replicate) {
  if (B < 1) throw std::invalid_argument("bootstrap: B < 1");
  std::vector<double> stats(static_cast<std::size_t>(B));
  parallel_for(B, threads, [&](int b) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(b)));
    stats[static_cast<std::size_t>(b)] = replicate(rng);
  });
  std::sort(stats.begin(), stats.end());
  return BootstrapDistribution{std::move(stats)};
}

}  // namespace

double bootstrap_statistic(const Dataset& data, const MeanModel& model,
                           const MeanFit& fit, double v_n, Rng& rng,
                           const BootstrapStatistic& stat_fn) {
  const Vec fitted = data.y - fit.residuals;
  std::optional<LinearLs> lin;
  if (model.linear) lin.emplace(data.x);
  MeanRefitter refit{data, model, fit, lin ? &*lin : nullptr};
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Vec eps = bootstrap_errors(fit.residuals, v_n, rng);
    const Dataset boot{data.x, fitted + eps};
    bool ok = true;
    const MeanFit boot_fit = refit(boot.y, ok);
    if (ok) return stat_fn(boot, boot_fit);
  }
  throw std::runtime_error("bootstrap_statistic: refit failed twice");
}

double BootstrapDistribution::critical_value(double tau) const {
  if (stats.empty()) throw std::invalid_argument("bootstrap: no replicates");
  if (tau <= 0.0 || tau >= 1.0)
    throw std::invalid_argument("bootstrap: tau outside (0,1)");
  const int b = static_cast<int>(stats.size());
  int k = static_cast<int>(std::ceil((1.0 - tau) * (b + 1)));
  k = std::clamp(k, 1, b);
  return stats[static_cast<std::size_t>(k - 1)];
}

double BootstrapDistribution::p_value(double value) const {
  const auto it = std::lower_bound(stats.begin(), stats.end(), value);
  const auto count_ge = static_cast<double>(stats.end() - it);
  return (1.0 + count_ge) / (static_cast<double>(stats.size()) + 1.0);
}

BootstrapDistribution bootstrap_distribution(const Dataset& data,
                                             const MeanModel& model,
                                             const MeanFit& fit,
                                             const BootstrapConfig& cfg,
                                             const BootstrapStatistic& stat_fn) {
  // The fitted mean and (for linear families) the design factorization are
  // shared across replicates; only the response vector changes.
  const Vec fitted = data.y - fit.residuals;
  std::optional<LinearLs> lin;
  if (model.linear) lin.emplace(data.x);
  MeanRefitter refit{data, model, fit, lin ? &*lin : nullptr};
  return run_replicates(cfg.B, cfg.seed, cfg.threads, [&](Rng& rng) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const Vec eps = bootstrap_errors(fit.residuals, cfg.v_n, rng);
      const Dataset boot{data.x, fitted + eps};
      bool ok = true;
      const MeanFit boot_fit = refit(boot.y, ok);
      if (ok) return stat_fn(boot, boot_fit);
    }
    throw std::runtime_error("bootstrap_distribution: refit failed twice");
  });
}

namespace {

struct VarianceReplicate {
  Dataset boot;
  MeanFit mean_refit;
  VarianceFit var_refit;
};

bool variance_replicate(const Dataset& data, const MeanModel& mean_model,
                        const MeanFit& mean_fit, const VarianceModel& var_model,
                        const VarianceFit& var_fit, double v_n, Rng& rng,
                        const LinearLs* lin, VarianceReplicate& out) {
  const Vec fitted = data.y - mean_fit.residuals;
  const Vec eta_star = bootstrap_errors(var_fit.standardized, v_n, rng);
  out.boot = Dataset{data.x, fitted + var_fit.sigma.cwiseProduct(eta_star)};
  if (lin) {
    out.mean_refit.beta = lin->solve(out.boot.y);
    out.mean_refit.residuals = out.boot.y - data.x * out.mean_refit.beta;
    out.mean_refit.sse = out.mean_refit.residuals.squaredNorm();
    out.mean_refit.converged = true;
  } else {
    out.mean_refit = fit_mean_ls(out.boot, mean_model, mean_fit.beta);
    if (!out.mean_refit.converged) return false;
  }
  out.var_refit =
      fit_variance_ls(out.boot, out.mean_refit, var_model, var_fit.theta);
  return out.var_refit.converged;
}

}  // namespace

double bootstrap_variance_statistic(const Dataset& data, const MeanModel& mean_model,
                                    const MeanFit& mean_fit,
                                    const VarianceModel& var_model,
                                    const VarianceFit& var_fit, double v_n, Rng& rng,
                                    const VarianceBootstrapStatistic& stat_fn) {
  std::optional<LinearLs> lin;
  if (mean_model.linear) lin.emplace(data.x);
  for (int attempt = 0; attempt < 2; ++attempt) {
    VarianceReplicate rep;
    if (variance_replicate(data, mean_model, mean_fit, var_model, var_fit, v_n, rng,
                           lin ? &*lin : nullptr, rep))
      return stat_fn(rep.boot, rep.mean_refit, rep.var_refit);
  }
  throw std::runtime_error("bootstrap_variance_statistic: refit failed twice");
}

BootstrapDistribution bootstrap_variance_distribution(
    const Dataset& data, const MeanModel& mean_model, const MeanFit& mean_fit,
    const VarianceModel& var_model, const VarianceFit& var_fit,
    const BootstrapConfig& cfg, const VarianceBootstrapStatistic& stat_fn) {
  std::optional<LinearLs> lin;
  if (mean_model.linear) lin.emplace(data.x);
  return run_replicates(cfg.B, cfg.seed, cfg.threads, [&](Rng& rng) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      VarianceReplicate rep;
      if (variance_replicate(data, mean_model, mean_fit, var_model, var_fit,
                             cfg.v_n, rng, lin ? &*lin : nullptr, rep))
        return stat_fn(rep.boot, rep.mean_refit, rep.var_refit);
    }
    throw std::runtime_error("bootstrap_variance_distribution: refit failed twice");
  });
}

}  // namespace regcheck
