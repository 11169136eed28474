#include "regcheck/estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace regcheck {

namespace {

Vec model_values(const Dataset& data, const MeanModel& model, const Vec& beta) {
  Vec out(data.n());
  for (int i = 0; i < data.n(); ++i) out[i] = model.value(data.x.row(i), beta);
  return out;
}

Mat model_jacobian(const Dataset& data, const MeanModel& model, const Vec& beta) {
  Mat jac(data.n(), model.dim_param);
  for (int i = 0; i < data.n(); ++i)
    jac.row(i) = grad_mean(model, data.x.row(i), beta).transpose();
  return jac;
}

}  // namespace

LinearLs::LinearLs(const Mat& design) : qr_(design) {}

Vec LinearLs::solve(const Vec& y) const { return qr_.solve(y); }

Vec ols_init(const Dataset& data) {
  return Eigen::ColPivHouseholderQR<Mat>(data.x).solve(data.y);
}

MeanFit fit_mean_ls(const Dataset& data, const MeanModel& model, const Vec& init,
                    const FitOptions& opts) {
  data.validate();
  if (model.dim_param < 1)
    throw std::invalid_argument("fit_mean_ls: model has no parameters");
  if (data.dim() > 0 && model.linear && model.dim_param != data.dim())
    throw std::invalid_argument("fit_mean_ls: linear model dimension mismatch");

  if (model.linear && !opts.force_iterative) {
    Eigen::ColPivHouseholderQR<Mat> qr(data.x);
    if (qr.rank() < model.dim_param)
      throw std::runtime_error("fit_mean_ls: rank-deficient design (rank " +
                               std::to_string(qr.rank()) + " < " +
                               std::to_string(model.dim_param) + ")");
    MeanFit fit;
    fit.beta = qr.solve(data.y);
    fit.residuals = data.y - data.x * fit.beta;
    fit.sse = fit.residuals.squaredNorm();
    fit.converged = true;
    fit.iterations = 0;
    fit.sse_trace = {fit.sse};
    return fit;
  }

  if (init.size() != model.dim_param)
    throw std::invalid_argument("fit_mean_ls: init dimension mismatch");
  if (!init.allFinite())
    throw std::invalid_argument("fit_mean_ls: non-finite init");

  Vec beta = init;
  Vec fitted = model_values(data, model, beta);
  Vec resid = data.y - fitted;
  double sse = resid.squaredNorm();
  if (!std::isfinite(sse))
    throw std::runtime_error("fit_mean_ls: non-finite objective at init");

  MeanFit fit;
  fit.sse_trace.push_back(sse);
  double damping = opts.init_damping;
  const int p = model.dim_param;
  const int n = data.n();
  int iter = 0;
  bool stationary = false;
  int flat_steps = 0;

  // Damped steps solved as a stacked least-squares problem
  // [J; sqrt(lambda) I] delta = [r; 0]; QR keeps the achievable gradient
  // floor well below what the normal equations reach.
  Mat stacked(n + p, p);
  Vec rhs = Vec::Zero(n + p);

  for (; iter < opts.max_iter; ++iter) {
    const Mat jac = model_jacobian(data, model, beta);
    const Vec grad = jac.transpose() * resid;  // SSE gradient is -2 * grad
    if (2.0 * grad.norm() <= opts.grad_tol * (1.0 + sse)) {
      stationary = true;
      break;
    }
    bool accepted = false;
    while (!accepted && damping < 1e12) {
      stacked.topRows(n) = jac;
      stacked.bottomRows(p) = std::sqrt(damping) * Mat::Identity(p, p);
      rhs.head(n) = resid;
      const Vec step = stacked.householderQr().solve(rhs);
      const Vec candidate = beta + step;
      Vec cand_fitted(n);
      bool finite = true;
      for (int i = 0; i < n; ++i) {
        cand_fitted[i] = model.value(data.x.row(i), candidate);
        if (!std::isfinite(cand_fitted[i])) {
          finite = false;
          break;
        }
      }
      // Objective change evaluated as sum (r_old - r_new)(r_old + r_new):
      // no cancellation, so progress far below ulp(SSE) still registers.
      double gain = 0.0;
      if (finite) {
        for (int i = 0; i < n; ++i) {
          const double r_new = data.y[i] - cand_fitted[i];
          gain += (resid[i] - r_new) * (resid[i] + r_new);
        }
      }
      if (finite && gain >= 0.0) {
        beta = candidate;
        fitted = std::move(cand_fitted);
        resid = data.y - fitted;
        sse = std::max(sse - gain, 0.0);
        fit.sse_trace.push_back(sse);
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        flat_steps = gain <= 1e-15 * (1.0 + sse) ? flat_steps + 1 : 0;
      } else {
        damping *= 10.0;
      }
    }
    if (!accepted || flat_steps >= 3) break;  // numerical floor reached
  }

  fit.beta = beta;
  fit.residuals = resid;
  fit.sse = sse;
  fit.iterations = iter;
  if (!stationary) {
    const Vec grad = model_jacobian(data, model, beta).transpose() * resid;
    stationary = 2.0 * grad.norm() <= opts.grad_tol * (1.0 + sse);
  }
  fit.converged = stationary;
  return fit;
}

VarianceFit fit_variance_ls(const Dataset& data, const MeanFit& mean_fit,
                            const VarianceModel& model, const Vec& init,
                            const FitOptions& opts) {
  if (mean_fit.residuals.size() != data.n())
    throw std::invalid_argument("fit_variance_ls: mean fit does not match data");
  if (init.size() != model.dim_param)
    throw std::invalid_argument("fit_variance_ls: init dimension mismatch");

  const Vec z = mean_fit.residuals.array().square();
  const int n = data.n();
  const int q = model.dim_param;

  auto values_sq = [&](const Vec& theta, Vec& out) -> bool {
    for (int i = 0; i < n; ++i) {
      out[i] = model.value_sq(data.x.row(i), theta);
      if (!std::isfinite(out[i]) || out[i] <= 0.0) return false;
    }
    return true;
  };

  Vec theta = init;
  Vec s2(n);
  if (!values_sq(theta, s2))
    throw std::runtime_error("fit_variance_ls: sigma^2 not positive at init");
  Vec resid = z - s2;
  double sse = resid.squaredNorm();
  double damping = opts.init_damping;
  int iter = 0;
  bool stationary = false;
  int flat_steps = 0;

  Mat jac(n, q);
  auto fill_jacobian = [&](const Vec& th) {
    for (int i = 0; i < n; ++i)
      jac.row(i) = model.gradient_sq(data.x.row(i), th).transpose();
  };
  Mat stacked(n + q, q);
  Vec rhs = Vec::Zero(n + q);

  for (; iter < opts.max_iter; ++iter) {
    fill_jacobian(theta);
    const Vec grad = jac.transpose() * resid;
    if (2.0 * grad.norm() <= opts.grad_tol * (1.0 + sse)) {
      stationary = true;
      break;
    }
    bool accepted = false;
    while (!accepted && damping < 1e12) {
      stacked.topRows(n) = jac;
      stacked.bottomRows(q) = std::sqrt(damping) * Mat::Identity(q, q);
      rhs.head(n) = resid;
      const Vec step = stacked.householderQr().solve(rhs);
      const Vec candidate = theta + step;
      Vec cand_s2(n);
      // Positivity enforced by step rejection; the model stays unmodified.
      if (values_sq(candidate, cand_s2)) {
        double gain = 0.0;
        for (int i = 0; i < n; ++i) {
          const double r_new = z[i] - cand_s2[i];
          gain += (resid[i] - r_new) * (resid[i] + r_new);
        }
        if (gain >= 0.0) {
          theta = candidate;
          s2 = cand_s2;
          resid = z - s2;
          sse = std::max(sse - gain, 0.0);
          damping = std::max(damping / 10.0, 1e-12);
          accepted = true;
          flat_steps = gain <= 1e-15 * (1.0 + sse) ? flat_steps + 1 : 0;
          continue;
        }
      }
      damping *= 10.0;
    }
    if (!accepted || flat_steps >= 3) break;
  }

  VarianceFit fit;
  fit.theta = theta;
  fit.sigma = s2.array().sqrt();
  fit.standardized = mean_fit.residuals.array() / fit.sigma.array();
  fit.sse = sse;
  fit.iterations = iter;
  if (!stationary) {
    fill_jacobian(theta);
    const Vec grad = jac.transpose() * resid;
    stationary = 2.0 * grad.norm() <= opts.grad_tol * (1.0 + sse);
  }
  fit.converged = stationary;
  return fit;
}

Vec standardized_residuals(const MeanFit& mean_fit, const VarianceFit& var_fit) {
  if (mean_fit.residuals.size() != var_fit.sigma.size())
    throw std::invalid_argument("standardized_residuals: size mismatch");
  if ((var_fit.sigma.array() <= 0.0).any())
    throw std::runtime_error("standardized_residuals: non-positive sigma");
  return mean_fit.residuals.array() / var_fit.sigma.array();
}

}  // namespace regcheck
