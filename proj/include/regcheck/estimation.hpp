#pragma once

#include <vector>

#include "regcheck/linalg.hpp"
#include "regcheck/models.hpp"

namespace regcheck {

struct FitOptions {
  int max_iter = 200;
  double grad_tol = 1e-10;     // stop when ||grad SSE|| <= grad_tol * (1 + SSE)
  double init_damping = 1e-3;  // x10 on a failed step, /10 on success
  bool force_iterative = false;
};

struct MeanFit {
  Vec beta;
  Vec residuals;  // y_i - m(x_i, beta)
  double sse = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> sse_trace;  // accepted-iterate objective values
};

struct VarianceFit {
  Vec theta;
  Vec sigma;         // sigma(x_i, theta) > 0
  Vec standardized;  // eta_i = residual_i / sigma_i
  double sse = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Least-squares fit of the mean parameters. Linear families are solved by a
// rank-revealing QR of the design matrix (rank deficiency is an error);
// everything else runs damped Gauss-Newton from `init`.
MeanFit fit_mean_ls(const Dataset& data, const MeanModel& model, const Vec& init,
                    const FitOptions& opts = {});

// Least squares of squared residuals against sigma^2(x, theta). Steps that
// make any sigma^2(x_i, theta) non-positive are rejected like failed steps.
VarianceFit fit_variance_ls(const Dataset& data, const MeanFit& mean_fit,
                            const VarianceModel& model, const Vec& init,
                            const FitOptions& opts = {});

Vec standardized_residuals(const MeanFit& mean_fit, const VarianceFit& var_fit);

// OLS coefficients of y on x; the initialization used for linear null models.
Vec ols_init(const Dataset& data);

// Cached QR factorization of a fixed design matrix, for repeated solves
// against new responses (bootstrap refits).
class LinearLs {
 public:
  explicit LinearLs(const Mat& design);
  Vec solve(const Vec& y) const;
  int rank() const { return static_cast<int>(qr_.rank()); }

 private:
  Eigen::ColPivHouseholderQR<Mat> qr_;
};

}  // namespace regcheck
