#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "regcheck/estimation.hpp"
#include "regcheck/models.hpp"
#include "regcheck/rng.hpp"

using namespace regcheck;

namespace {

Dataset toy_linear(int n, int d, std::uint64_t seed, const Vec& beta,
                   double noise_sd) {
  Rng rng(seed);
  Dataset data;
  data.x.resize(n, d);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) data.x(i, j) = rng.normal();
    data.y[i] = data.x.row(i) * beta + noise_sd * rng.normal();
  }
  return data;
}

}  // namespace

TEST_CASE("exact linear data recovers the coefficient with zero SSE") {
  Dataset data;
  data.x.resize(5, 1);
  data.y.resize(5);
  for (int i = 0; i < 5; ++i) {
    data.x(i, 0) = i + 1;
    data.y[i] = 2.0 * (i + 1);
  }
  const MeanFit fit = fit_mean_ls(data, linear_model(1), Vec());
  CHECK(fit.beta[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.sse == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(fit.converged);
  // Residual identity holds exactly.
  CHECK((data.y - data.x * fit.beta - fit.residuals).norm() == 0.0);
}

TEST_CASE("orthonormal design gives beta = X'y") {
  // Build an orthonormal 6x2 design by Gram-Schmidt on fixed columns.
  Mat raw(6, 2);
  raw << 1, 1, 1, -1, 1, 2, -1, 0, 0, 1, 2, -2;
  Eigen::HouseholderQR<Mat> qr(raw);
  Dataset data;
  data.x = qr.householderQ() * Mat::Identity(6, 2);
  Rng rng(3);
  data.y.resize(6);
  for (int i = 0; i < 6; ++i) data.y[i] = rng.normal();
  const MeanFit fit = fit_mean_ls(data, linear_model(2), Vec());
  CHECK((fit.beta - data.x.transpose() * data.y).norm() < 1e-12);
}

TEST_CASE("rank-deficient design reports rank") {
  Dataset data;
  data.x.resize(4, 2);
  data.y.resize(4);
  for (int i = 0; i < 4; ++i) {
    data.x(i, 0) = i + 1.0;
    data.x(i, 1) = 2.0 * (i + 1.0);  // collinear
    data.y[i] = i;
  }
  CHECK_THROWS_WITH_AS(fit_mean_ls(data, linear_model(2), Vec()),
                       doctest::Contains("rank"), std::runtime_error);
}

TEST_CASE("quadratic single-index toy matches grid-search oracle") {
  // m(x, b) = (b'x)^2 with two parameters, no noise, known b0.
  MeanModel model;
  model.dim_param = 2;
  model.name = "pure-quadratic";
  model.value = [](const Vec& x, const Vec& b) {
    const double u = b.dot(x);
    return u * u;
  };
  model.gradient = [](const Vec& x, const Vec& b) {
    return Vec(2.0 * b.dot(x) * x);
  };
  Vec b0(2);
  b0 << 0.8, -0.6;
  Rng rng(11);
  Dataset data;
  data.x.resize(50, 2);
  data.y.resize(50);
  for (int i = 0; i < 50; ++i) {
    data.x(i, 0) = rng.normal();
    data.x(i, 1) = rng.normal();
    const double u = data.x.row(i) * b0;
    data.y[i] = u * u;
  }

  Vec init(2);
  init << 0.6, -0.4;
  const MeanFit fit = fit_mean_ls(data, model, init);
  CHECK(fit.converged);
  CHECK((fit.beta - b0).norm() < 1e-6);

  // Dense grid search over [-1.5, 1.5]^2 confirms the global minimum.
  double best_sse = 1e300;
  Vec best(2);
  for (int gi = 0; gi <= 120; ++gi) {
    for (int gj = 0; gj <= 120; ++gj) {
      Vec b(2);
      b << -1.5 + gi * 0.025, -1.5 + gj * 0.025;
      double sse = 0.0;
      for (int i = 0; i < 50; ++i) {
        const double u = data.x.row(i) * b;
        const double r = data.y[i] - u * u;
        sse += r * r;
      }
      if (sse < best_sse) {
        best_sse = sse;
        best = b;
      }
    }
  }
  CHECK(fit.sse <= best_sse + 1e-10);
  // Grid lands on b0 or its mirror image.
  const double dist = std::min((best - b0).norm(), (best + b0).norm());
  CHECK(dist < 0.05);
}

TEST_CASE("Gauss-Newton on linear model reaches the closed-form solution") {
  Vec beta(3);
  beta << 1.0, -2.0, 0.5;
  const Dataset data = toy_linear(60, 3, 17, beta, 0.3);
  const MeanFit direct = fit_mean_ls(data, linear_model(3), Vec());

  FitOptions opts;
  opts.force_iterative = true;
  for (std::uint64_t s = 0; s < 3; ++s) {
    Rng rng(100 + s);
    Vec init(3);
    for (int j = 0; j < 3; ++j) init[j] = 5.0 * rng.normal();
    const MeanFit iter = fit_mean_ls(data, linear_model(3), init, opts);
    CHECK((iter.beta - direct.beta).norm() < 1e-8);
  }
}

TEST_CASE("objective trace is non-increasing") {
  const MeanModel model = quadratic_index_model(2);
  Vec beta(3);
  beta << 1.0, 0.5, 0.4;
  Rng rng(23);
  Dataset data;
  data.x.resize(80, 2);
  data.y.resize(80);
  for (int i = 0; i < 80; ++i) {
    data.x(i, 0) = rng.normal();
    data.x(i, 1) = rng.normal();
    data.y[i] = model.value(data.x.row(i), beta) + 0.2 * rng.normal();
  }
  Vec init(3);
  init << 0.2, 0.1, 0.0;
  const MeanFit fit = fit_mean_ls(data, model, init);
  CHECK(fit.converged);
  CHECK(std::is_sorted(fit.sse_trace.rbegin(), fit.sse_trace.rend()));
}

TEST_CASE("permutation invariance of the estimators") {
  Vec beta(2);
  beta << 0.7, -0.4;
  const Dataset data = toy_linear(40, 2, 31, beta, 0.5);
  const MeanFit fit = fit_mean_ls(data, linear_model(2), Vec());

  Dataset shuffled;
  shuffled.x.resize(40, 2);
  shuffled.y.resize(40);
  std::vector<int> perm(40);
  for (int i = 0; i < 40; ++i) perm[i] = (i * 17 + 5) % 40;
  for (int i = 0; i < 40; ++i) {
    shuffled.x.row(i) = data.x.row(perm[i]);
    shuffled.y[i] = data.y[perm[i]];
  }
  const MeanFit fit2 = fit_mean_ls(shuffled, linear_model(2), Vec());
  CHECK((fit.beta - fit2.beta).norm() < 1e-9);
  for (int i = 0; i < 40; ++i)
    CHECK(fit2.residuals[i] == doctest::Approx(fit.residuals[perm[i]]).epsilon(1e-9));
}

TEST_CASE("constant variance model is the mean of squared residuals") {
  Vec beta(2);
  beta << 1.0, 1.0;
  const Dataset data = toy_linear(50, 2, 47, beta, 1.3);
  const MeanFit mean_fit = fit_mean_ls(data, linear_model(2), Vec());
  const VarianceModel vm = constant_variance_model();
  const VarianceFit vf =
      fit_variance_ls(data, mean_fit, vm, vm.init_guess(data, mean_fit.residuals));
  const double target = mean_fit.residuals.squaredNorm() / 50.0;
  CHECK(vf.theta[0] == doctest::Approx(target).epsilon(1e-10));
  CHECK(vf.converged);
}

TEST_CASE("exp-reparametrized constant variance") {
  Vec beta(2);
  beta << -0.5, 0.25;
  const Dataset data = toy_linear(60, 2, 53, beta, 0.9);
  const MeanFit mean_fit = fit_mean_ls(data, linear_model(2), Vec());
  const VarianceModel vm = exp_scalar_variance_model();
  const VarianceFit vf =
      fit_variance_ls(data, mean_fit, vm, vm.init_guess(data, mean_fit.residuals));
  const double target = std::log(mean_fit.residuals.squaredNorm() / 60.0);
  CHECK(vf.theta[0] == doctest::Approx(target).epsilon(1e-8));
}

TEST_CASE("log-linear variance toy matches grid search") {
  // sigma^2(x, t) = exp(t x) in one dimension.
  Rng rng(61);
  Dataset data;
  data.x.resize(120, 1);
  data.y.resize(120);
  const double theta0 = 0.6;
  for (int i = 0; i < 120; ++i) {
    data.x(i, 0) = rng.normal();
    const double sd = std::exp(0.5 * theta0 * data.x(i, 0));
    data.y[i] = sd * rng.normal();
  }
  VarianceModel vm;
  vm.dim_param = 1;
  vm.name = "exp-slope";
  vm.value_sq = [](const Vec& x, const Vec& t) { return std::exp(t[0] * x[0]); };
  vm.gradient_sq = [](const Vec& x, const Vec& t) {
    Vec g(1);
    g[0] = x[0] * std::exp(t[0] * x[0]);
    return g;
  };
  MeanFit zero_mean;
  zero_mean.beta = Vec::Zero(1);
  zero_mean.residuals = data.y;
  zero_mean.converged = true;

  Vec init(1);
  init << 0.0;
  const VarianceFit vf = fit_variance_ls(data, zero_mean, vm, init);

  const Vec z = data.y.array().square();
  double best_sse = 1e300, best_t = 0.0;
  for (int g = 0; g <= 4000; ++g) {
    const double t = -2.0 + g * 0.001;
    double sse = 0.0;
    for (int i = 0; i < 120; ++i) {
      const double r = z[i] - std::exp(t * data.x(i, 0));
      sse += r * r;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best_t = t;
    }
  }
  CHECK(std::abs(vf.theta[0] - best_t) < 1e-3);
  CHECK(vf.sse <= best_sse + 1e-8);
}

TEST_CASE("standardized residuals are the exact elementwise quotient") {
  MeanFit mf;
  mf.residuals.resize(2);
  mf.residuals << 2.0, -2.0;
  VarianceFit vf;
  vf.sigma.resize(2);
  vf.sigma << 2.0, 1.0;
  const Vec eta = standardized_residuals(mf, vf);
  CHECK(eta[0] == 1.0);
  CHECK(eta[1] == -2.0);

  // sigma == 1 leaves residuals unchanged, bitwise.
  vf.sigma << 1.0, 1.0;
  const Vec eta2 = standardized_residuals(mf, vf);
  CHECK(eta2[0] == mf.residuals[0]);
  CHECK(eta2[1] == mf.residuals[1]);
}

TEST_CASE("fit_variance_ls populates the standardized vector bitwise") {
  Vec beta(2);
  beta << 0.3, -0.9;
  const Dataset data = toy_linear(30, 2, 71, beta, 1.0);
  const MeanFit mean_fit = fit_mean_ls(data, linear_model(2), Vec());
  const VarianceModel vm = constant_variance_model();
  const VarianceFit vf =
      fit_variance_ls(data, mean_fit, vm, vm.init_guess(data, mean_fit.residuals));
  const Vec recomputed = standardized_residuals(mean_fit, vf);
  for (int i = 0; i < 30; ++i) CHECK(vf.standardized[i] == recomputed[i]);
}

TEST_CASE("non-positive sigma during search is rejected, not fatal") {
  // sigma^2(x, t) = t, driven toward negative values by a bad init.
  Vec beta(1);
  beta << 1.0;
  const Dataset data = toy_linear(30, 1, 83, beta, 0.7);
  const MeanFit mean_fit = fit_mean_ls(data, linear_model(1), Vec());
  Vec init(1);
  init << 5.0;  // far above the truth; path stays positive by step rejection
  const VarianceFit vf =
      fit_variance_ls(data, mean_fit, constant_variance_model(), init);
  CHECK(vf.theta[0] > 0.0);
  CHECK(vf.converged);
}
