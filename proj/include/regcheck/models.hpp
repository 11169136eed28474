#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "regcheck/linalg.hpp"

namespace regcheck {

struct Dataset {
  Mat x;  // n x d predictor matrix
  Vec y;  // n responses

  int n() const { return static_cast<int>(y.size()); }
  int dim() const { return static_cast<int>(x.cols()); }
  void validate() const;  // n >= 2, d >= 1, all entries finite
};

// A parametric mean function family m(., beta). `gradient` is optional; when
// absent, callers fall back to central finite differences. `linear` marks
// families with m(x, beta) = beta'x, which the estimator solves in closed
// form.
struct MeanModel {
  int dim_param = 0;
  std::function<double(const Vec& x, const Vec& beta)> value;
  std::function<Vec(const Vec& x, const Vec& beta)> gradient;
  bool linear = false;
  std::string name = "mean";
};

struct VarianceModel {
  int dim_param = 0;
  std::function<double(const Vec& x, const Vec& theta)> value_sq;  // sigma^2 > 0
  std::function<Vec(const Vec& x, const Vec& theta)> gradient_sq;
  // Reasonable starting point given the data and mean-fit residuals.
  std::function<Vec(const Dataset&, const Vec& residuals)> init_guess;
  std::string name = "variance";
};

double eval_mean(const MeanModel& model, const Vec& x, const Vec& beta);

// Central differences with per-coordinate step max(step, step*|beta_j|).
Vec numeric_grad_mean(const MeanModel& model, const Vec& x, const Vec& beta,
                      double step = 1e-6);

// Analytic gradient when the model has one, numeric fallback otherwise.
Vec grad_mean(const MeanModel& model, const Vec& x, const Vec& beta);

// Built-in families.
MeanModel linear_model(int d);
// s(x, [t; c]) = t'x + c (t'x)^2
MeanModel quadratic_index_model(int d);
// s(x, [t; c]) = t'x + c cos(freq * t'x)
MeanModel cosine_index_model(int d, double freq);
// s(x, [t; c; g]) = t'x + c exp(g'x)
MeanModel exp_index_model(int d);
// s(x, [t; c; g]) = t'x + c {(g'x)^3 + sin(0.5 pi g'x) + (t'x)(g'x)}
MeanModel mixed_index_model(int d);
// s(x, [t; c]) = t'x + c D(x) for a fixed deviation D
MeanModel deviation_model(int d, std::function<double(const Vec&)> dev,
                          std::string name = "deviation");

VarianceModel constant_variance_model();
// sigma^2(x, theta) = exp(theta_0 + theta_1..d ' x)
VarianceModel exp_linear_variance_model(int d);
// sigma^2(x, theta) = theta (scalar), reparametrized as exp(theta)
VarianceModel exp_scalar_variance_model();

enum class CovKind { Identity, Ar1Half };  // Sigma1 = I_p, Sigma2 = (0.5^{|i-j|})

std::string cov_kind_name(CovKind k);
CovKind cov_kind_from_name(const std::string& s);

// Data-generating scenario. Responses follow
//   Y = base(X) + a * n^{-alpha} * S(X) + eps,   eps ~ N(0,1), X ~ N(0, Sigma),
// where base and the default deviation S are fixed by `name` (H11, H12, H21,
// H22, H23) and `deviation`, when set, overrides S. alpha = 0 gives the fixed
// alternatives of the simulation studies; alpha > 0 gives local alternatives
// shrinking at rate n^{-alpha}.
struct Scenario {
  std::string name = "H11";
  int n = 100;
  int p_override = 0;  // 0: use the dimension rule
  CovKind covariance = CovKind::Identity;
  double a = 0.0;
  double alpha = 0.0;
  std::function<double(const Vec&)> deviation;  // optional S(x) override
  std::string deviation_name;                   // set when S came from a registry name

  int p() const;
};

// p = floor(3 n^{1/3}) - 3, floored at 2.
int dimension_rule(int n);

Vec scenario_beta0(int p);  // (1,...,1)'/sqrt(p)
Vec scenario_beta1(int p);  // (0,..,0,1,..,1)'/sqrt(p1), p1 = floor(p/2) trailing ones

double scenario_mean(const Scenario& s, const Vec& x);  // base + a n^-alpha S
MeanModel scenario_null_model(const Scenario& s);
// Parametric class the directional tests fit for this scenario's alternative.
MeanModel scenario_alternative_model(const Scenario& s);

Dataset make_dgp(const Scenario& s, std::uint64_t seed);

// Registry of deviation functions addressable from configuration files:
// "quadratic-index" and "cos-index", both through beta0(p)'x.
std::function<double(const Vec&)> deviation_from_name(const std::string& name, int p);

}  // namespace regcheck

