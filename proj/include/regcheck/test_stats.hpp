#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regcheck/bootstrap.hpp"
#include "regcheck/empirical_process.hpp"
#include "regcheck/estimation.hpp"
#include "regcheck/linalg.hpp"
#include "regcheck/martingale.hpp"
#include "regcheck/models.hpp"
#include "regcheck/smoothing.hpp"
#include "regcheck/weights.hpp"

namespace regcheck {

// CvM = n^{-1} sum_k | values[k] / rho_hat |^2. Errors out when rho_hat = 0
// (degenerate weight).
double cvm_statistic(const StepProcess& proc, const WeightVector& w);

// Trimmed statistic of a transformed process:
//   [rho^2 F(t0)^2]^{-1} n^{-1} sum_{jump_k <= t0} values[k]^2,
// t0 the empirical trim-quantile of the jump points. Requires at least 10
// points below the trim.
double tcvm_statistic(const StepProcess& transformed, const WeightVector& w,
                      double trim);

// Simulated quantiles of int_0^1 B(t)^2 dt on a K-point grid of Gaussian
// partial sums, M paths.
struct BrownianCvmTable {
  std::vector<double> levels;     // ascending
  std::vector<double> quantiles;  // strictly increasing
  int paths = 0;
  int grid = 0;
  std::uint64_t seed = 0;
  double mean_stat = 0.0;

  double quantile(double level) const;  // linear interpolation in level
  double p_value(double stat) const;    // 1 - interpolated level, clamped
};

std::vector<double> default_table_levels();

BrownianCvmTable simulate_brownian_cvm_table(
    int paths, int grid, std::uint64_t seed,
    const std::vector<double>& levels = default_table_levels(), int threads = 1);

double brownian_cvm_quantile(double level, int paths, int grid, std::uint64_t seed);

// Loads the cache file when its meta (M, K, seed) matches; otherwise
// simulates and rewrites it. An empty path disables caching. `cache_path`
// defaulting from the REGCHECK_CACHE_DIR environment variable is the
// caller's job (see default_table_cache_path).
BrownianCvmTable load_or_build_brownian_table(int paths, int grid,
                                              std::uint64_t seed,
                                              const std::string& cache_path,
                                              int threads = 1);
std::string default_table_cache_path();

enum class StatKind { Cvm, Tcvm };
enum class MethodKind { Bootstrap, Asymptotic };

struct Method {
  MethodKind kind = MethodKind::Bootstrap;
  int B = 300;
  static Method bootstrap(int B) { return {MethodKind::Bootstrap, B}; }
  static Method asymptotic() { return {MethodKind::Asymptotic, 0}; }
};

struct WeightSpec {
  enum class Kind { Omnibus, Directional, Provided };
  Kind kind = Kind::Omnibus;
  const MeanModel* alt_model = nullptr;  // Directional
  Vec alt_init;                          // optional; default pads beta_hat with zeros
  Vec provided;                          // Provided: g at the sample points

  static WeightSpec omnibus() { return {}; }
  static WeightSpec directional(const MeanModel& alt) {
    WeightSpec s;
    s.kind = Kind::Directional;
    s.alt_model = &alt;
    return s;
  }
  static WeightSpec custom(Vec g) {
    WeightSpec s;
    s.kind = Kind::Provided;
    s.provided = std::move(g);
    return s;
  }
};

struct TestConfig {
  double level = 0.05;
  KernelConfig kernel{};        // h = c n^{-1/10}, density floor
  double trim = 0.95;           // t0 = empirical trim-quantile of residuals
  double pinv_rel_tol = 1e-10;
  double v_n = 0.2;             // bootstrap smoothing
  std::uint64_t seed = 0;
  int threads = 1;
  Vec mean_init;                // required for non-linear null models
  Vec var_init;                 // optional; defaults to the model's init_guess
  const BrownianCvmTable* table = nullptr;  // required for Method::Asymptotic
};

struct TestMeta {
  std::uint64_t seed = 0;
  double bandwidth_c = 1.0;
  double bandwidth = 0.0;
  double trim = 0.95;
  int bootstrap_B = 0;
  double v_n = 0.0;
  std::string weight_kind;
  std::string statistic;
  std::string method;
  int n = 0;
  int p = 0;
  std::vector<std::string> warnings;
};

struct TestResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  TestMeta meta;
};

// Full mean-test pipeline: fit, weight, process, [transform], statistic,
// critical value. The asymptotic method is only available for the
// transformed statistic; the raw CvM statistic is not distribution-free and
// must be calibrated by the smooth residual bootstrap.
TestResult run_mean_test(const Dataset& data, const MeanModel& model,
                         const WeightSpec& weight, StatKind stat, Method method,
                         const TestConfig& cfg);

// Variance-test pipeline over standardized residuals with the 3-component
// score.
TestResult run_variance_test(const Dataset& data, const MeanModel& mean_model,
                             const VarianceModel& var_model,
                             const WeightSpec& weight, StatKind stat, Method method,
                             const TestConfig& cfg);

}  // namespace regcheck
