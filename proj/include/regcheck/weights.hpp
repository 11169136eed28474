#pragma once

#include <string>
#include <vector>

#include "regcheck/estimation.hpp"
#include "regcheck/linalg.hpp"
#include "regcheck/models.hpp"

namespace regcheck {

struct WeightVector {
  Vec g;            // raw weights g(x_i)
  Vec g0;           // centered: g(x_i) - mean(g)
  double rho_hat = 0.0;  // sqrt(n^{-1} sum g0_i^2)
  std::vector<std::string> warnings;
};

WeightVector make_weight(const Vec& g);

// Directional weight for a fitted alternative class s(., vartheta):
//   g(x_i) = grad_m(x_i)' Sigma^-1 [n^{-1} sum_j grad_m(x_j) s(x_j)] - s(x_i)
// with Sigma = n^{-1} sum grad_m grad_m'. A singular Sigma falls back to its
// pseudo-inverse and records a warning.
WeightVector directional_weight(const Dataset& data, const MeanModel& null_model,
                                const MeanFit& null_fit, const MeanModel& alt_model,
                                const MeanFit& alt_fit);

// Orthonormal extension of `funcs` against span(base) under the empirical
// inner product <u,v> = n^{-1} u'v. Near-dependent inputs (residual norm
// after projection below drop_tol times the input norm) are dropped.
std::vector<Vec> gram_schmidt_empirical(const std::vector<Vec>& funcs,
                                        const std::vector<Vec>& base,
                                        double drop_tol = 1e-8);

struct SdrResult {
  Mat directions;   // d x s_hat, orthonormal columns
  int s_hat = 0;
  Vec eigenvalues;  // all d, descending
};

// Cumulative slicing estimate of the central subspace with ridge-ratio
// selection of the structural dimension.
SdrResult estimate_central_subspace(const Dataset& data);

// Omnibus weight: Fourier-corrected mean estimate over a basis built from
// powers of the SDR directions, then the same projection form as the
// directional weight with s replaced by the estimated mean.
WeightVector omnibus_weight(const Dataset& data, const MeanModel& model,
                            const MeanFit& fit, const SdrResult& sdr);

// Oracle weight for simulation studies where the true regression function is
// known: the projection form applied to m_true - m(., beta). Identically
// zero when the truth lies in the null class, so it is a benchmarking
// utility, not a usable test weight.
WeightVector oracle_weight(const Dataset& data, const MeanModel& model,
                           const Vec& beta,
                           const std::function<double(const Vec&)>& true_mean);

// n x p matrix with rows grad_m(x_i, beta)'.
Mat gradient_matrix(const Dataset& data, const MeanModel& model, const Vec& beta);

}  // namespace regcheck
