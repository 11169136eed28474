#pragma once

#include <vector>

#include "regcheck/empirical_process.hpp"
#include "regcheck/linalg.hpp"
#include "regcheck/smoothing.hpp"

namespace regcheck {

// Per-jump-point ingredients of the empirical martingale transformation:
//   gamma[k]            = n^{-1} sum_{e_v >= e_(k)} h_v h_v'
//   suffix_integrals[k] = n^{-1/2} sum_{e_v >= e_(k)} g0_v h_v
// together with the generalized inverse of each gamma. Suffixes are
// accumulated back-to-front in O(n dim^2); tied jump points share the suffix
// starting at the first tied index, matching the >= in the integrals.
struct TransformMachinery {
  ScoreTable score;
  std::vector<Mat> gamma;
  std::vector<Mat> gamma_pinv;
  Mat suffix_integrals;  // n x dim
  double pinv_rel_tol = 1e-10;
};

// Symmetric generalized inverse: eigenvalues with |lambda| <= rel_tol * max
// are zeroed in the inverse. Satisfies M M^- M = M.
Mat pseudo_inverse(const Mat& sym, double rel_tol = 1e-10);

TransformMachinery build_machinery(const StepProcess& proc, const ScoreTable& score,
                                   double pinv_rel_tol = 1e-10);

// Transformed process on the same jump points:
//   T U(t) = U(t) - sum_{e_(j) <= t} n^{-1} h_j' gamma[j]^- suffix[j].
StepProcess transform_process(const StepProcess& proc, const TransformMachinery& mach);

}  // namespace regcheck
