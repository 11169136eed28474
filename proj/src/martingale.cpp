#include "regcheck/martingale.hpp"

#include <cmath>
#include <stdexcept>

namespace regcheck {

Mat pseudo_inverse(const Mat& sym, double rel_tol) {
  if (sym.rows() != sym.cols())
    throw std::invalid_argument("pseudo_inverse: matrix not square");
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  const Vec& lambda = eig.eigenvalues();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  const double cut = rel_tol * lmax;
  Vec inv = Vec::Zero(lambda.size());
  for (int i = 0; i < lambda.size(); ++i)
    if (std::abs(lambda[i]) > cut && lmax > 0.0) inv[i] = 1.0 / lambda[i];
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

TransformMachinery build_machinery(const StepProcess& proc, const ScoreTable& score,
                                   double pinv_rel_tol) {
  const int n = proc.size();
  if (score.points.size() != n)
    throw std::invalid_argument("build_machinery: score table size mismatch");
  for (int k = 0; k < n; ++k)
    if (score.points[k] != proc.jump_points[k])
      throw std::invalid_argument(
          "build_machinery: score table and process have different jump points");

  const int dim = score.dim;
  TransformMachinery mach;
  mach.score = score;
  mach.pinv_rel_tol = pinv_rel_tol;
  mach.gamma.resize(n);
  mach.gamma_pinv.resize(n);
  mach.suffix_integrals.resize(n, dim);

  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  Mat gamma_suffix = Mat::Zero(dim, dim);
  Vec a_suffix = Vec::Zero(dim);
  // Backward pass; a tie group is flushed once its first index is reached so
  // every tied point sees the full >= suffix.
  int k = n - 1;
  while (k >= 0) {
    int first = k;
    while (first > 0 && proc.jump_points[first - 1] == proc.jump_points[k]) --first;
    for (int j = first; j <= k; ++j) {
      const Vec hj = score.h.row(j);
      gamma_suffix.noalias() += inv_n * (hj * hj.transpose());
      a_suffix.noalias() += inv_sqrt_n * proc.sorted_g0[j] * hj;
    }
    const Mat pinv = pseudo_inverse(gamma_suffix, pinv_rel_tol);
    for (int j = first; j <= k; ++j) {
      mach.gamma[j] = gamma_suffix;
      mach.gamma_pinv[j] = pinv;
      mach.suffix_integrals.row(j) = a_suffix;
    }
    k = first - 1;
  }
  return mach;
}

StepProcess transform_process(const StepProcess& proc, const TransformMachinery& mach) {
  const int n = proc.size();
  if (static_cast<int>(mach.gamma.size()) != n)
    throw std::invalid_argument("transform_process: machinery size mismatch");

  const double inv_n = 1.0 / static_cast<double>(n);
  Vec term(n);
  for (int j = 0; j < n; ++j) {
    const Vec hj = mach.score.h.row(j);
    const Vec a = mach.suffix_integrals.row(j);
    term[j] = inv_n * hj.dot(mach.gamma_pinv[j] * a);
  }

  // Compensator at index k sums every jump point <= jump_points[k]; tied
  // groups therefore share the prefix through the last tied index.
  StepProcess out;
  out.jump_points = proc.jump_points;
  out.sorted_g0 = proc.sorted_g0;
  out.values.resize(n);
  Vec prefix(n);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    acc += term[j];
    prefix[j] = acc;
  }
  int k = 0;
  while (k < n) {
    int last = k;
    while (last + 1 < n && proc.jump_points[last + 1] == proc.jump_points[k]) ++last;
    for (int j = k; j <= last; ++j) out.values[j] = proc.values[j] - prefix[last];
    k = last + 1;
  }
  return out;
}

}  // namespace regcheck
