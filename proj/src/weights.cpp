#include "regcheck/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "regcheck/martingale.hpp"

namespace regcheck {

WeightVector make_weight(const Vec& g) {
  if (g.size() < 1) throw std::invalid_argument("make_weight: empty weights");
  if (!g.allFinite()) throw std::invalid_argument("make_weight: non-finite weights");
  WeightVector w;
  w.g = g;
  const double mean = g.mean();
  w.g0 = g.array() - mean;
  w.rho_hat = std::sqrt(w.g0.squaredNorm() / static_cast<double>(g.size()));
  return w;
}

Mat gradient_matrix(const Dataset& data, const MeanModel& model, const Vec& beta) {
  Mat out(data.n(), model.dim_param);
  for (int i = 0; i < data.n(); ++i)
    out.row(i) = grad_mean(model, data.x.row(i), beta).transpose();
  return out;
}

namespace {

// Projection-form weight shared by the directional and omnibus variants:
// g_i = grads.row(i) * Sigma^- * (grads' target / n) - target_i.
WeightVector projection_weight(const Mat& grads, const Vec& target) {
  const int n = static_cast<int>(grads.rows());
  const Mat sigma = grads.transpose() * grads / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Mat> eig(sigma);
  const double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  std::vector<std::string> warnings;
  if (lmax <= 0.0 || lmin <= 1e-10 * lmax)
    warnings.push_back("gradient moment matrix is singular; using pseudo-inverse");
  const Mat sigma_pinv = pseudo_inverse(sigma, 1e-10);
  const Vec moment = grads.transpose() * target / static_cast<double>(n);
  const Vec coef = sigma_pinv * moment;
  WeightVector w = make_weight(grads * coef - target);
  w.warnings = std::move(warnings);
  return w;
}

}  // namespace

WeightVector directional_weight(const Dataset& data, const MeanModel& null_model,
                                const MeanFit& null_fit, const MeanModel& alt_model,
                                const MeanFit& alt_fit) {
  if (null_fit.residuals.size() != data.n() || alt_fit.residuals.size() != data.n())
    throw std::invalid_argument("directional_weight: fits do not match data");
  const Mat grads = gradient_matrix(data, null_model, null_fit.beta);
  Vec s(data.n());
  for (int i = 0; i < data.n(); ++i)
    s[i] = alt_model.value(data.x.row(i), alt_fit.beta);
  return projection_weight(grads, s);
}

std::vector<Vec> gram_schmidt_empirical(const std::vector<Vec>& funcs,
                                        const std::vector<Vec>& base,
                                        double drop_tol) {
  std::size_t n = 0;
  for (const auto& v : base) n = std::max<std::size_t>(n, v.size());
  for (const auto& v : funcs) n = std::max<std::size_t>(n, v.size());
  if (n == 0) return {};
  const double inv_n = 1.0 / static_cast<double>(n);
  auto norm_n = [&](const Vec& v) { return std::sqrt(v.squaredNorm() * inv_n); };

  std::vector<Vec> ortho;  // orthonormal span of base, not returned
  auto sweep = [&](Vec& v, const std::vector<Vec>& against) {
    for (const Vec& q : against) v -= (v.dot(q) * inv_n) * q;
  };
  auto absorb = [&](const Vec& input, std::vector<Vec>& out,
                    const std::vector<Vec>* extra) -> bool {
    if (static_cast<std::size_t>(input.size()) != n)
      throw std::invalid_argument("gram_schmidt_empirical: vector length mismatch");
    const double before = norm_n(input);
    if (before == 0.0) return false;
    Vec v = input;
    // Two projection passes keep the output orthogonal to fp accumulation.
    for (int pass = 0; pass < 2; ++pass) {
      sweep(v, ortho);
      if (extra) sweep(v, *extra);
    }
    const double after = norm_n(v);
    if (after < drop_tol * before) return false;
    out.push_back(v / after);
    return true;
  };

  for (const Vec& b : base) absorb(b, ortho, nullptr);
  std::vector<Vec> result;
  for (const Vec& f : funcs) absorb(f, result, &result);
  return result;
}

SdrResult estimate_central_subspace(const Dataset& data) {
  data.validate();
  const int n = data.n();
  const int d = data.dim();
  if (n <= d) throw std::invalid_argument("estimate_central_subspace: need n > d");

  const Vec mean = data.x.colwise().mean();
  Mat xc = data.x.rowwise() - mean.transpose();
  const Mat cov = xc.transpose() * xc / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Mat> cov_eig(cov);
  const Vec& lam = cov_eig.eigenvalues();
  if (lam.minCoeff() <= 1e-12 * std::max(lam.maxCoeff(), 0.0))
    throw std::runtime_error("estimate_central_subspace: whitening matrix singular");
  const Mat white = cov_eig.eigenvectors() *
                    lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                    cov_eig.eigenvectors().transpose();
  const Mat z = xc * white;

  // m(y) = n^{-1} sum_i Z_i 1(Y_i <= y), evaluated at every sample response
  // via prefix sums in Y order; Lambda = n^{-1} sum_j m(Y_j) m(Y_j)'.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return data.y[a] < data.y[b]; });
  Mat lambda = Mat::Zero(d, d);
  Vec prefix = Vec::Zero(d);
  int k = 0;
  while (k < n) {
    int last = k;
    while (last + 1 < n && data.y[order[last + 1]] == data.y[order[k]]) ++last;
    for (int j = k; j <= last; ++j) prefix += z.row(order[j]);
    const Vec m_val = prefix / static_cast<double>(n);
    lambda.noalias() += static_cast<double>(last - k + 1) * (m_val * m_val.transpose());
    k = last + 1;
  }
  lambda /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Mat> eig(lambda);
  SdrResult res;
  res.eigenvalues = eig.eigenvalues().reverse();  // descending
  Mat vecs(d, d);
  for (int j = 0; j < d; ++j) vecs.col(j) = eig.eigenvectors().col(d - 1 - j);

  if (d == 1) {
    res.s_hat = 1;
  } else {
    // Minimum ridge-type eigenvalue ratio with c_n = (tr/d) log(n)/n: the
    // ridge has to sit above the O(1/n) noise eigenvalues yet below genuine
    // secondary structure, which at these sample sizes rules out a sqrt(n)
    // denominator.
    const double ridge = (res.eigenvalues.sum() / d) * std::log(static_cast<double>(n)) /
                         static_cast<double>(n);
    int best = 1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= d - 1; ++i) {
      const double ratio =
          (res.eigenvalues[i] + ridge) / (res.eigenvalues[i - 1] + ridge);
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = i;
      }
    }
    res.s_hat = best;
  }

  // Map the top directions back through the whitening and re-orthonormalize.
  Mat raw = white * vecs.leftCols(res.s_hat);
  Eigen::HouseholderQR<Mat> qr(raw);
  res.directions = qr.householderQ() * Mat::Identity(d, res.s_hat);
  return res;
}

WeightVector omnibus_weight(const Dataset& data, const MeanModel& model,
                            const MeanFit& fit, const SdrResult& sdr) {
  if (fit.residuals.size() != data.n())
    throw std::invalid_argument("omnibus_weight: fit does not match data");
  const int n = data.n();
  const Mat grads = gradient_matrix(data, model, fit.beta);
  const Vec m0 = data.y - fit.residuals;  // m(x_i, beta_hat)

  std::vector<Vec> base;
  base.reserve(static_cast<std::size_t>(grads.cols()));
  for (int j = 0; j < grads.cols(); ++j) base.push_back(grads.col(j));

  std::vector<Vec> funcs;
  funcs.reserve(static_cast<std::size_t>(3 * sdr.s_hat));
  for (int j = 0; j < sdr.s_hat; ++j) {
    const Vec u = data.x * sdr.directions.col(j);
    funcs.push_back(u.array().square());
    funcs.push_back(u.array().cube());
    funcs.push_back(u.array().square().square());
  }

  const std::vector<Vec> basis = gram_schmidt_empirical(funcs, base);
  Vec m_hat = m0;
  std::vector<std::string> warnings;
  if (basis.empty()) {
    warnings.push_back(
        "all omnibus basis functions dropped as dependent; weight degenerates");
  } else {
    for (const Vec& b : basis) {
      const double coef = fit.residuals.dot(b) / static_cast<double>(n);
      m_hat += coef * b;
    }
  }
  WeightVector w = projection_weight(grads, m_hat);
  w.warnings.insert(w.warnings.end(), warnings.begin(), warnings.end());
  return w;
}

WeightVector oracle_weight(const Dataset& data, const MeanModel& model,
                           const Vec& beta,
                           const std::function<double(const Vec&)>& true_mean) {
  const Mat grads = gradient_matrix(data, model, beta);
  Vec gap(data.n());
  for (int i = 0; i < data.n(); ++i)
    gap[i] = true_mean(data.x.row(i)) - model.value(data.x.row(i), beta);
  return projection_weight(grads, gap);
}

}  // namespace regcheck
