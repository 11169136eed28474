#include "regcheck/empirical_process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace regcheck {

StepProcess build_process(const Vec& residuals, const WeightVector& w) {
  const int n = static_cast<int>(residuals.size());
  if (n < 1) throw std::invalid_argument("build_process: empty residual vector");
  if (w.g0.size() != n)
    throw std::invalid_argument("build_process: weight/residual length mismatch");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return residuals[a] < residuals[b]; });

  StepProcess proc;
  proc.jump_points.resize(n);
  proc.values.resize(n);
  proc.sorted_g0.resize(n);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  double prefix = 0.0;
  for (int k = 0; k < n; ++k) {
    proc.jump_points[k] = residuals[order[k]];
    proc.sorted_g0[k] = w.g0[order[k]];
    prefix += proc.sorted_g0[k];
    proc.values[k] = prefix * inv_sqrt_n;
  }
  return proc;
}

double StepProcess::eval(double t) const {
  const double* begin = jump_points.data();
  const double* end = begin + jump_points.size();
  const double* it = std::upper_bound(begin, end, t);
  if (it == begin) return 0.0;
  return values[static_cast<int>(it - begin) - 1];
}

double eval_process(const StepProcess& proc, double t) { return proc.eval(t); }

Ecdf make_ecdf(const Vec& sample) {
  if (sample.size() < 1) throw std::invalid_argument("make_ecdf: empty sample");
  Ecdf e;
  e.sorted = sample;
  std::sort(e.sorted.data(), e.sorted.data() + e.sorted.size());
  return e;
}

double Ecdf::operator()(double t) const {
  const double* begin = sorted.data();
  const double* end = begin + sorted.size();
  const double* it = std::upper_bound(begin, end, t);
  return static_cast<double>(it - begin) / static_cast<double>(sorted.size());
}

void dump_process_csv(const StepProcess& proc, std::ostream& os) {
  os << "t,value\n";
  os.precision(17);
  for (int k = 0; k < proc.size(); ++k)
    os << proc.jump_points[k] << ',' << proc.values[k] << '\n';
}

}  // namespace regcheck
