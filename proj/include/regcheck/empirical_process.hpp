#pragma once

#include <iosfwd>
#include <vector>

#include "regcheck/linalg.hpp"
#include "regcheck/weights.hpp"

namespace regcheck {

// Right-continuous step process over sorted residual jump points,
//   value at t = n^{-1/2} * sum_i g0_i * 1(e_i <= t).
// values[k] holds the prefix state after the k-th sorted jump; evaluation at
// a tied t returns the state after the last tied jump.
struct StepProcess {
  Vec jump_points;  // ascending; ties kept in stable original-index order
  Vec values;
  Vec sorted_g0;    // centered weights in jump order (the weight link)

  int size() const { return static_cast<int>(jump_points.size()); }
  double eval(double t) const;
};

StepProcess build_process(const Vec& residuals, const WeightVector& w);

double eval_process(const StepProcess& proc, double t);

// F(t) = n^{-1} #{ sample_i <= t }.
struct Ecdf {
  Vec sorted;
  double operator()(double t) const;
};

Ecdf make_ecdf(const Vec& sample);

// CSV dump with header "t,value", one row per jump point.
void dump_process_csv(const StepProcess& proc, std::ostream& os);

}  // namespace regcheck
