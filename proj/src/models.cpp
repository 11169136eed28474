#include "regcheck/models.hpp"

#include <cmath>
#include <stdexcept>

#include "regcheck/rng.hpp"

namespace regcheck {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void Dataset::validate() const {
  if (y.size() < 2) throw std::invalid_argument("Dataset: need n >= 2");
  if (x.cols() < 1) throw std::invalid_argument("Dataset: need d >= 1");
  if (x.rows() != y.size())
    throw std::invalid_argument("Dataset: x and y row counts differ");
  if (!x.allFinite() || !y.allFinite())
    throw std::invalid_argument("Dataset: non-finite entries");
}

double eval_mean(const MeanModel& model, const Vec& x, const Vec& beta) {
  if (beta.size() != model.dim_param)
    throw std::invalid_argument(model.name + ": parameter dimension mismatch");
  const double v = model.value(x, beta);
  if (!std::isfinite(v))
    throw std::runtime_error(model.name + ": non-finite model value");
  return v;
}

Vec numeric_grad_mean(const MeanModel& model, const Vec& x, const Vec& beta,
                      double step) {
  if (step <= 0) throw std::invalid_argument("numeric_grad_mean: step <= 0");
  Vec g(beta.size());
  Vec b = beta;
  for (int j = 0; j < beta.size(); ++j) {
    const double h = std::max(step, step * std::abs(beta[j]));
    b[j] = beta[j] + h;
    const double up = model.value(x, b);
    b[j] = beta[j] - h;
    const double dn = model.value(x, b);
    b[j] = beta[j];
    if (!std::isfinite(up) || !std::isfinite(dn))
      throw std::runtime_error(model.name + ": non-finite probe in gradient");
    g[j] = (up - dn) / (2.0 * h);
  }
  return g;
}

Vec grad_mean(const MeanModel& model, const Vec& x, const Vec& beta) {
  if (model.gradient) return model.gradient(x, beta);
  return numeric_grad_mean(model, x, beta);
}

MeanModel linear_model(int d) {
  MeanModel m;
  m.dim_param = d;
  m.linear = true;
  m.name = "linear";
  m.value = [](const Vec& x, const Vec& beta) { return beta.dot(x); };
  m.gradient = [](const Vec& x, const Vec&) { return x; };
  return m;
}

MeanModel quadratic_index_model(int d) {
  MeanModel m;
  m.dim_param = d + 1;
  m.name = "quadratic-index";
  m.value = [d](const Vec& x, const Vec& th) {
    const double u = th.head(d).dot(x);
    return u + th[d] * u * u;
  };
  m.gradient = [d](const Vec& x, const Vec& th) {
    const double u = th.head(d).dot(x);
    Vec g(d + 1);
    g.head(d) = (1.0 + 2.0 * th[d] * u) * x;
    g[d] = u * u;
    return g;
  };
  return m;
}

MeanModel cosine_index_model(int d, double freq) {
  MeanModel m;
  m.dim_param = d + 1;
  m.name = "cosine-index";
  m.value = [d, freq](const Vec& x, const Vec& th) {
    const double u = th.head(d).dot(x);
    return u + th[d] * std::cos(freq * u);
  };
  m.gradient = [d, freq](const Vec& x, const Vec& th) {
    const double u = th.head(d).dot(x);
    Vec g(d + 1);
    g.head(d) = (1.0 - th[d] * freq * std::sin(freq * u)) * x;
    g[d] = std::cos(freq * u);
    return g;
  };
  return m;
}

MeanModel exp_index_model(int d) {
  MeanModel m;
  m.dim_param = 2 * d + 1;
  m.name = "exp-index";
  m.value = [d](const Vec& x, const Vec& th) {
    const double u = th.head(d).dot(x);
    const double v = th.tail(d).dot(x);
    return u + th[d] * std::exp(v);
  };
  m.gradient = [d](const Vec& x, const Vec& th) {
    const double v = th.tail(d).dot(x);
    const double ev = std::exp(v);
    Vec g(2 * d + 1);
    g.head(d) = x;
    g[d] = ev;
    g.tail(d) = th[d] * ev * x;
    return g;
  };
  return m;
}

MeanModel mixed_index_model(int d) {
  MeanModel m;
  m.dim_param = 2 * d + 1;
  m.name = "mixed-index";
  m.value = [d](const Vec& x, const Vec& th) {
    const double u = th.head(d).dot(x);
    const double v = th.tail(d).dot(x);
    return u + th[d] * (v * v * v + std::sin(0.5 * kPi * v) + u * v);
  };
  m.gradient = [d](const Vec& x, const Vec& th) {
    const double u = th.head(d).dot(x);
    const double v = th.tail(d).dot(x);
    const double c = th[d];
    Vec g(2 * d + 1);
    g.head(d) = (1.0 + c * v) * x;
    g[d] = v * v * v + std::sin(0.5 * kPi * v) + u * v;
    g.tail(d) = c * (3.0 * v * v + 0.5 * kPi * std::cos(0.5 * kPi * v) + u) * x;
    return g;
  };
  return m;
}

MeanModel deviation_model(int d, std::function<double(const Vec&)> dev,
                          std::string name) {
  MeanModel m;
  m.dim_param = d + 1;
  m.name = std::move(name);
  m.value = [d, dev](const Vec& x, const Vec& th) {
    return th.head(d).dot(x) + th[d] * dev(x);
  };
  m.gradient = [d, dev](const Vec& x, const Vec&) {
    Vec g(d + 1);
    g.head(d) = x;
    g[d] = dev(x);
    return g;
  };
  return m;
}

VarianceModel constant_variance_model() {
  VarianceModel v;
  v.dim_param = 1;
  v.name = "constant";
  v.value_sq = [](const Vec&, const Vec& th) { return th[0]; };
  v.gradient_sq = [](const Vec&, const Vec&) { return Vec::Ones(1); };
  v.init_guess = [](const Dataset&, const Vec& resid) {
    Vec t(1);
    t[0] = resid.squaredNorm() / static_cast<double>(resid.size());
    return t;
  };
  return v;
}

VarianceModel exp_linear_variance_model(int d) {
  VarianceModel v;
  v.dim_param = d + 1;
  v.name = "exp-linear";
  v.value_sq = [d](const Vec& x, const Vec& th) {
    return std::exp(th[0] + th.tail(d).dot(x));
  };
  v.gradient_sq = [d](const Vec& x, const Vec& th) {
    const double s2 = std::exp(th[0] + th.tail(d).dot(x));
    Vec g(d + 1);
    g[0] = s2;
    g.tail(d) = s2 * x;
    return g;
  };
  v.init_guess = [d](const Dataset&, const Vec& resid) {
    Vec t = Vec::Zero(d + 1);
    t[0] = std::log(std::max(resid.squaredNorm() / resid.size(), 1e-12));
    return t;
  };
  return v;
}

VarianceModel exp_scalar_variance_model() {
  VarianceModel v;
  v.dim_param = 1;
  v.name = "exp-scalar";
  v.value_sq = [](const Vec&, const Vec& th) { return std::exp(th[0]); };
  v.gradient_sq = [](const Vec&, const Vec& th) {
    Vec g(1);
    g[0] = std::exp(th[0]);
    return g;
  };
  v.init_guess = [](const Dataset&, const Vec& resid) {
    Vec t(1);
    t[0] = std::log(std::max(resid.squaredNorm() / resid.size(), 1e-12));
    return t;
  };
  return v;
}

std::string cov_kind_name(CovKind k) {
  return k == CovKind::Identity ? "sigma1" : "sigma2";
}

CovKind cov_kind_from_name(const std::string& s) {
  if (s == "sigma1" || s == "identity") return CovKind::Identity;
  if (s == "sigma2" || s == "ar1") return CovKind::Ar1Half;
  throw std::invalid_argument("unknown covariance kind: " + s);
}

int dimension_rule(int n) {
  const int p = static_cast<int>(std::floor(3.0 * std::cbrt(static_cast<double>(n)))) - 3;
  return std::max(p, 2);
}

int Scenario::p() const { return p_override > 0 ? p_override : dimension_rule(n); }

Vec scenario_beta0(int p) {
  return Vec::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
}

Vec scenario_beta1(int p) {
  const int p1 = p / 2;
  if (p1 < 1) throw std::invalid_argument("scenario_beta1: p too small");
  Vec b = Vec::Zero(p);
  b.tail(p1).setConstant(1.0 / std::sqrt(static_cast<double>(p1)));
  return b;
}

namespace {

double h23_deviation(const Vec& x) {
  return std::abs(x[1]) + x[2] * x[2] * x[2] - x[3] * x[3] + x[4] * x[4] * x[4] +
         x[5] * x[6] + std::cos(kPi * x[7]) + std::sin(kPi * x[8] * x[9]);
}

struct ScenarioParts {
  std::function<double(const Vec&)> base;
  std::function<double(const Vec&)> dev;
};

ScenarioParts scenario_parts(const Scenario& s) {
  const int p = s.p();
  const Vec b0 = scenario_beta0(p);
  ScenarioParts parts;
  if (s.name == "H23") {
    if (p < 10) throw std::invalid_argument("H23 requires p >= 10");
    parts.base = [](const Vec& x) { return x[0]; };
    parts.dev = h23_deviation;
  } else {
    parts.base = [b0](const Vec& x) { return b0.dot(x); };
    if (s.name == "custom") {
      parts.dev = [](const Vec&) { return 0.0; };
    } else if (s.name == "H11") {
      parts.dev = [b0](const Vec& x) {
        const double u = b0.dot(x);
        return u * u;
      };
    } else if (s.name == "H12") {
      parts.dev = [b0](const Vec& x) { return std::cos(0.6 * kPi * b0.dot(x)); };
    } else if (s.name == "H21") {
      const Vec b1 = scenario_beta1(p);
      parts.dev = [b1](const Vec& x) { return std::exp(b1.dot(x)); };
    } else if (s.name == "H22") {
      const Vec b1 = scenario_beta1(p);
      parts.dev = [b0, b1](const Vec& x) {
        const double u = b0.dot(x);
        const double v = b1.dot(x);
        return v * v * v + std::sin(0.5 * kPi * v) + u * v;
      };
    } else {
      throw std::invalid_argument("unknown scenario name: " + s.name);
    }
  }
  if (s.deviation) parts.dev = s.deviation;
  return parts;
}

}  // namespace

double scenario_mean(const Scenario& s, const Vec& x) {
  const ScenarioParts parts = scenario_parts(s);
  const double rate = std::pow(static_cast<double>(s.n), -s.alpha);
  const double amp = s.a * rate;
  return parts.base(x) + (amp != 0.0 ? amp * parts.dev(x) : 0.0);
}

MeanModel scenario_null_model(const Scenario& s) { return linear_model(s.p()); }

MeanModel scenario_alternative_model(const Scenario& s) {
  const int p = s.p();
  if (s.deviation) return deviation_model(p, s.deviation, "deviation:" + s.name);
  if (s.name == "H11") return quadratic_index_model(p);
  if (s.name == "H12") return cosine_index_model(p, 0.6 * kPi);
  if (s.name == "H21") return exp_index_model(p);
  if (s.name == "H22") return mixed_index_model(p);
  if (s.name == "H23") {
    if (p < 10) throw std::invalid_argument("H23 requires p >= 10");
    return deviation_model(p, h23_deviation, "deviation:H23");
  }
  return quadratic_index_model(p);
}

Dataset make_dgp(const Scenario& s, std::uint64_t seed) {
  const int n = s.n;
  const int p = s.p();
  if (n < 2) throw std::invalid_argument("make_dgp: n < 2");
  if (p < 1) throw std::invalid_argument("make_dgp: dimension rule gave p < 1");
  const ScenarioParts parts = scenario_parts(s);
  const double amp = s.a * std::pow(static_cast<double>(n), -s.alpha);

  Rng rng(seed);
  Mat x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
  if (s.covariance == CovKind::Ar1Half) {
    Mat cov(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) cov(i, j) = std::pow(0.5, std::abs(i - j));
    const Mat chol = Eigen::LLT<Mat>(cov).matrixL();
    x = x * chol.transpose();
  }
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    const Vec xi = x.row(i);
    const double eps = rng.normal();
    y[i] = parts.base(xi) + (amp != 0.0 ? amp * parts.dev(xi) : 0.0) + eps;
  }
  Dataset data{std::move(x), std::move(y)};
  data.validate();
  return data;
}

std::function<double(const Vec&)> deviation_from_name(const std::string& name,
                                                      int p) {
  const Vec b0 = scenario_beta0(p);
  if (name == "quadratic-index") {
    return [b0](const Vec& x) {
      const double u = b0.dot(x);
      return u * u;
    };
  }
  if (name == "cos-index") {
    return [b0](const Vec& x) { return std::cos(0.6 * kPi * b0.dot(x)); };
  }
  throw std::invalid_argument("unknown deviation name: " + name);
}

}  // namespace regcheck
