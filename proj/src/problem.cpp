#include "gapsafe/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gapsafe/errors.hpp"

namespace gapsafe {

namespace {
// lambda_max computed through a different path (e.g. lambda_max / a * a)
// may exceed the cached value by a few ulps.
constexpr double kLambdaSlack = 1e-12;
constexpr double kDualInfeasibleTol = 1e-9;
}  // namespace

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

LassoProblem::LassoProblem(DesignMatrix X, Vector y, double lambda) {
  if (y.size() != X.rows()) {
    throw ParameterError("target length " + std::to_string(y.size()) +
                         " does not match design rows " + std::to_string(X.rows()));
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw ParameterError("target contains a non-finite value");
  }
  auto data = std::make_shared<Data>(Data{std::move(X), std::move(y), {}, 0.0, 0, 0.0});
  data->xty = data->X.correlations(data->y);
  const MaxCorrelation m = data->X.max_abs_correlation(data->y);
  data->lambda_max = m.value;
  data->j_star = m.index;
  data->y_norm_sq = squared_norm(data->y);
  if (!(data->lambda_max > 0.0)) {
    throw ParameterError("lambda_max is zero: y is orthogonal to every column");
  }
  check_lambda(lambda, data->lambda_max);
  data_ = std::move(data);
  lambda_ = lambda;
}

LassoProblem::LassoProblem(std::shared_ptr<const Data> data, double lambda)
    : data_(std::move(data)), lambda_(lambda) {
  check_lambda(lambda, data_->lambda_max);
}

LassoProblem LassoProblem::with_lambda(double lambda) const {
  return LassoProblem(data_, lambda);
}

void LassoProblem::check_lambda(double lambda, double lambda_max) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("lambda must be positive and finite");
  }
  if (lambda > lambda_max * (1.0 + kLambdaSlack)) {
    throw ParameterError("lambda " + std::to_string(lambda) + " exceeds lambda_max " +
                         std::to_string(lambda_max));
  }
}

DualPoint make_dual_point(const LassoProblem& prob, Vector theta) {
  if (theta.size() != prob.n()) throw ParameterError("dual point has wrong length");
  const double sup = prob.X().max_abs_correlation(theta).value;
  return DualPoint{std::move(theta), 1.0 - sup, false};
}

Vector residual_of(const LassoProblem& prob, std::span<const double> beta) {
  Vector r = prob.X().multiply(beta);
  const auto y = prob.y();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  return r;
}

double primal_value(const LassoProblem& prob, std::span<const double> beta,
                    std::optional<std::span<const double>> residual) {
  if (beta.size() != prob.p()) throw ParameterError("coefficient vector has wrong length");
  double fit;
  if (residual) {
    if (residual->size() != prob.n()) throw ParameterError("residual has wrong length");
    fit = squared_norm(*residual);
  } else {
    fit = squared_norm(residual_of(prob, beta));
  }
  return 0.5 * fit + prob.lambda() * l1_norm(beta);
}

double dual_value(const LassoProblem& prob, const DualPoint& theta) {
  if (theta.theta.size() != prob.n()) throw ParameterError("dual point has wrong length");
  if (theta.feasibility_margin < -kDualInfeasibleTol) {
    throw ContractViolation("dual point is infeasible (margin " +
                            std::to_string(theta.feasibility_margin) + ")");
  }
  const double lam = prob.lambda();
  const auto y = prob.y();
  // (lambda^2 / 2) ||theta - y / lambda||^2 == 0.5 ||lambda theta - y||^2
  double d = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = lam * theta.theta[i] - y[i];
    d += e * e;
  }
  return 0.5 * prob.y_norm_sq() - 0.5 * d;
}

GapCertificate duality_gap(const LassoProblem& prob, std::span<const double> beta,
                           const DualPoint& theta,
                           std::optional<std::span<const double>> residual) {
  GapCertificate c;
  c.primal = primal_value(prob, beta, residual);
  c.dual = dual_value(prob, theta);
  c.gap = c.primal - c.dual;
  return c;
}

DualPoint dual_scale(const LassoProblem& prob, std::span<const double> residual,
                     std::optional<std::span<const Index>> restrict_to) {
  if (residual.size() != prob.n()) throw ParameterError("residual has wrong length");
  if (squared_norm(residual) == 0.0) {
    return DualPoint{Vector(prob.n(), 0.0), 1.0, true};
  }
  const double sup = prob.X().max_abs_correlation(residual, restrict_to).value;
  return dual_scale_with_sup(prob, residual, sup);
}

DualPoint dual_scale_with_sup(const LassoProblem& prob, std::span<const double> residual,
                              double sup_correlation) {
  if (residual.size() != prob.n()) throw ParameterError("residual has wrong length");
  const double rr = squared_norm(residual);
  if (rr == 0.0) {
    return DualPoint{Vector(prob.n(), 0.0), 1.0, true};
  }
  double a = dot(prob.y(), residual) / (prob.lambda() * rr);
  if (sup_correlation > 0.0) {
    const double bound = 1.0 / sup_correlation;
    a = std::min(std::max(a, -bound), bound);
  }
  DualPoint out;
  out.theta.resize(residual.size());
  for (std::size_t i = 0; i < residual.size(); ++i) out.theta[i] = a * residual[i];
  out.feasibility_margin = 1.0 - std::abs(a) * sup_correlation;
  return out;
}

Vector lambda_grid(double lambda_max, std::size_t count, double delta) {
  if (count < 2) throw ParameterError("lambda grid needs at least two values");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ParameterError("lambda grid delta must be positive");
  }
  if (!(lambda_max > 0.0)) throw ParameterError("lambda_max must be positive");
  Vector grid(count);
  const double denom = static_cast<double>(count - 1);
  grid[0] = lambda_max;
  for (std::size_t t = 1; t < count; ++t) {
    grid[t] = lambda_max * std::pow(10.0, -delta * static_cast<double>(t) / denom);
  }
  return grid;
}

UselessThresholds static_useless_threshold(const LassoProblem& prob) {
  const auto& X = prob.X();
  const double y_norm = std::sqrt(prob.y_norm_sq());
  const double lmax = prob.lambda_max();
  UselessThresholds out{std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity()};
  for (Index j = 0; j < prob.p(); ++j) {
    const double xn = X.col_norm(j);
    if (xn == 0.0) continue;
    const double c = std::abs(prob.xty()[j]);
    const double scale = xn * y_norm;
    out.static_rule = std::min(out.static_rule, (1.0 + c / scale) / (1.0 + lmax / scale));
    out.dynamic_rule = std::min(out.dynamic_rule, c / lmax);
  }
  return out;
}

}  // namespace gapsafe
