#include "gapsafe/elastic_net.hpp"

#include <algorithm>
#include <cmath>

#include "gapsafe/errors.hpp"

namespace gapsafe {

namespace {

Vector padded_target(const ElasticNetProblem& en) {
  Vector y = en.y;
  y.resize(en.y.size() + en.X.cols(), 0.0);
  return y;
}

}  // namespace

void ElasticNetProblem::validate() const {
  if (X.has_tail()) throw ParameterError("design matrix is already augmented");
  if (y.size() != X.rows()) throw ParameterError("target length does not match design rows");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("lambda must be positive and finite");
  }
  if (!(alpha_mix > 0.0) || alpha_mix > 1.0) {
    throw ParameterError("alpha_mix must lie in (0, 1]");
  }
}

LassoProblem to_lasso(const ElasticNetProblem& en) {
  en.validate();
  const double w = std::sqrt((1.0 - en.alpha_mix) * en.lambda);
  return LassoProblem(en.X.with_diagonal_tail(w), padded_target(en), en.lambda * en.alpha_mix);
}

double elastic_net_objective(const ElasticNetProblem& en, std::span<const double> beta) {
  en.validate();
  if (beta.size() != en.X.cols()) throw ParameterError("coefficient vector has wrong length");
  Vector r = en.X.multiply(beta);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= en.y[i];
  return 0.5 * squared_norm(r) + en.lambda * en.alpha_mix * l1_norm(beta) +
         0.5 * en.lambda * (1.0 - en.alpha_mix) * squared_norm(beta);
}

double elastic_net_kkt_residual(const ElasticNetProblem& en, std::span<const double> beta) {
  en.validate();
  if (beta.size() != en.X.cols()) throw ParameterError("coefficient vector has wrong length");
  Vector r = en.X.multiply(beta);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = en.y[i] - r[i];
  const double l1 = en.lambda * en.alpha_mix;
  const double l2 = en.lambda * (1.0 - en.alpha_mix);
  double worst = 0.0;
  for (Index j = 0; j < en.X.cols(); ++j) {
    const double g = en.X.col_dot(j, r) - l2 * beta[j];
    double v;
    if (beta[j] != 0.0) {
      v = std::abs(g - l1 * (beta[j] > 0.0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, std::abs(g) - l1);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double elastic_net_lambda_max(const DesignMatrix& X, std::span<const double> y,
                              double alpha_mix) {
  if (!(alpha_mix > 0.0) || alpha_mix > 1.0) {
    throw ParameterError("alpha_mix must lie in (0, 1]");
  }
  return X.max_abs_correlation(y).value / alpha_mix;
}

PathResult run_elastic_net_path(const DesignMatrix& X, const Vector& y, double alpha_mix,
                                std::span<const double> grid, const SolverConfig& config) {
  if (grid.empty()) throw ParameterError("empty lambda grid");
  const ElasticNetProblem first{X, y, grid[0], alpha_mix};
  const LassoProblem base = to_lasso(first);
  PathProblemFactory factory;
  factory.lambda_max = base.lambda_max() / alpha_mix;
  if (alpha_mix == 1.0) {
    factory.same_data = true;
    factory.at = [base](double lam) { return base.with_lambda(lam); };
  } else {
    factory.same_data = false;
    factory.at = [X, y, alpha_mix](double lam) {
      return to_lasso(ElasticNetProblem{X, y, lam, alpha_mix});
    };
  }
  return run_path(factory, grid, config);
}

}  // namespace gapsafe
