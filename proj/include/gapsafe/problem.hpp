#pragma once

#include <memory>
#include <optional>
#include <span>

#include "gapsafe/design_matrix.hpp"

namespace gapsafe {

/// Lasso instance: min_b 0.5 ||X b - y||^2 + lambda ||b||_1.
///
/// X' y, its sup-norm lambda_max and argmax j_star are cached at
/// construction and shared by every problem derived through with_lambda().
/// Requires 0 < lambda <= lambda_max.
class LassoProblem {
 public:
  LassoProblem(DesignMatrix X, Vector y, double lambda);

  LassoProblem with_lambda(double lambda) const;

  const DesignMatrix& X() const noexcept { return data_->X; }
  std::span<const double> y() const noexcept { return data_->y; }
  double lambda() const noexcept { return lambda_; }
  double lambda_max() const noexcept { return data_->lambda_max; }
  Index j_star() const noexcept { return data_->j_star; }
  double y_norm_sq() const noexcept { return data_->y_norm_sq; }
  // x_j' y for every column.
  std::span<const double> xty() const noexcept { return data_->xty; }

  Index n() const noexcept { return data_->X.rows(); }
  Index p() const noexcept { return data_->X.cols(); }

 private:
  struct Data {
    DesignMatrix X;
    Vector y;
    Vector xty;
    double lambda_max = 0.0;
    Index j_star = 0;
    double y_norm_sq = 0.0;
  };
  LassoProblem(std::shared_ptr<const Data> data, double lambda);
  static void check_lambda(double lambda, double lambda_max);

  std::shared_ptr<const Data> data_;
  double lambda_ = 0.0;
};

/// A point of the dual feasible set {theta : |x_j' theta| <= 1}.
struct DualPoint {
  Vector theta;
  // 1 - ||X' theta||_inf, over the columns the point was checked against.
  double feasibility_margin = 1.0;
  // Set when built from a zero residual (interpolating primal iterate).
  bool interpolating = false;
};

struct GapCertificate {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

// Wraps an arbitrary theta, measuring its margin over all columns.
DualPoint make_dual_point(const LassoProblem& prob, Vector theta);

// y - X beta.
Vector residual_of(const LassoProblem& prob, std::span<const double> beta);

double primal_value(const LassoProblem& prob, std::span<const double> beta,
                    std::optional<std::span<const double>> residual = std::nullopt);

double dual_value(const LassoProblem& prob, const DualPoint& theta);

GapCertificate duality_gap(const LassoProblem& prob, std::span<const double> beta,
                           const DualPoint& theta,
                           std::optional<std::span<const double>> residual = std::nullopt);

/// Rescales a residual into the dual feasible set:
/// theta = a * rho, a = clip(y'rho / (lambda ||rho||^2), +-1/||X' rho||_inf).
/// With `restrict_to` the sup-norm runs over those columns only, which is
/// exact whenever they form a safe active set.
DualPoint dual_scale(const LassoProblem& prob, std::span<const double> residual,
                     std::optional<std::span<const Index>> restrict_to = std::nullopt);

// Same, with ||X' rho||_inf already known.
DualPoint dual_scale_with_sup(const LassoProblem& prob, std::span<const double> residual,
                              double sup_correlation);

/// Geometric grid lambda_t = lambda_max * 10^(-delta t / (T - 1)), t < T.
Vector lambda_grid(double lambda_max, std::size_t count, double delta);

/// Values of lambda / lambda_max at or below which the static sphere
/// (`static_rule`) and the dynamic sphere (`dynamic_rule`) cannot screen
/// any column. Zero-norm columns are ignored.
struct UselessThresholds {
  double static_rule = 1.0;
  double dynamic_rule = 1.0;
};
UselessThresholds static_useless_threshold(const LassoProblem& prob);

double l1_norm(std::span<const double> v);
double squared_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace gapsafe
