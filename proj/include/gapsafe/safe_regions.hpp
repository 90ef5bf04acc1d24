#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gapsafe/design_matrix.hpp"
#include "gapsafe/problem.hpp"

namespace gapsafe {

/// Ball B(center, radius) in the dual space.
struct Sphere {
  Vector center;
  double radius = 0.0;
};

/// Ball B(center, radius) cut by the half-space
/// {t : normal' t <= normal' center - ratio * radius}.
/// `center - ratio * radius * normal` is the projection of the center on the
/// cutting hyperplane; ratio = -1 keeps the whole ball, ratio = 0 a hemisphere.
struct Dome {
  Vector center;
  double radius = 0.0;
  double ratio = -1.0;
  Vector normal;  // unit length
};

using Region = std::variant<Sphere, Dome>;

/// Partition of the columns by a safe test. mu[j] is the test value of
/// column j; j is in zero_set iff mu[j] < 1 - tol.
struct ScreenResult {
  std::vector<Index> zero_set;
  std::vector<Index> active_set;
  Vector mu;
};

// Scalar kernels. Callers that already hold x'c, x'n and ||x|| (the solver
// keeps X' rho and X' y around) evaluate tests without touching X again.
double sphere_mu_from(double center_dot, double radius, double col_norm) noexcept;
double dome_support_from(double center_dot, double normal_dot, double col_norm,
                         double radius, double ratio) noexcept;
double dome_mu_from(double center_dot, double normal_dot, double col_norm,
                    double radius, double ratio) noexcept;

double sphere_mu(const Sphere& s, const DesignMatrix& X, Index j);
double dome_mu(const Dome& d, const DesignMatrix& X, Index j);
double region_mu(const Region& r, const DesignMatrix& X, Index j);

// sigma_C(x) = max_{t in C} x' t for an arbitrary direction x.
double support_function(const Region& r, std::span<const double> x);

ScreenResult screen(const Region& region, const DesignMatrix& X, double tol = 0.0);

// Columns of `candidates` that survive the test, in candidate order.
std::vector<Index> screen_columns(const Region& region, const DesignMatrix& X,
                                  std::span<const Index> candidates, double tol = 0.0);

// Euclidean distance from `point` to the region (0 inside).
double distance_to_region(const Region& region, std::span<const double> point);

// ||theta - y / lambda||.
double outer_radius(const LassoProblem& prob, const DualPoint& theta);
// (1/lambda) * sqrt((||y||^2 - ||X b - y||^2 - 2 lambda ||b||_1)_+).
double inner_radius(const LassoProblem& prob, std::span<const double> beta,
                    std::optional<std::span<const double>> residual = std::nullopt);

// B(y / lambda, |1/lambda - 1/lambda_max| ||y||).
Sphere region_static(const LassoProblem& prob);

// B(y / lambda, ||theta - y / lambda||).
Sphere region_dynamic(const LassoProblem& prob, const DualPoint& theta);

// Dynamic sphere intersected with the half-space of the most correlated
// column, enclosed in the ball centered at the projection of y / lambda on
// that half-space. `clamped` reports a negative radicand set to zero.
Sphere region_st3(const LassoProblem& prob, const DualPoint& theta,
                  bool* clamped = nullptr);

// B(theta_prev, |1/lambda_prev - 1/lambda| ||y||). Only safe when theta_prev
// is the exact dual optimum at lambda_prev.
Sphere region_seq_basic(const LassoProblem& prob, std::span<const double> theta_prev,
                        double lambda_prev);

// B(theta, sqrt(2 G(beta, theta)) / lambda).
Sphere region_gap_sphere(const LassoProblem& prob, std::span<const double> beta,
                         const DualPoint& theta,
                         std::optional<std::span<const double>> residual = std::nullopt);

// Dome with center (y/lambda + theta)/2, radius R/2, ratio 2 (r/R)^2 - 1 and
// normal (y/lambda - theta)/R, with R the outer and r the inner radius.
Dome region_gap_dome(const LassoProblem& prob, std::span<const double> beta,
                     const DualPoint& theta,
                     std::optional<std::span<const double>> residual = std::nullopt);

// sqrt(2 max(G, 0)) / lambda, throwing NumericalError when G is negative
// beyond rounding.
double gap_radius(double gap, double lambda, double scale);

}  // namespace gapsafe
