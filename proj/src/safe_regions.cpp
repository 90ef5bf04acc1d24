#include "gapsafe/safe_regions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapsafe/errors.hpp"

namespace gapsafe {

namespace {

constexpr double kGapTol = 1e-10;

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

Vector scaled_y(const LassoProblem& prob) {
  Vector out(prob.y().begin(), prob.y().end());
  const double inv = 1.0 / prob.lambda();
  for (double& v : out) v *= inv;
  return out;
}

void check_theta(const LassoProblem& prob, const DualPoint& theta) {
  if (theta.theta.size() != prob.n()) throw ParameterError("dual point has wrong length");
  if (theta.feasibility_margin < -1e-9) {
    throw ContractViolation("safe region requested from an infeasible dual point");
  }
}

}  // namespace

double sphere_mu_from(double center_dot, double radius, double col_norm) noexcept {
  return std::abs(center_dot) + radius * col_norm;
}

double dome_support_from(double center_dot, double normal_dot, double col_norm,
                         double radius, double ratio) noexcept {
  if (normal_dot < -ratio * col_norm) {
    return center_dot + radius * col_norm;
  }
  const double tangential = std::max(col_norm * col_norm - normal_dot * normal_dot, 0.0);
  const double shrink = std::max(1.0 - ratio * ratio, 0.0);
  return center_dot - radius * ratio * normal_dot + radius * std::sqrt(tangential * shrink);
}

double dome_mu_from(double center_dot, double normal_dot, double col_norm, double radius,
                    double ratio) noexcept {
  return std::max(dome_support_from(center_dot, normal_dot, col_norm, radius, ratio),
                  dome_support_from(-center_dot, -normal_dot, col_norm, radius, ratio));
}

double sphere_mu(const Sphere& s, const DesignMatrix& X, Index j) {
  return sphere_mu_from(X.col_dot(j, s.center), s.radius, X.col_norm(j));
}

double dome_mu(const Dome& d, const DesignMatrix& X, Index j) {
  return dome_mu_from(X.col_dot(j, d.center), X.col_dot(j, d.normal), X.col_norm(j),
                      d.radius, d.ratio);
}

double region_mu(const Region& r, const DesignMatrix& X, Index j) {
  return std::visit(Overloaded{[&](const Sphere& s) { return sphere_mu(s, X, j); },
                               [&](const Dome& d) { return dome_mu(d, X, j); }},
                    r);
}

double support_function(const Region& r, std::span<const double> x) {
  return std::visit(
      Overloaded{[&](const Sphere& s) { return dot(s.center, x) + s.radius * norm(x); },
                 [&](const Dome& d) {
                   return dome_support_from(dot(d.center, x), dot(d.normal, x), norm(x),
                                            d.radius, d.ratio);
                 }},
      r);
}

ScreenResult screen(const Region& region, const DesignMatrix& X, double tol) {
  ScreenResult out;
  out.mu.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    out.mu[j] = region_mu(region, X, j);
    (out.mu[j] < 1.0 - tol ? out.zero_set : out.active_set).push_back(j);
  }
  return out;
}

std::vector<Index> screen_columns(const Region& region, const DesignMatrix& X,
                                  std::span<const Index> candidates, double tol) {
  std::vector<Index> kept;
  kept.reserve(candidates.size());
  for (Index j : candidates) {
    if (region_mu(region, X, j) >= 1.0 - tol) kept.push_back(j);
  }
  return kept;
}

double distance_to_region(const Region& region, std::span<const double> point) {
  const auto dist = [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  return std::visit(
      Overloaded{
          [&](const Sphere& s) {
            if (s.center.size() != point.size()) throw ParameterError("dimension mismatch");
            return std::max(0.0, dist(point, s.center) - s.radius);
          },
          [&](const Dome& d) {
            if (d.center.size() != point.size()) throw ParameterError("dimension mismatch");
            const std::size_t n = point.size();
            const double offset = dot(d.normal, d.center) - d.ratio * d.radius;
            const double to_center = dist(point, d.center);
            const double side = dot(d.normal, point) - offset;
            const bool in_ball = to_center <= d.radius;
            const bool in_half = side <= 0.0;
            if (in_ball && in_half) return 0.0;

            // Projection onto the ball alone.
            if (!in_ball) {
              Vector pb(n);
              for (std::size_t i = 0; i < n; ++i) {
                pb[i] = d.center[i] + d.radius * (point[i] - d.center[i]) / to_center;
              }
              if (dot(d.normal, pb) - offset <= 0.0) return to_center - d.radius;
            }
            // Projection onto the half-space alone.
            if (!in_half) {
              Vector ph(n);
              for (std::size_t i = 0; i < n; ++i) ph[i] = point[i] - side * d.normal[i];
              if (dist(ph, d.center) <= d.radius) return side;
            }
            // Both constraints active: project onto the cap disk.
            Vector q(n), zp(n);
            for (std::size_t i = 0; i < n; ++i) {
              q[i] = d.center[i] - d.ratio * d.radius * d.normal[i];
              zp[i] = point[i] - side * d.normal[i];
            }
            const double disk_r = d.radius * std::sqrt(std::max(0.0, 1.0 - d.ratio * d.ratio));
            const double in_plane = dist(zp, q);
            if (in_plane > disk_r) {
              for (std::size_t i = 0; i < n; ++i) {
                zp[i] = q[i] + disk_r * (zp[i] - q[i]) / in_plane;
              }
            }
            return dist(point, zp);
          }},
      region);
}

double gap_radius(double gap, double lambda, double scale) {
  if (gap < -kGapTol * std::max(1.0, std::abs(scale))) {
    throw NumericalError("negative duality gap " + std::to_string(gap) +
                         ": weak duality violated beyond rounding");
  }
  return std::sqrt(2.0 * std::max(gap, 0.0)) / lambda;
}

double outer_radius(const LassoProblem& prob, const DualPoint& theta) {
  check_theta(prob, theta);
  const double lam = prob.lambda();
  const auto y = prob.y();
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = theta.theta[i] - y[i] / lam;
    s += e * e;
  }
  return std::sqrt(s);
}

double inner_radius(const LassoProblem& prob, std::span<const double> beta,
                    std::optional<std::span<const double>> residual) {
  const double lam = prob.lambda();
  // ||y||^2 - ||X b - y||^2 - 2 lambda ||b||_1 == ||y||^2 - 2 P(b)
  const double radicand = prob.y_norm_sq() - 2.0 * primal_value(prob, beta, residual);
  return std::sqrt(std::max(radicand, 0.0)) / lam;
}

Sphere region_static(const LassoProblem& prob) {
  const double r =
      std::abs(1.0 / prob.lambda() - 1.0 / prob.lambda_max()) * std::sqrt(prob.y_norm_sq());
  return Sphere{scaled_y(prob), r};
}

Sphere region_dynamic(const LassoProblem& prob, const DualPoint& theta) {
  const double r = outer_radius(prob, theta);
  return Sphere{scaled_y(prob), r};
}

Sphere region_st3(const LassoProblem& prob, const DualPoint& theta, bool* clamped) {
  const double big_r = outer_radius(prob, theta);
  const Index js = prob.j_star();
  const double xs_norm_sq = prob.X().col_norm_sq(js);
  const double excess = std::max(prob.lambda_max() / prob.lambda() - 1.0, 0.0);
  const double sign = prob.xty()[js] >= 0.0 ? 1.0 : -1.0;

  Sphere s{scaled_y(prob), 0.0};
  const double step = sign * excess / xs_norm_sq;
  if (step != 0.0) prob.X().axpy_col(js, -step, s.center);

  const double dist = excess / std::sqrt(xs_norm_sq);
  const double radicand = big_r * big_r - dist * dist;
  if (clamped) *clamped = radicand < 0.0;
  s.radius = std::sqrt(std::max(radicand, 0.0));
  return s;
}

Sphere region_seq_basic(const LassoProblem& prob, std::span<const double> theta_prev,
                        double lambda_prev) {
  if (theta_prev.size() != prob.n()) throw ParameterError("dual point has wrong length");
  if (!(lambda_prev > 0.0)) throw ParameterError("previous lambda must be positive");
  const double r =
      std::abs(1.0 / lambda_prev - 1.0 / prob.lambda()) * std::sqrt(prob.y_norm_sq());
  return Sphere{Vector(theta_prev.begin(), theta_prev.end()), r};
}

Sphere region_gap_sphere(const LassoProblem& prob, std::span<const double> beta,
                         const DualPoint& theta,
                         std::optional<std::span<const double>> residual) {
  check_theta(prob, theta);
  const GapCertificate cert = duality_gap(prob, beta, theta, residual);
  return Sphere{theta.theta, gap_radius(cert.gap, prob.lambda(), cert.primal)};
}

Dome region_gap_dome(const LassoProblem& prob, std::span<const double> beta,
                     const DualPoint& theta,
                     std::optional<std::span<const double>> residual) {
  check_theta(prob, theta);
  const std::size_t n = prob.n();
  const double big_r = outer_radius(prob, theta);
  if (big_r == 0.0) {
    Vector e0(n, 0.0);
    e0[0] = 1.0;
    return Dome{theta.theta, 0.0, -1.0, std::move(e0)};
  }
  const GapCertificate cert = duality_gap(prob, beta, theta, residual);
  gap_radius(cert.gap, prob.lambda(), cert.primal);  // throws on inconsistency
  const double small_r = std::min(inner_radius(prob, beta, residual), big_r);

  const double lam = prob.lambda();
  const auto y = prob.y();
  Dome d;
  d.center.resize(n);
  d.normal.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.center[i] = 0.5 * (y[i] / lam + theta.theta[i]);
    d.normal[i] = (y[i] / lam - theta.theta[i]) / big_r;
  }
  d.radius = 0.5 * big_r;
  const double q = small_r / big_r;
  d.ratio = std::clamp(2.0 * q * q - 1.0, -1.0, 1.0);
  return d;
}

}  // namespace gapsafe
