#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gapsafe/cd_solver.hpp"
#include "gapsafe/problem.hpp"

namespace gapsafe {

/// A primal/dual pair certified at `lambda`, used to seed screening at the
/// next grid value.
struct SequentialState {
  Vector beta;
  Vector theta;     // dual feasible at `lambda`
  Vector residual;  // y - X beta
  double lambda = 0.0;
  double gap = 0.0; // G_lambda(beta, theta)
};

/// Squared GAP SAFE radius 2 G_{lambda_t}(beta, theta) / lambda_t^2 obtained
/// from the previous gap without re-evaluating the objectives:
///   (l_prev / l_t) r_prev^2 + (1 - l_t / l_prev) ||rho / l_t||^2
///     - (l_prev / l_t - 1) ||theta||^2.
double sequential_radius_sq(const SequentialState& prev, double lambda_t);

/// What the sequential screen did at one grid point.
struct SequentialScreen {
  bool performed = false;
  double radius_sq_direct = 0.0;    // 2 G / lambda^2 from the objectives
  double radius_sq_identity = 0.0;  // same through sequential_radius_sq (NaN if not applicable)
  std::size_t n_active = 0;         // survivors handed to the solver
};

struct PathResult {
  Vector lambdas;
  std::vector<Vector> betas;
  std::vector<GapCertificate> certs;
  std::vector<std::vector<CheckpointRecord>> traces;
  std::vector<double> timings_ms;
  std::vector<bool> converged;
  std::vector<std::size_t> passes;
  std::vector<SequentialScreen> sequential;
};

/// Lasso path over a strictly decreasing grid with lambda_0 <= lambda_max.
/// Coefficients are warm-started from the previous grid point. For the GAP
/// SAFE rules, the previous (beta, theta) pair also yields a safe region at
/// the new lambda that screens before the first coordinate pass.
PathResult run_path(const DesignMatrix& X, const Vector& y, std::span<const double> grid,
                    const SolverConfig& config);

// Builds the problem solved at each grid value. `same_data` tells the runner
// whether X and y are identical across the path (enables the identity
// cross-check of the sequential radius).
struct PathProblemFactory {
  std::function<LassoProblem(double)> at;
  bool same_data = true;
  double lambda_max = 0.0;
};

PathResult run_path(const PathProblemFactory& factory, std::span<const double> grid,
                    const SolverConfig& config);

}  // namespace gapsafe
