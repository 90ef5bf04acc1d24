#pragma once

#include <span>

#include "gapsafe/cd_solver.hpp"
#include "gapsafe/path.hpp"
#include "gapsafe/problem.hpp"

namespace gapsafe {

/// min_b 0.5 ||X b - y||^2 + lambda alpha_mix ||b||_1
///       + 0.5 lambda (1 - alpha_mix) ||b||_2^2
///
/// alpha_mix is the l1 fraction, in (0, 1].
struct ElasticNetProblem {
  DesignMatrix X;
  Vector y;
  double lambda = 0.0;
  double alpha_mix = 1.0;

  void validate() const;
};

/// The equivalent Lasso on [X; sqrt((1 - alpha_mix) lambda) I] and [y; 0]
/// with penalty lambda * alpha_mix. The extra rows are never stored.
LassoProblem to_lasso(const ElasticNetProblem& en);

double elastic_net_objective(const ElasticNetProblem& en, std::span<const double> beta);

// Largest violation of the subgradient optimality conditions at beta.
double elastic_net_kkt_residual(const ElasticNetProblem& en, std::span<const double> beta);

// Smallest lambda with beta = 0 optimal: ||X' y||_inf / alpha_mix.
double elastic_net_lambda_max(const DesignMatrix& X, std::span<const double> y,
                              double alpha_mix);

/// Path over `grid` (values of the Elastic-Net lambda), each point solved
/// through to_lasso(). With alpha_mix = 1 the augmented problem is the same
/// for every lambda and the path reproduces run_path exactly.
PathResult run_elastic_net_path(const DesignMatrix& X, const Vector& y, double alpha_mix,
                                std::span<const double> grid, const SolverConfig& config);

}  // namespace gapsafe
