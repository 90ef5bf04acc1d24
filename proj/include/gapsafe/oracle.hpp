#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gapsafe/cd_solver.hpp"
#include "gapsafe/problem.hpp"
#include "gapsafe/safe_regions.hpp"

namespace gapsafe {

struct ReferenceOptions {
  double target_gap = 1e-12;
  double kkt_tol = 1e-8;
  double equicorrelation_tol = 1e-6;
  std::size_t max_sweeps = 20000;  // full passes over every column
  bool reverse_order = false;      // sweep columns from p-1 down to 0
};

/// High-accuracy Lasso solution computed without any screening.
struct ReferenceSolution {
  double lambda = 0.0;
  Vector beta_hat;
  Vector theta_hat;     // (y - X beta_hat) / lambda
  Vector correlations;  // x_j' theta_hat
  double gap = 0.0;     // at beta_hat and the feasible rescaling of theta_hat
  std::vector<Index> equicorrelation;
  double kkt_residual = 0.0;
  std::size_t sweeps = 0;
};

/// Plain cyclic coordinate descent on a dense copy of X, run until the gap
/// and the KKT residual both meet their targets. Throws OracleFailure when
/// the sweep budget runs out first.
ReferenceSolution reference_solve(const LassoProblem& prob, const ReferenceOptions& opts = {});

// {j : |x_j' theta_hat| >= 1 - tol}.
std::vector<Index> equicorrelation(const ReferenceSolution& sol, double tol);

// min over j outside E of 1 - |x_j' theta_hat| (infinity if E is everything).
double separation_margin(const ReferenceSolution& sol);

struct SafetyAudit {
  double containment_distance = 0.0;   // distance from theta_hat to the region
  std::vector<Index> screened;
  std::vector<Index> screened_nonzero; // screened with beta_hat_j != 0
  std::vector<Index> screened_tight;   // screened with |x_j' theta_hat| > 1 - 1e-9
  std::size_t n_screened = 0;
  std::size_t n_outside_equicorrelation = 0;

  bool safe(double containment_tol = 1e-9) const {
    return containment_distance <= containment_tol && screened_nonzero.empty() &&
           screened_tight.empty();
  }
};

SafetyAudit audit_safety(const Region& region, const ReferenceSolution& sol,
                         const DesignMatrix& X, double screen_tol = 0.0);

struct IdentificationReport {
  // Global checkpoint index (over the whole epsilon ladder) from which the
  // safe active set equals E and stays equal.
  std::optional<std::size_t> checkpoint;
  std::optional<std::size_t> pass;          // cumulative passes at that checkpoint
  std::optional<std::size_t> first_equal;   // first checkpoint with A == E
  std::size_t checkpoints = 0;
  std::vector<std::size_t> active_sizes;    // per checkpoint, after screening
  bool superset_everywhere = true;          // E contained in A at every checkpoint
};

/// Solves with `rule` through the epsilon ladder, each solve warm-started
/// (coefficients and active set) from the previous one, and records when
/// the safe active set first coincides with the equicorrelation set of `ref`.
IdentificationReport support_identification_pass(const LassoProblem& prob, Rule rule,
                                                 std::span<const double> eps_sequence,
                                                 const ReferenceSolution& ref,
                                                 SolverConfig base = {});

/// Post hoc thresholds on lambda / lambda_max below which the dynamic
/// sphere stops screening. `hard` needs ||theta_hat|| and is only available
/// once the problem is solved; `soft` = min_j |x_j' y| / lambda_max.
struct DynamicThresholds {
  double ratio = 0.0;  // lambda / lambda_max
  double hard = 0.0;
  double soft = 0.0;
};

DynamicThresholds dynamic_rule_thresholds(const LassoProblem& prob,
                                          const ReferenceSolution& sol);

}  // namespace gapsafe
