#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gapsafe/problem.hpp"

namespace gapsafe {

enum class Rule { None, Static, Dynamic, ST3, GapSphere, GapDome };

std::string_view to_string(Rule rule) noexcept;
// Accepts the names produced by to_string, case-insensitively.
std::optional<Rule> parse_rule(std::string_view name) noexcept;
inline constexpr Rule kAllRules[] = {Rule::None,    Rule::Static,    Rule::Dynamic,
                                     Rule::ST3,     Rule::GapSphere, Rule::GapDome};

struct CheckpointRecord {
  std::size_t pass = 0;      // passes completed before this checkpoint
  std::size_t n_active = 0;  // active set size after screening
  double gap = 0.0;
  double radius = 0.0;
  double elapsed_ms = 0.0;   // since the start of the solve
};

/// Everything a checkpoint saw, handed to SolverConfig::on_checkpoint.
/// `beta` and `residual` are the iterate the dual point was computed from,
/// i.e. before screened coordinates were zeroed.
struct CheckpointView {
  const LassoProblem& problem;
  std::span<const double> beta;
  std::span<const double> residual;
  const DualPoint& theta;
  std::span<const Index> active_before;
  std::span<const Index> active_after;
  const GapCertificate& certificate;
  std::size_t pass;
};

struct SolverConfig {
  double epsilon = 1e-6;          // target duality gap
  std::size_t max_passes = 10000; // K
  std::size_t screen_every = 10;  // f
  Rule rule = Rule::GapSphere;
  double screen_tol = 1e-10;      // screen j when mu_j < 1 - screen_tol; guards ties at mu = 1
  std::size_t resync_every = 100; // passes between residual recomputations
  std::function<void(const CheckpointView&)> on_checkpoint;

  void validate() const;
};

struct SolverState {
  Vector beta;
  Vector residual;            // y - X beta
  std::vector<Index> active;  // sorted
  DualPoint theta;
  GapCertificate cert;
  std::size_t passes_done = 0;
  std::vector<CheckpointRecord> screen_trace;
};

struct SolveResult {
  Vector beta;
  GapCertificate cert;
  SolverState state;
  bool converged = false;
};

// sign(x) * max(|x| - u, 0).
double soft_threshold(double u, double x) noexcept;

// One cyclic pass over `order`; updates beta and residual in place.
void cd_pass(SolverState& state, const LassoProblem& prob, std::span<const Index> order);

/// Coordinate descent with dynamic safe screening. Every `screen_every`
/// passes (starting before the first one) a dual point is built from the
/// residual, the rule's safe region screens the active set, and the solve
/// stops once the duality gap is at most `epsilon`.
///
/// `initial_active`, when given, must be a safe active set for this lambda
/// (e.g. from a sequential screen); coordinates outside it start at zero.
SolveResult solve(const LassoProblem& prob, const SolverConfig& config,
                  std::optional<std::span<const double>> warm_beta = std::nullopt,
                  std::optional<std::span<const Index>> initial_active = std::nullopt);

}  // namespace gapsafe
