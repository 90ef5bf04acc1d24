#include "gapsafe/path.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "gapsafe/errors.hpp"
#include "gapsafe/safe_regions.hpp"

namespace gapsafe {

double sequential_radius_sq(const SequentialState& prev, double lambda_t) {
  if (!(lambda_t > 0.0)) throw ParameterError("lambda_t must be positive");
  if (lambda_t > prev.lambda) {
    throw ParameterError("sequential radius needs lambda_t <= lambda_{t-1}");
  }
  const double lp = prev.lambda;
  const double prev_sq = 2.0 * prev.gap / (lp * lp);
  const double fit = squared_norm(prev.residual) / (lambda_t * lambda_t);
  return (lp / lambda_t) * prev_sq + (1.0 - lambda_t / lp) * fit -
         (lp / lambda_t - 1.0) * squared_norm(prev.theta);
}

PathResult run_path(const DesignMatrix& X, const Vector& y, std::span<const double> grid,
                    const SolverConfig& config) {
  if (grid.empty()) throw ParameterError("empty lambda grid");
  const LassoProblem base(X, y, grid[0]);
  PathProblemFactory factory{[base](double lam) { return base.with_lambda(lam); }, true,
                             base.lambda_max()};
  return run_path(factory, grid, config);
}

namespace {

using Clock = std::chrono::steady_clock;

bool uses_sequential_screen(Rule rule) {
  return rule == Rule::GapSphere || rule == Rule::GapDome;
}

SequentialState seed_at_lambda_max(const LassoProblem& prob) {
  SequentialState s;
  const auto y = prob.y();
  s.beta.assign(prob.p(), 0.0);
  s.residual.assign(y.begin(), y.end());
  s.theta.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) s.theta[i] = y[i] / prob.lambda_max();
  s.lambda = prob.lambda_max();
  s.gap = 0.0;
  return s;
}

}  // namespace

PathResult run_path(const PathProblemFactory& factory, std::span<const double> grid,
                    const SolverConfig& config) {
  config.validate();
  if (grid.empty()) throw ParameterError("empty lambda grid");
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (!(grid[t] > 0.0)) throw ParameterError("lambda grid values must be positive");
    if (t > 0 && !(grid[t] < grid[t - 1])) {
      throw ParameterError("lambda grid must be strictly decreasing");
    }
  }

  PathResult out;
  std::optional<SequentialState> prev;

  for (double grid_lambda : grid) {
    const LassoProblem prob = factory.at(grid_lambda);
    const double lam = prob.lambda();
    const auto t0 = Clock::now();
    out.lambdas.push_back(grid_lambda);

    if (lam >= prob.lambda_max()) {
      // beta = 0 is optimal. The solve only contributes its screening trace.
      SolveResult r = solve(prob, config);
      SequentialState s = seed_at_lambda_max(prob);
      const double half_y = 0.5 * prob.y_norm_sq();
      out.betas.push_back(s.beta);
      out.certs.push_back(GapCertificate{half_y, half_y, 0.0});
      out.traces.push_back(std::move(r.state.screen_trace));
      out.converged.push_back(true);
      out.passes.push_back(r.state.passes_done);
      out.sequential.emplace_back();
      out.timings_ms.push_back(
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
      prev = std::move(s);
      continue;
    }
    if (!prev) prev = seed_at_lambda_max(prob);

    std::optional<std::vector<Index>> initial;
    SequentialScreen seq;
    if (uses_sequential_screen(config.rule)) {
      // The previous dual point is only known to be feasible on the columns
      // that were still active; rescale it against every column.
      DualPoint theta = make_dual_point(prob, prev->theta);
      const double sup = 1.0 - theta.feasibility_margin;
      const bool rescaled = sup > 1.0;
      if (rescaled) {
        for (double& v : theta.theta) v /= sup;
        theta.feasibility_margin = 0.0;
      }
      const Vector residual =
          factory.same_data ? prev->residual : residual_of(prob, prev->beta);
      const GapCertificate cert = duality_gap(prob, prev->beta, theta, residual);
      seq.performed = true;
      seq.radius_sq_direct = 2.0 * cert.gap / (lam * lam);
      seq.radius_sq_identity = std::numeric_limits<double>::quiet_NaN();
      if (factory.same_data) {
        SequentialState s = *prev;
        s.theta = theta.theta;
        if (rescaled) {
          s.gap = duality_gap(prob.with_lambda(prev->lambda), s.beta, theta, residual).gap;
        }
        seq.radius_sq_identity = sequential_radius_sq(s, lam);
      }

      const Region region =
          config.rule == Rule::GapSphere
              ? Region{region_gap_sphere(prob, prev->beta, theta, residual)}
              : Region{region_gap_dome(prob, prev->beta, theta, residual)};
      std::vector<Index> candidates;
      candidates.reserve(prob.p());
      for (Index j = 0; j < prob.p(); ++j) {
        if (!prob.X().is_zero_column(j)) candidates.push_back(j);
      }
      initial = screen_columns(region, prob.X(), candidates, config.screen_tol);
      seq.n_active = initial->size();
    }

    SolveResult r = initial ? solve(prob, config, prev->beta, std::span<const Index>(*initial))
                            : solve(prob, config, prev->beta);
    out.timings_ms.push_back(
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count());

    prev = SequentialState{r.beta, r.state.theta.theta, r.state.residual, lam, r.cert.gap};
    out.betas.push_back(std::move(r.beta));
    out.certs.push_back(r.cert);
    out.traces.push_back(std::move(r.state.screen_trace));
    out.converged.push_back(r.converged);
    out.passes.push_back(r.state.passes_done);
    out.sequential.push_back(seq);
  }
  return out;
}

}  // namespace gapsafe
