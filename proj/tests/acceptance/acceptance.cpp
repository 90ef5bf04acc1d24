// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "CLI11.hpp"
#include "gapsafe/cd_solver.hpp"
#include "gapsafe/dataset.hpp"
#include "gapsafe/elastic_net.hpp"
#include "gapsafe/errors.hpp"
#include "gapsafe/oracle.hpp"
#include "gapsafe/path.hpp"
#include "gapsafe/problem.hpp"
#include "gapsafe/safe_regions.hpp"
#include "instances.hpp"

namespace {

using namespace gapsafe;
using testsupport::Rng;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vector perturbed(Rng& rng, const Vector& v, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Vector out = v;
  for (double& x : out) x += g(rng);
  return out;
}

Vector iterate_after(const LassoProblem& prob, std::size_t passes) {
  SolverConfig c;
  c.rule = Rule::None;
  c.max_passes = passes;
  c.epsilon = 1e-300;
  return solve(prob, c).beta;
}

// 1. Every region contains theta_hat and screens only inactive columns.
Outcome safety_suite() {
  Rng rng(1001);
  const auto t0 = Clock::now();
  std::size_t audited = 0, oracle_failures = 0, regions = 0, solver_runs = 0;
  std::size_t violations = 0, n_sparse = 0, exact_unsafe = 0;
  double worst_distance = 0.0, lo_ratio = 1.0;
  // Regions screen at the solver's threshold 1 - tol; threshold 1 is reported.
  const double tol = SolverConfig{}.screen_tol;
  std::string first;

  auto note = [&](const std::string& what) {
    ++violations;
    if (first.empty()) first = what;
  };

  while (audited < 200 && audited + oracle_failures < 400) {
    const auto inst = testsupport::random_instance(rng, 10, 100, 20, 500, 1e-3);
    const LassoProblem prob = inst.problem();
    const double lam_prev = std::min(prob.lambda() * 1.25, prob.lambda_max());
    ReferenceSolution ref, prev;
    try {
      ref = reference_solve(prob);
      prev = reference_solve(prob.with_lambda(lam_prev));
    } catch (const OracleFailure&) {
      ++oracle_failures;
      continue;
    }
    ++audited;
    n_sparse += prob.X().is_sparse() ? 1 : 0;
    lo_ratio = std::min(lo_ratio, inst.ratio);

    std::vector<Vector> iterates{Vector(prob.p(), 0.0), iterate_after(prob, 1),
                                 iterate_after(prob, 10), perturbed(rng, ref.beta_hat, 1e-3),
                                 ref.beta_hat};
    for (const Vector& beta : iterates) {
      const Vector rho = residual_of(prob, beta);
      const DualPoint theta = dual_scale(prob, rho);
      const std::vector<std::pair<const char*, Region>> built{
          {"static", region_static(prob)},
          {"dynamic", region_dynamic(prob, theta)},
          {"st3", region_st3(prob, theta)},
          {"seq_basic", region_seq_basic(prob, prev.theta_hat, lam_prev)},
          {"gap_sphere", region_gap_sphere(prob, beta, theta, rho)},
          {"gap_dome", region_gap_dome(prob, beta, theta, rho)}};
      for (const auto& [name, region] : built) {
        ++regions;
        const SafetyAudit a = audit_safety(region, ref, prob.X(), tol);
        exact_unsafe += audit_safety(region, ref, prob.X()).safe() ? 0 : 1;
        worst_distance = std::max(worst_distance, a.containment_distance);
        if (!a.safe()) {
          note(fmt("%s region unsafe on instance %zu (distance %.3g, %zu nonzero, %zu tight)",
                   name, audited, a.containment_distance, a.screened_nonzero.size(),
                   a.screened_tight.size()));
        }
      }
    }

    for (Rule rule : kAllRules) {
      SolverConfig c;
      c.rule = rule;
      c.epsilon = 1e-8;
      const SolveResult r = solve(prob, c);
      ++solver_runs;
      std::vector<char> active(prob.p(), 0);
      for (Index j : r.state.active) active[j] = 1;
      for (Index j = 0; j < prob.p(); ++j) {
        if (active[j]) continue;
        if (ref.beta_hat[j] != 0.0 || std::abs(ref.correlations[j]) > 1.0 - 1e-9) {
          note(fmt("solver with %s screened column %zu (beta_hat %.3g, |x'theta_hat| %.12f)",
                   std::string(to_string(rule)).c_str(), j, ref.beta_hat[j],
                   std::abs(ref.correlations[j])));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = audited >= 200 && violations == 0 && secs <= 300.0;
  o.detail = fmt("%zu instances (%zu sparse, lowest lambda/lambda_max %.2e), %zu regions "
                 "screened at 1 - %.0e, %zu solver runs, %zu violations (%zu regions unsafe "
                 "when screened at threshold 1), max containment distance %.2e, "
                 "%zu oracle failures replaced, %.1f s",
                 audited, n_sparse, lo_ratio, regions, tol, solver_runs, violations,
                 exact_unsafe, worst_distance, oracle_failures, secs);
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// 2. Sequential radius identity against a direct gap evaluation.
Outcome sequential_identity() {
  Rng rng(1002);
  std::uniform_real_distribution<double> u(0.05, 0.999);
  std::size_t failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = testsupport::random_instance(rng, 3, 30, 3, 60, 1e-3);
    const LassoProblem prev = inst.problem();
    const LassoProblem cur = prev.with_lambda(prev.lambda() * u(rng));
    const Vector beta = testsupport::random_vector(rng, prev.p(), trial % 2 ? 0.05 : 1.0);
    const DualPoint theta = testsupport::random_feasible_theta(rng, prev);
    SequentialState s;
    s.beta = beta;
    s.theta = theta.theta;
    s.residual = residual_of(prev, beta);
    s.lambda = prev.lambda();
    s.gap = testsupport::direct_gap(prev, beta, theta.theta);
    const double got = sequential_radius_sq(s, cur.lambda());
    const double want =
        2.0 * testsupport::direct_gap(cur, beta, theta.theta) / (cur.lambda() * cur.lambda());
    const double rel = std::abs(got - want) / std::abs(want);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-10)) ++failures;
  }
  return {failures == 0,
          fmt("1000 tuples, %zu failures, max relative error %.2e", failures, worst)};
}

// 3. Annulus bound on random feasible pairs; GAP radius at oracle pairs.
Outcome gap_radius_bounds() {
  Rng rng(1003);
  std::size_t failures = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = testsupport::random_instance(rng, 3, 40, 3, 80, 1e-3);
    const LassoProblem prob = inst.problem();
    const Vector beta = testsupport::random_vector(rng, prob.p(), trial % 3 ? 0.02 : 0.5);
    const DualPoint theta = testsupport::random_feasible_theta(rng, prob);
    const double R = outer_radius(prob, theta);
    const double r = inner_radius(prob, beta);
    const double g = duality_gap(prob, beta, theta).gap;
    const double lhs = std::sqrt(std::max(R * R - r * r, 0.0));
    const double rhs = std::sqrt(2.0 * std::max(g, 0.0)) / prob.lambda();
    worst_excess = std::max(worst_excess, lhs - rhs);
    if (!(lhs <= rhs + 1e-12)) ++failures;
  }

  // Oracle pairs are certified at gap <= 1e-12. The absolute 1e-5 bound follows
  // from that only when lambda >= sqrt(2e-12) / 1e-5.
  const double lambda_floor = std::sqrt(2e-12) / 1e-5;
  std::size_t oracle_pairs = 0, radius_failures = 0, oracle_failures = 0;
  std::size_t formula_failures = 0, small_lambda_pairs = 0, small_lambda_failures = 0;
  double worst_radius = 0.0, worst_vs_bound = 0.0;
  while (oracle_pairs < 100 && oracle_pairs + oracle_failures < 200) {
    const auto inst = testsupport::random_instance(rng, 10, 50, 20, 150, 1e-3);
    const LassoProblem prob = inst.problem();
    ReferenceSolution ref;
    try {
      ref = reference_solve(prob);
    } catch (const OracleFailure&) {
      ++oracle_failures;
      continue;
    }
    ++oracle_pairs;
    const Vector rho = residual_of(prob, ref.beta_hat);
    const Sphere s = region_gap_sphere(prob, ref.beta_hat, dual_scale(prob, rho), rho);
    const double bound = std::sqrt(2e-12) / prob.lambda();
    worst_radius = std::max(worst_radius, s.radius);
    worst_vs_bound = std::max(worst_vs_bound, s.radius / bound);
    const bool small = prob.lambda() < lambda_floor;
    small_lambda_pairs += small ? 1 : 0;
    if (!(s.radius <= bound)) ++formula_failures;
    if (!(s.radius <= 1e-5)) {
      ++radius_failures;
      small_lambda_failures += small ? 1 : 0;
    }
  }
  return {failures == 0 && radius_failures == 0 && formula_failures == 0,
          fmt("1000 pairs, %zu bound failures (max lhs - rhs %.2e); %zu oracle pairs: "
              "%zu above sqrt(2e-12)/lambda (max ratio %.3f), %zu above 1e-5 (max radius "
              "%.2e), %zu of those with lambda < %.3f (%zu pairs in that range); "
              "%zu oracle failures replaced",
              failures, worst_excess, oracle_pairs, formula_failures, worst_vs_bound,
              radius_failures, worst_radius, small_lambda_failures, lambda_floor,
              small_lambda_pairs, oracle_failures)};
}

LassoProblem separated_instance(Rng& rng, ReferenceSolution& ref) {
  while (true) {
    const DesignMatrix X = testsupport::random_matrix(rng, 30, 100, 1.0, false);
    const Vector y = testsupport::random_vector(rng, 30);
    const LassoProblem base(X, y, X.max_abs_correlation(y).value);
    const LassoProblem prob = base.with_lambda(base.lambda_max() / 3.0);
    try {
      ref = reference_solve(prob);
    } catch (const OracleFailure&) {
      continue;
    }
    if (separation_margin(ref) > 1e-4) return prob;
  }
}

// 4. GapSphere identifies the equicorrelation set; Static is idle below its
// threshold.
Outcome identification() {
  Rng rng(1004);
  const Vector ladder{1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12};
  std::size_t identified = 0, static_idle = 0, static_cases = 0;
  std::vector<std::size_t> when;
  for (int trial = 0; trial < 50; ++trial) {
    ReferenceSolution ref;
    const LassoProblem prob = separated_instance(rng, ref);
    const IdentificationReport rep =
        support_identification_pass(prob, Rule::GapSphere, ladder, ref);
    if (rep.checkpoint && rep.superset_everywhere) {
      ++identified;
      when.push_back(*rep.pass);
    }

    const double thr = static_useless_threshold(prob).static_rule;
    const LassoProblem low = prob.with_lambda(0.5 * thr * prob.lambda_max());
    ReferenceSolution low_ref;
    try {
      low_ref = reference_solve(low);
    } catch (const OracleFailure&) {
      continue;
    }
    ++static_cases;
    const IdentificationReport st = support_identification_pass(low, Rule::Static, ladder, low_ref);
    const bool idle = std::all_of(st.active_sizes.begin(), st.active_sizes.end(),
                                  [&](std::size_t a) { return a == low.p(); });
    static_idle += idle ? 1 : 0;
  }
  std::sort(when.begin(), when.end());
  const std::size_t median = when.empty() ? 0 : when[when.size() / 2];
  return {identified == 50 && static_idle == static_cases && static_cases > 0,
          fmt("GapSphere identified E on %zu/50 separated instances (median pass %zu); "
              "Static kept all p columns at every checkpoint on %zu/%zu instances below its "
              "threshold",
              identified, median, static_idle, static_cases)};
}

// 5. Dome versus sphere for the same GAP pair.
Outcome dome_dominance() {
  Rng rng(1005);
  std::size_t evaluations = 0, mu_violations = 0;
  double worst_mu = -std::numeric_limits<double>::infinity();
  while (evaluations < 100000) {
    const auto inst = testsupport::random_instance(rng, 5, 40, 20, 200, 1e-3);
    const LassoProblem prob = inst.problem();
    const Vector beta = testsupport::random_vector(rng, prob.p(), evaluations % 2 ? 0.01 : 0.3);
    const Vector rho = residual_of(prob, beta);
    const DualPoint theta = dual_scale(prob, rho);
    const Sphere s = region_gap_sphere(prob, beta, theta, rho);
    const Dome d = region_gap_dome(prob, beta, theta, rho);
    for (Index j = 0; j < prob.p(); ++j) {
      const double diff = dome_mu(d, prob.X(), j) - sphere_mu(s, prob.X(), j);
      worst_mu = std::max(worst_mu, diff);
      if (!(diff <= 0.0)) ++mu_violations;
      ++evaluations;
    }
  }

  // Zero-sets compared at the threshold the solver screens with, and at 0.
  const double tol = SolverConfig{}.screen_tol;
  std::size_t screenings = 0, set_violations = 0, exact_violations = 0;
  auto contains = [](const ScreenResult& big, const ScreenResult& small) {
    return std::includes(big.zero_set.begin(), big.zero_set.end(), small.zero_set.begin(),
                         small.zero_set.end());
  };
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = testsupport::random_instance(rng, 10, 60, 50, 300, 1e-3);
    const LassoProblem prob = inst.problem();
    SolverConfig c;
    c.rule = trial % 2 ? Rule::GapSphere : Rule::GapDome;
    c.epsilon = 1e-10;
    c.screen_every = 3;
    c.on_checkpoint = [&](const CheckpointView& v) {
      const Sphere s = region_gap_sphere(prob, v.beta, v.theta, v.residual);
      const Dome d = region_gap_dome(prob, v.beta, v.theta, v.residual);
      ++screenings;
      if (!contains(screen(d, prob.X(), tol), screen(s, prob.X(), tol))) ++set_violations;
      if (!contains(screen(d, prob.X()), screen(s, prob.X()))) ++exact_violations;
    };
    solve(prob, c);
  }

  std::size_t domes = 0, sampling_failures = 0;
  double worst_gap = 0.0, worst_over = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testsupport::random_instance(rng, 2, 12, 4, 20, 1e-2);
    const LassoProblem prob = inst.problem();
    const Vector beta = testsupport::random_vector(rng, prob.p(), 0.1);
    const Dome d = region_gap_dome(prob, beta, testsupport::random_feasible_theta(rng, prob));
    ++domes;
    for (Index j = 0; j < prob.p(); j += std::max<Index>(1, prob.p() / 3)) {
      Vector x(prob.n(), 0.0);
      prob.X().axpy_col(j, 1.0, x);
      for (double sign : {1.0, -1.0}) {
        for (double& v : x) v *= sign;
        const double closed = support_function(d, x);
        const double sampled = testsupport::sampled_dome_support(d, x, 200000);
        worst_gap = std::max(worst_gap, closed - sampled);
        worst_over = std::max(worst_over, sampled - closed);
        if (!(sampled <= closed + 1e-12) || !(closed - sampled <= 1e-6)) ++sampling_failures;
      }
    }
  }
  return {mu_violations == 0 && set_violations == 0 && sampling_failures == 0,
          fmt("%zu (region, column) pairs, %zu with mu_dome > mu_sphere (max diff %.2e); "
              "%zu screenings, %zu zero-set violations at the solver threshold 1 - %.0e "
              "(%zu at threshold 1); %zu domes vs 2-plane sampling, "
              "%zu failures (max closed - sampled %.2e, max sampled - closed %.2e)",
              evaluations, mu_violations, worst_mu, screenings, set_violations, tol,
              exact_violations, domes,
              sampling_failures, worst_gap, worst_over)};
}

// 6. Every rule certifies its solution and agrees with rule None.
Outcome solver_equivalence() {
  Rng rng(1006);
  std::size_t instances = 0, cert_failures = 0, agree_failures = 0, oracle_failures = 0;
  double worst_ratio = 0.0, worst_subopt = -std::numeric_limits<double>::infinity();
  while (instances < 100 && instances + oracle_failures < 200) {
    const auto inst = testsupport::random_instance(rng, 10, 50, 20, 200, 1e-2);
    const LassoProblem prob = inst.problem();
    ReferenceSolution ref;
    try {
      ref = reference_solve(prob);
    } catch (const OracleFailure&) {
      ++oracle_failures;
      continue;
    }
    ++instances;
    const double p_star = primal_value(prob, ref.beta_hat);
    SolverConfig c;
    c.epsilon = 1e-8;
    c.max_passes = 100000;
    c.rule = Rule::None;
    const Vector base = solve(prob, c).beta;
    for (Rule rule : kAllRules) {
      c.rule = rule;
      const SolveResult r = solve(prob, c);
      const double direct = testsupport::direct_gap(prob, r.beta, r.state.theta.theta);
      const double subopt = primal_value(prob, r.beta) - p_star;
      worst_subopt = std::max(worst_subopt, subopt);
      if (!r.converged || !(r.cert.gap <= c.epsilon) ||
          !(std::abs(direct - r.cert.gap) <= 1e-9 * std::max(1.0, r.cert.primal)) ||
          !(subopt <= c.epsilon + 1e-12 * std::max(1.0, p_star))) {
        ++cert_failures;
      }
      double diff = 0.0;
      for (Index j = 0; j < prob.p(); ++j) diff = std::max(diff, std::abs(r.beta[j] - base[j]));
      const double bound = 10.0 * c.epsilon / prob.lambda();
      worst_ratio = std::max(worst_ratio, diff / bound);
      if (!(diff <= bound)) ++agree_failures;
    }
  }
  return {instances == 100 && cert_failures == 0 && agree_failures == 0,
          fmt("%zu instances x 6 rules, %zu certificate failures (max P(beta) - P* %.2e), "
              "%zu agreement failures (max |beta - beta_none|_inf / (10 eps / lambda) %.3f), "
              "%zu oracle failures replaced",
              instances, cert_failures, worst_subopt, agree_failures, worst_ratio,
              oracle_failures)};
}

// 7. Screening proportions along a 100-point path.
Outcome screening_shape() {
  const auto t0 = Clock::now();
  const Dataset data = synth_dataset(100, 5000, 1.0, 10.0, 7);
  const LassoProblem base(data.X, data.y, data.X.max_abs_correlation(data.y).value);
  const Vector grid = lambda_grid(base.lambda_max(), 100, 3.0);
  const double static_thr = static_useless_threshold(base).static_rule;
  const std::size_t p = base.p();
  constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

  const std::vector<Rule> rules{Rule::GapSphere, Rule::Static, Rule::Dynamic, Rule::ST3};
  // screened_at[rule][t][j]: checkpoint pass at which j left the active set.
  std::vector<std::vector<std::vector<std::size_t>>> screened_at(
      rules.size(), std::vector<std::vector<std::size_t>>(grid.size(),
                                                         std::vector<std::size_t>(p, kNever)));
  std::vector<std::vector<std::size_t>> final_active(rules.size(),
                                                     std::vector<std::size_t>(grid.size(), p));
  std::size_t static_busy = 0, static_rows = 0, not_converged = 0;

  for (std::size_t r = 0; r < rules.size(); ++r) {
    SolverConfig c;
    c.rule = rules[r];
    c.epsilon = 1e-6;
    c.screen_every = 10;
    c.on_checkpoint = [&](const CheckpointView& v) {
      const auto it = std::find(grid.begin(), grid.end(), v.problem.lambda());
      const auto t = static_cast<std::size_t>(it - grid.begin());
      auto& at = screened_at[r][t];
      if (v.pass == 0) {
        std::vector<char> present(p, 0);
        for (Index j : v.active_before) present[j] = 1;
        for (Index j = 0; j < p; ++j) {
          if (!present[j]) at[j] = 0;
        }
      }
      std::size_t k = 0;
      for (Index j : v.active_before) {
        if (k < v.active_after.size() && v.active_after[k] == j) {
          ++k;
        } else if (at[j] == kNever) {
          at[j] = v.pass;
        }
      }
      final_active[r][t] = v.active_after.size();
      if (rules[r] == Rule::Static && grid[t] / base.lambda_max() < static_thr) {
        ++static_rows;
        if (v.active_after.size() != p) ++static_busy;
      }
    };
    const PathResult pr = run_path(data.X, data.y, grid, c);
    for (bool ok : pr.converged) not_converged += ok ? 0 : 1;
  }

  std::size_t superset_violations = 0;
  for (std::size_t r = 1; r < rules.size(); ++r) {
    for (std::size_t t = 0; t < grid.size(); ++t) {
      for (Index j = 0; j < p; ++j) {
        if (screened_at[r][t][j] != kNever && screened_at[0][t][j] > screened_at[r][t][j]) {
          ++superset_violations;
        }
      }
    }
  }
  std::size_t gs_positive = 0;
  for (std::size_t t = 0; t < grid.size(); ++t) gs_positive += final_active[0][t] < p ? 1 : 0;
  const double secs = seconds_since(t0);
  return {superset_violations == 0 && gs_positive >= 80 && static_busy == 0 && static_rows > 0,
          fmt("100x5000, T=100, delta=3, f=10, eps=1e-6: %zu (t, column, checkpoint) cases where "
              "another rule screened earlier than GapSphere; GapSphere screened a positive "
              "fraction at %zu/100 grid points; Static threshold lambda/lambda_max = %.4f, "
              "%zu/%zu Static checkpoints below it screened something; %zu non-converged "
              "entries; %.1f s",
              superset_violations, gs_positive, static_thr, static_busy, static_rows,
              not_converged, secs)};
}

// 8. Full-path wall-clock, GapSphere against no screening.
Outcome speedup() {
  const auto t0 = Clock::now();
  const Dataset data = synth_dataset(200, 20000, 0.01, 10.0, 1);
  const double lmax = data.X.max_abs_correlation(data.y).value;
  const Vector grid = lambda_grid(lmax, 100, 3.0);
  SolverConfig c;
  c.epsilon = 1e-8;
  c.screen_every = 10;
  double ms[2];
  std::size_t converged[2];
  const Rule rules[2] = {Rule::None, Rule::GapSphere};
  for (int k = 0; k < 2; ++k) {
    c.rule = rules[k];
    const auto s = Clock::now();
    const PathResult pr = run_path(data.X, data.y, grid, c);
    ms[k] = std::chrono::duration<double, std::milli>(Clock::now() - s).count();
    converged[k] = static_cast<std::size_t>(std::count(pr.converged.begin(), pr.converged.end(), true));
  }
  const double ratio = ms[1] / ms[0];
  const double secs = seconds_since(t0);
  return {ratio <= 0.6 && secs <= 900.0,
          fmt("200x20000 sparse (density 0.01), T=100, delta=3, eps=1e-8, K=%zu: none %.1f s "
              "(%zu/100 converged), gap_sphere %.1f s (%zu/100 converged), ratio %.3f "
              "(speedup %.1fx); criterion runtime %.1f s",
              c.max_passes, ms[0] / 1000.0, converged[0], ms[1] / 1000.0, converged[1], ratio,
              1.0 / ratio, secs)};
}

// 9. Elastic-Net through the augmented Lasso.
Outcome elastic_net() {
  Rng rng(1009);
  std::size_t solves = 0, kkt_failures = 0, not_converged = 0, paths = 0, path_mismatches = 0;
  double worst_kkt = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testsupport::random_instance(rng, 10, 50, 20, 150, 1e-2);
    for (double alpha : {0.3, 0.7, 1.0}) {
      ElasticNetProblem en{inst.X, inst.y, 0.0, alpha};
      en.lambda = inst.ratio * elastic_net_lambda_max(inst.X, inst.y, alpha);
      SolverConfig c;
      c.rule = trial % 2 ? Rule::GapSphere : Rule::GapDome;
      c.epsilon = 1e-10;
      c.max_passes = 200000;
      const SolveResult r = solve(to_lasso(en), c);
      ++solves;
      not_converged += r.converged ? 0 : 1;
      const double kkt = elastic_net_kkt_residual(en, r.beta);
      worst_kkt = std::max(worst_kkt, kkt);
      if (!(kkt <= 1e-8)) ++kkt_failures;
    }
    if (trial % 5 == 0) {
      const double lmax = inst.X.max_abs_correlation(inst.y).value;
      const Vector grid = lambda_grid(lmax, 20, 2.0);
      SolverConfig c;
      c.rule = Rule::GapDome;
      c.epsilon = 1e-8;
      const PathResult a = run_elastic_net_path(inst.X, inst.y, 1.0, grid, c);
      const PathResult b = run_path(inst.X, inst.y, grid, c);
      ++paths;
      bool same = a.betas.size() == b.betas.size();
      for (std::size_t t = 0; same && t < a.betas.size(); ++t) {
        same = a.betas[t] == b.betas[t] && a.certs[t].gap == b.certs[t].gap;
      }
      path_mismatches += same ? 0 : 1;
    }
  }
  return {kkt_failures == 0 && not_converged == 0 && path_mismatches == 0,
          fmt("%zu solves (alpha in {0.3, 0.7, 1}), %zu not converged, %zu with KKT residual "
              "> 1e-8 (max %.2e); %zu alpha=1 paths, %zu not bit-identical to the Lasso path",
              solves, not_converged, kkt_failures, worst_kkt, paths, path_mismatches)};
}

// 10. Every documented example is asserted by a unit test.
struct LedgerEntry {
  const char* binary;
  const char* test;
  const char* example;
};

const LedgerEntry kLedger[] = {
    {"design_matrix", "DesignMatrix.ColDotHandArithmetic", "col_dot on [[1,0],[0,2]] and zero v"},
    {"design_matrix", "DesignMatrix.SparseAgreesWithDensifiedOracle", "col_dot/axpy_col vs densified oracle"},
    {"design_matrix", "DesignMatrix.AxpyColHandArithmetic", "axpy_col hand values and a = 0"},
    {"design_matrix", "DesignMatrix.MaxAbsCorrelation", "max_abs_correlation with and without restriction"},
    {"oracle", "RestrictedArgmax.AgreesWithFullScanAtTheOptimum", "restricted argmax equals full scan on the safe active set"},
    {"problem", "PrimalValue.HandValues", "primal at beta = 0 and single-feature 1.5"},
    {"problem", "PrimalValue.CachedResidualMatchesRecompute", "primal vs from-scratch evaluation"},
    {"problem", "DualValue.HandValues", "dual at lambda_max, theta = 0 and 0.75"},
    {"problem", "DualityGap.HandValues", "gap 0 at lambda_max and 0.25"},
    {"problem", "DualityGap.WeakDualityOnRandomPairs", "gap >= 0 for feasible theta"},
    {"problem", "DualScale.HandValues", "dual_scale at lambda_max and clipped at lambda = 1"},
    {"problem", "DualScale.FixedPointAtOptimum", "theta = theta_hat at the optimum"},
    {"problem", "LambdaGrid.PowersOfTen", "grid (2, 0.2, 0.02, 0.002)"},
    {"problem", "LambdaGrid.ExperimentalGridIsGeometric", "T = 100, delta = 3 geometric grid"},
    {"problem", "UselessThresholds.OrthogonalDesign", "thresholds on X = I2 equal 1"},
    {"problem", "UselessThresholds.SingleCorrelatedFeature", "single column proportional to y"},
    {"problem", "UselessThresholds.StaticRuleScreensNothingBelowThreshold", "static screens nothing below its threshold"},
    {"safe_regions", "SphereMu.HandValues", "sphere mu 0.5 and point region"},
    {"safe_regions", "SphereMu.MatchesBoundarySampling", "sphere mu vs 1e5 boundary samples"},
    {"safe_regions", "DomeMu.Hemisphere", "hemisphere dome mu = 1"},
    {"safe_regions", "DomeMu.FullBallRatioMatchesSphere", "dome ratio -1 equals sphere"},
    {"safe_regions", "DomeMu.MatchesTwoPlaneSampling", "dome mu vs 2-plane sampling"},
    {"safe_regions", "Screen.PointRegionAtOrthogonalOptimum", "point region at orthogonal optimum screens nothing"},
    {"safe_regions", "Screen.HugeBallScreensNothing", "useless ball screens nothing"},
    {"safe_regions", "Screen.ZeroGapSphereAtLambdaMax", "zero-gap sphere at lambda_max screens all but j*"},
    {"safe_regions", "RegionStatic.HandValues", "static region at lambda_max and 0.70711"},
    {"safe_regions", "RegionDynamic.HandValues", "dynamic region at theta_hat and theta = 0"},
    {"safe_regions", "RegionSt3.HandValues", "ST3 center (1, 0.5), radius 0.5"},
    {"safe_regions", "RegionSt3.ReducesToDynamicAtLambdaMax", "ST3 equals dynamic at lambda_max"},
    {"safe_regions", "RegionSeqBasic.SameLambdaGivesPoint", "basic sequential radius 0 at equal lambdas"},
    {"safe_regions", "RegionSeqBasic.LargerThanGapSphereFromExactPair", "basic sequential radius exceeds GAP radius; containment"},
    {"safe_regions", "RegionGapSphere.HandValues", "GAP sphere radius 0.70711 and 0 at lambda_max"},
    {"safe_regions", "RegionGapDome.ZeroBetaGivesFullBall", "dome with beta = 0 is the full ball"},
    {"safe_regions", "RegionGapDome.PointAtLambdaMax", "dome is a point at lambda_max"},
    {"safe_regions", "SafeRegions.EveryConstructorContainsTheOptimum", "oracle containment for every constructor"},
    {"safe_regions", "SafeRegions.DomeInsideGapSphereAndScreensMore", "dome zero-set contains sphere zero-set"},
    {"cd_solver", "SoftThreshold.HandValues", "ST(1,2), ST(1,-0.5), ST(0,x)"},
    {"cd_solver", "CdPass.SingleFeatureIsExactInOnePass", "single feature exact in one pass"},
    {"cd_solver", "CdPass.OrthogonalDesignIsExactInOnePass", "orthogonal design exact in one pass"},
    {"cd_solver", "CdPass.PrimalNeverIncreases", "primal non-increasing over a pass"},
    {"cd_solver", "Solve.LambdaMaxNeedsNoPasses", "lambda_max: beta = 0, gap 0, 0 passes"},
    {"cd_solver", "Solve.OrthogonalDesignReachesEquicorrelationSet", "orthogonal GapSphere reaches E = {1, 2}"},
    {"cd_solver", "Solve.ScreeningDoesNotChangeTheSolution", "None vs GapSphere on 50x200 within 1e-6"},
    {"path", "SequentialRadius.ZeroPairCancels", "sequential identity with beta = 0, theta = 0"},
    {"path", "SequentialRadius.SameLambdaKeepsRadius", "sequential identity at equal lambdas"},
    {"path", "SequentialRadius.MatchesDirectGapOnRandomPairs", "sequential identity vs direct gap"},
    {"path", "SequentialRadius.OrthogonalTenfoldDrop", "sequential radius^2 = 40.5"},
    {"path", "RunPath.LambdaMaxOnly", "path with lambda_max only gives beta = 0"},
    {"path", "RunPath.EveryScreenedVariableIsInactiveAtTheOptimum", "full path oracle audit"},
    {"elastic_net", "ElasticNet.PureL1IsThePlainLasso", "alpha = 1 equals the Lasso"},
    {"elastic_net", "ElasticNet.SingleFeatureClosedForm", "single feature beta = 1"},
    {"elastic_net", "ElasticNet.SolutionsSatisfySubgradientConditions", "Elastic-Net KKT residual <= 1e-8"},
    {"oracle", "ReferenceSolve.OrthogonalClosedForm", "orthogonal oracle beta_hat, theta_hat, E"},
    {"oracle", "ReferenceSolve.AtLambdaMax", "oracle at lambda_max"},
    {"oracle", "ReferenceSolve.SingleFeature", "oracle single feature"},
    {"oracle", "ReferenceSolve.InvariantsOnRandomInstances", "support within E on 100 instances"},
    {"oracle", "Equicorrelation.Tolerance", "E of the orthogonal example at tol 1e-6"},
    {"oracle", "Equicorrelation.UniqueArgmaxAtLambdaMax", "E = {j*} at lambda_max"},
    {"oracle", "AuditSafety.PointRegionScreensComplementOfE", "point region screens the complement of E"},
    {"oracle", "AuditSafety.HugeRegionScreensNothing", "huge region screens nothing"},
    {"oracle", "AuditSafety.GapSphereAtConvergedIterates", "GAP sphere audit on 100 instances"},
    {"oracle", "SupportIdentification.LambdaMaxAtFirstCheckpoint", "identification at the first checkpoint at lambda_max"},
    {"oracle", "SupportIdentification.OrthogonalDesign", "orthogonal identification after convergence"},
    {"oracle", "SupportIdentification.GapRulesIdentifyInFiniteTime", "finite identification on random 30x100"},
    {"oracle", "SupportIdentification.DynamicRuleNeverIdentifiesBelowItsThreshold", "dynamic never identifies below its threshold"},
    {"dataset", "Svmlight.SingleLine", "svmlight line 1.5 3:2.0 7:-1.0"},
    {"dataset", "DenseCsv.HeaderAndRow", "dense CSV y,f1,f2"},
    {"dataset", "RoundTrip.BitExactInBothFormats", "write then load is bit-exact"},
    {"dataset", "Synth.DeterministicForFixedSeed", "fixed seed gives identical data"},
    {"dataset", "Synth.NoiselessPathApproachesPlantedModel", "noiseless planted support smoke check"},
    {"dataset", "Synth.StorageFollowsDensity", "density 1 gives dense storage"},
    {"benchmark", "BenchmarkTest.NoneVersusGapSphere", "None vs GapSphere trace on 50x500"},
    {"benchmark", "BenchmarkTest.StaticScreensNothingBelowItsThreshold", "Static rows show n_active = p below threshold"},
    {"benchmark", "BenchmarkTest.ConfigValidation", "empty rules list is a config error"},
};

struct Captured {
  int status = -1;
  std::string out;
};

Captured run_command(const std::string& cmd) {
  Captured c;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return c;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) c.out += buf;
  const int raw = pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

Outcome example_ledger(const std::string& unit_dir) {
  if (unit_dir.empty()) return {false, "unit test directory not given (--unit-tests)"};
  std::map<std::string, std::set<std::string>> by_binary;
  for (const LedgerEntry& e : kLedger) by_binary[e.binary].insert(e.test);

  std::size_t missing = 0, failed = 0, run = 0;
  std::string first;
  for (const auto& [binary, tests] : by_binary) {
    const std::string exe = unit_dir + "/test_" + binary;
    const Captured list = run_command("'" + exe + "' --gtest_list_tests");
    std::set<std::string> known;
    std::string suite;
    std::istringstream lines(list.out);
    for (std::string line; std::getline(lines, line);) {
      if (line.empty()) continue;
      if (line[0] != ' ') {
        suite = line.substr(0, line.find_first_of(" \t"));
      } else {
        const auto b = line.find_first_not_of(' ');
        known.insert(suite + line.substr(b, line.find_first_of(" \t", b) - b));
      }
    }
    std::string filter;
    for (const std::string& t : tests) {
      if (!known.count(t)) {
        ++missing;
        if (first.empty()) first = "missing " + binary + ":" + t;
        continue;
      }
      filter += (filter.empty() ? "" : ":") + t;
    }
    if (filter.empty()) continue;
    const Captured res = run_command("'" + exe + "' --gtest_brief=1 --gtest_filter='" + filter + "'");
    const std::size_t expected = static_cast<std::size_t>(std::count(filter.begin(), filter.end(), ':')) + 1;
    const std::string marker = "[  PASSED  ] " + std::to_string(expected) + " test";
    if (res.status != 0 || res.out.find(marker) == std::string::npos) {
      ++failed;
      if (first.empty()) first = "failures in test_" + binary;
    }
    run += expected;
  }
  Outcome o;
  o.pass = missing == 0 && failed == 0;
  o.detail = fmt("%zu documented examples mapped to %zu unit tests; %zu missing, %zu binaries "
                 "with failures",
                 std::size(kLedger), run, missing, failed);
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gapsafe acceptance checks"};
  std::vector<int> only;
  std::string unit_dir;
  app.add_option("criteria", only, "Criteria to run (default: all)")->check(CLI::Range(1, 10));
  app.add_option("--unit-tests", unit_dir, "Directory holding the unit test executables");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"safety suite", safety_suite},
      {"sequential radius identity", sequential_identity},
      {"GAP radius bounds", gap_radius_bounds},
      {"support identification", identification},
      {"dome dominance", dome_dominance},
      {"solver equivalence", solver_equivalence},
      {"screening-proportion shape", screening_shape},
      {"speedup direction", speedup},
      {"Elastic-Net equivalence", elastic_net},
      {"example ledger", [&] { return example_ledger(unit_dir); }},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
