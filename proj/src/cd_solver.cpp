#include "gapsafe/cd_solver.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gapsafe/errors.hpp"
#include "gapsafe/safe_regions.hpp"

namespace gapsafe {

std::string_view to_string(Rule rule) noexcept {
  switch (rule) {
    case Rule::None: return "none";
    case Rule::Static: return "static";
    case Rule::Dynamic: return "dynamic";
    case Rule::ST3: return "st3";
    case Rule::GapSphere: return "gap_sphere";
    case Rule::GapDome: return "gap_dome";
  }
  return "unknown";
}

std::optional<Rule> parse_rule(std::string_view name) noexcept {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Rule r : kAllRules) {
    if (lower == to_string(r)) return r;
  }
  if (lower == "gapsphere") return Rule::GapSphere;
  if (lower == "gapdome") return Rule::GapDome;
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (max_passes < 1) throw ParameterError("max_passes must be at least 1");
  if (screen_every < 1) throw ParameterError("screen_every must be at least 1");
  if (resync_every < 1) throw ParameterError("resync_every must be at least 1");
  if (!(screen_tol >= 0.0) || screen_tol >= 1.0) {
    throw ParameterError("screen_tol must lie in [0, 1)");
  }
}

double soft_threshold(double u, double x) noexcept {
  if (x > u) return x - u;
  if (x < -u) return x + u;
  return 0.0;
}

void cd_pass(SolverState& state, const LassoProblem& prob, std::span<const Index> order) {
  const DesignMatrix& X = prob.X();
  const double lam = prob.lambda();
  for (Index j : order) {
    const double nsq = X.col_norm_sq(j);
    if (nsq == 0.0) {
      throw std::logic_error("zero-norm column " + std::to_string(j) + " in active set");
    }
    const double old = state.beta[j];
    const double updated =
        soft_threshold(lam / nsq, old + X.col_dot(j, state.residual) / nsq);
    if (updated != old) {
      X.axpy_col(j, old - updated, state.residual);
      state.beta[j] = updated;
    }
  }
  ++state.passes_done;
}

namespace {

using Clock = std::chrono::steady_clock;

void resync_residual(const LassoProblem& prob, SolverState& st) {
  const auto y = prob.y();
  st.residual.assign(y.begin(), y.end());
  for (Index j : st.active) {
    if (st.beta[j] != 0.0) prob.X().axpy_col(j, -st.beta[j], st.residual);
  }
}

double dual_scale_factor(const LassoProblem& prob, std::span<const double> residual,
                         double sup) {
  const double rr = squared_norm(residual);
  if (rr == 0.0) return 0.0;
  double a = dot(prob.y(), residual) / (prob.lambda() * rr);
  if (sup > 0.0) a = std::clamp(a, -1.0 / sup, 1.0 / sup);
  return a;
}

double distance_from_scaled_y(const LassoProblem& prob, const DualPoint& theta) {
  const double lam = prob.lambda();
  const auto y = prob.y();
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = theta.theta[i] - y[i] / lam;
    s += e * e;
  }
  return std::sqrt(s);
}

class Screener {
 public:
  Screener(const LassoProblem& prob, const SolverConfig& cfg) : prob_(prob), cfg_(cfg) {
    if (cfg.rule == Rule::ST3) {
      const Index js = prob.j_star();
      Vector xs(prob.n(), 0.0);
      prob.X().axpy_col(js, 1.0, xs);
      gram_star_ = prob.X().correlations(xs);
    }
  }

  // Returns the radius reported in the trace and fills `keep` with the
  // surviving columns of `active`. corr[k] = x_{active[k]}' rho and
  // theta = scale * rho.
  double run(std::span<const Index> active, std::span<const double> corr, double scale,
             const DualPoint& theta, const GapCertificate& cert,
             std::span<const double> beta, std::span<const double> residual,
             std::vector<Index>& keep) const {
    const LassoProblem& prob = prob_;
    const DesignMatrix& X = prob.X();
    const double lam = prob.lambda();
    const auto xty = prob.xty();
    const auto norms = X.col_norms();
    const double threshold = 1.0 - cfg_.screen_tol;
    const double gap_r = gap_radius(cert.gap, lam, cert.primal);

    keep.clear();
    auto filter = [&](auto&& mu_of) {
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (mu_of(k) >= threshold) keep.push_back(active[k]);
      }
    };

    switch (cfg_.rule) {
      case Rule::None:
        keep.assign(active.begin(), active.end());
        return gap_r;
      case Rule::Static: {
        const double r =
            std::abs(1.0 / lam - 1.0 / prob.lambda_max()) * std::sqrt(prob.y_norm_sq());
        filter([&](std::size_t k) {
          const Index j = active[k];
          return sphere_mu_from(xty[j] / lam, r, norms[j]);
        });
        return r;
      }
      case Rule::Dynamic: {
        const double r = distance_from_scaled_y(prob, theta);
        filter([&](std::size_t k) {
          const Index j = active[k];
          return sphere_mu_from(xty[j] / lam, r, norms[j]);
        });
        return r;
      }
      case Rule::ST3: {
        const double big_r = distance_from_scaled_y(prob, theta);
        const Index js = prob.j_star();
        const double xs_sq = norms[js] * norms[js];
        const double excess = std::max(prob.lambda_max() / lam - 1.0, 0.0);
        const double sign = xty[js] >= 0.0 ? 1.0 : -1.0;
        const double step = sign * excess / xs_sq;
        const double dist = excess / norms[js];
        const double r = std::sqrt(std::max(big_r * big_r - dist * dist, 0.0));
        filter([&](std::size_t k) {
          const Index j = active[k];
          return sphere_mu_from(xty[j] / lam - step * gram_star_[j], r, norms[j]);
        });
        return r;
      }
      case Rule::GapSphere:
        filter([&](std::size_t k) {
          return sphere_mu_from(scale * corr[k], gap_r, norms[active[k]]);
        });
        return gap_r;
      case Rule::GapDome: {
        const double big_r = distance_from_scaled_y(prob, theta);
        if (big_r == 0.0) {
          filter([&](std::size_t k) { return std::abs(scale * corr[k]); });
          return gap_r;
        }
        const double small_r = std::min(inner_radius(prob, beta, residual), big_r);
        const double q = small_r / big_r;
        const double ratio = std::clamp(2.0 * q * q - 1.0, -1.0, 1.0);
        const double half = 0.5 * big_r;
        filter([&](std::size_t k) {
          const Index j = active[k];
          const double on_y = xty[j] / lam;
          const double on_theta = scale * corr[k];
          return dome_mu_from(0.5 * (on_y + on_theta), (on_y - on_theta) / big_r, norms[j],
                              half, ratio);
        });
        return gap_r;
      }
    }
    return gap_r;
  }

 private:
  const LassoProblem& prob_;
  const SolverConfig& cfg_;
  Vector gram_star_;
};

}  // namespace

SolveResult solve(const LassoProblem& prob, const SolverConfig& config,
                  std::optional<std::span<const double>> warm_beta,
                  std::optional<std::span<const Index>> initial_active) {
  config.validate();
  const DesignMatrix& X = prob.X();
  const Index p = prob.p();

  SolverState st;
  if (warm_beta) {
    if (warm_beta->size() != p) throw ParameterError("warm start has wrong length");
    st.beta.assign(warm_beta->begin(), warm_beta->end());
  } else {
    st.beta.assign(p, 0.0);
  }

  std::vector<char> allowed(p, initial_active ? 0 : 1);
  if (initial_active) {
    for (Index j : *initial_active) {
      if (j >= p) throw IndexError("initial active set holds column " + std::to_string(j));
      allowed[j] = 1;
    }
  }
  for (Index j = 0; j < p; ++j) {
    if (allowed[j] && !X.is_zero_column(j)) {
      st.active.push_back(j);
    } else {
      st.beta[j] = 0.0;
    }
  }
  resync_residual(prob, st);

  const Screener screener(prob, config);
  const auto start = Clock::now();
  const std::size_t f = config.screen_every;
  const std::size_t K = config.max_passes;

  std::vector<Index> keep;
  Vector beta_seen, residual_seen;
  std::vector<Index> active_seen;

  auto checkpoint = [&]() -> bool {
    resync_residual(prob, st);
    if (config.on_checkpoint) {
      beta_seen = st.beta;
      residual_seen = st.residual;
      active_seen = st.active;
    }

    double radius;
    if (st.active.empty()) {
      // Everything screened: beta = 0 is optimal.
      st.theta = dual_scale(prob, st.residual);
      st.cert = duality_gap(prob, st.beta, st.theta, st.residual);
      radius = gap_radius(st.cert.gap, prob.lambda(), st.cert.primal);
      keep.clear();
    } else {
      const Vector corr = X.correlations(st.residual, st.active);
      double sup = 0.0;
      for (double c : corr) sup = std::max(sup, std::abs(c));
      const double scale = dual_scale_factor(prob, st.residual, sup);
      st.theta = dual_scale_with_sup(prob, st.residual, sup);
      st.cert = duality_gap(prob, st.beta, st.theta, st.residual);
      radius = screener.run(st.active, corr, scale, st.theta, st.cert, st.beta,
                            st.residual, keep);
    }

    if (keep.size() != st.active.size()) {
      bool changed = false;
      std::size_t k = 0;
      for (Index j : st.active) {
        if (k < keep.size() && keep[k] == j) {
          ++k;
          continue;
        }
        if (st.beta[j] != 0.0) {
          X.axpy_col(j, st.beta[j], st.residual);
          st.beta[j] = 0.0;
          changed = true;
        }
      }
      st.active = keep;
      if (changed) st.cert = duality_gap(prob, st.beta, st.theta, st.residual);
    }

    const double elapsed =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    st.screen_trace.push_back(
        CheckpointRecord{st.passes_done, st.active.size(), st.cert.gap, radius, elapsed});

    if (config.on_checkpoint) {
      config.on_checkpoint(CheckpointView{prob, beta_seen, residual_seen, st.theta,
                                          active_seen, st.active, st.cert, st.passes_done});
    }
    return st.cert.gap <= config.epsilon;
  };

  bool converged = false;
  while (true) {
    if (st.passes_done % f == 0 || st.passes_done >= K) {
      if (checkpoint()) {
        converged = true;
        break;
      }
    }
    if (st.passes_done >= K) break;
    cd_pass(st, prob, st.active);
    if (st.passes_done % config.resync_every == 0 && st.passes_done % f != 0) {
      resync_residual(prob, st);
    }
  }

  SolveResult out;
  out.beta = st.beta;
  out.cert = st.cert;
  out.converged = converged;
  out.state = std::move(st);
  return out;
}

}  // namespace gapsafe
