#include "gapsafe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "gapsafe/errors.hpp"

namespace gapsafe {

namespace {

double shrink(double u, double x) {
  if (x > u) return x - u;
  if (x < -u) return x + u;
  return 0.0;
}

struct DenseCopy {
  Index n = 0;
  Index p = 0;
  Vector values;  // column-major
  Vector norm_sq;

  const double* col(Index j) const { return values.data() + j * n; }

  double col_dot(Index j, const Vector& v) const {
    const double* c = col(j);
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += c[i] * v[i];
    return s;
  }
};

DenseCopy densify(const DesignMatrix& X) {
  DenseCopy d;
  d.n = X.rows();
  d.p = X.cols();
  d.values = X.to_dense();
  d.norm_sq.assign(d.p, 0.0);
  for (Index j = 0; j < d.p; ++j) {
    const double* c = d.col(j);
    for (Index i = 0; i < d.n; ++i) d.norm_sq[j] += c[i] * c[i];
  }
  return d;
}

// Active-set step on the current support S with signs s. A rank-deficient
// X_S is first reduced along a null direction (the fit is unchanged and the
// l1 norm does not grow) until some coordinate hits zero. On a full-rank
// support the sign-constrained minimizer
//   beta_S = (X_S' X_S)^{-1} (X_S' y - lambda s)
// is approached as far as the signs allow.
void polish_support(const DenseCopy& A, const Vector& y, double lam, Vector& beta) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const Index n = A.n;
  for (Index guard = 0; guard <= A.p; ++guard) {
    std::vector<Index> S;
    for (Index j = 0; j < A.p; ++j) {
      if (beta[j] != 0.0) S.push_back(j);
    }
    if (S.empty()) return;
    const auto k = static_cast<Eigen::Index>(S.size());
    MatrixXd M(static_cast<Eigen::Index>(n), k);
    VectorXd b(k), sgn(k);
    for (Eigen::Index c = 0; c < k; ++c) {
      M.col(c) = Eigen::Map<const VectorXd>(A.col(S[c]), static_cast<Eigen::Index>(n));
      b(c) = beta[S[c]];
      sgn(c) = b(c) > 0.0 ? 1.0 : -1.0;
    }

    Eigen::FullPivLU<MatrixXd> lu(M);
    VectorXd step;
    if (lu.rank() < k) {
      step = lu.kernel().col(0);
      if (sgn.dot(step) < 0.0) step = -step;
      step = -step;
    } else {
      const Eigen::LDLT<MatrixXd> ldlt(M.transpose() * M);
      VectorXd target = ldlt.solve(
          M.transpose() * Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(n)) -
          lam * sgn);
      // Iterative refinement with the normal-equation residual in long double.
      for (int round = 0; round < 3 && target.allFinite(); ++round) {
        std::vector<long double> res(y.begin(), y.end());
        for (Eigen::Index c = 0; c < k; ++c) {
          const double* col = A.col(S[c]);
          for (Index i = 0; i < n; ++i) res[i] -= static_cast<long double>(target(c)) * col[i];
        }
        VectorXd g(k);
        for (Eigen::Index c = 0; c < k; ++c) {
          const double* col = A.col(S[c]);
          long double d = 0.0L;
          for (Index i = 0; i < n; ++i) d += col[i] * res[i];
          g(c) = static_cast<double>(d - lam * sgn(c));
        }
        target += ldlt.solve(g);
      }
      if (!target.allFinite()) return;
      step = target - b;
    }

    double t = lu.rank() < k ? std::numeric_limits<double>::infinity() : 1.0;
    Eigen::Index hit = -1;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (sgn(c) * step(c) < 0.0) {
        const double tc = -b(c) / step(c);
        if (tc < t) {
          t = tc;
          hit = c;
        }
      }
    }
    if (hit < 0 && !std::isfinite(t)) return;
    for (Eigen::Index c = 0; c < k; ++c) beta[S[c]] = b(c) + t * step(c);
    if (hit >= 0) {
      beta[S[hit]] = 0.0;
    } else {
      return;
    }
  }
}

}  // namespace

ReferenceSolution reference_solve(const LassoProblem& prob, const ReferenceOptions& opts) {
  const DenseCopy A = densify(prob.X());
  const Index n = A.n;
  const Index p = A.p;
  const double lam = prob.lambda();
  const Vector y(prob.y().begin(), prob.y().end());

  std::vector<Index> order(p);
  std::iota(order.begin(), order.end(), Index{0});
  if (opts.reverse_order) std::reverse(order.begin(), order.end());

  Vector beta(p, 0.0);
  Vector r = y;
  auto update = [&](Index j) {
    if (A.norm_sq[j] == 0.0) return;
    const double old = beta[j];
    const double b = shrink(lam / A.norm_sq[j], old + A.col_dot(j, r) / A.norm_sq[j]);
    if (b == old) return;
    const double delta = old - b;
    const double* c = A.col(j);
    for (Index i = 0; i < n; ++i) r[i] += delta * c[i];
    beta[j] = b;
  };

  ReferenceSolution sol;
  sol.lambda = lam;
  std::vector<Index> support;
  Vector corr(p);
  for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (Index j : order) update(j);
    support.clear();
    for (Index j : order) {
      if (beta[j] != 0.0) support.push_back(j);
    }
    for (int inner = 0; inner < 10 && !support.empty(); ++inner) {
      for (Index j : support) update(j);
    }
    polish_support(A, y, lam, beta);

    // Certificate in extended precision: the gap is a sum of small terms
    // that cancel badly in double when ||beta||_1 is large.
    std::vector<long double> rl(y.begin(), y.end());
    for (Index j = 0; j < p; ++j) {
      if (beta[j] == 0.0) continue;
      const double* c = A.col(j);
      for (Index i = 0; i < n; ++i) rl[i] -= static_cast<long double>(beta[j]) * c[i];
    }
    long double sup = 0.0L;
    long double rr = 0.0L;
    std::vector<long double> cl(p);
    for (Index j = 0; j < p; ++j) {
      const double* c = A.col(j);
      long double d = 0.0L;
      for (Index i = 0; i < n; ++i) d += c[i] * rl[i];
      cl[j] = d;
      corr[j] = static_cast<double>(d);
      sup = std::max(sup, std::abs(d));
    }
    for (Index i = 0; i < n; ++i) {
      r[i] = static_cast<double>(rl[i]);
      rr += rl[i] * rl[i];
    }
    // theta = s r with s = 1 / max(lambda, ||X' r||_inf). Expanding
    // P - D around y = r + X beta avoids cancelling two O(||y||^2) terms.
    const long double ls = lam / std::max(static_cast<long double>(lam), sup);
    long double gap_l = 0.5L * (ls - 1.0L) * (ls - 1.0L) * rr;
    for (Index j = 0; j < p; ++j) {
      if (beta[j] != 0.0) gap_l += std::abs(static_cast<long double>(beta[j])) * lam - ls * beta[j] * cl[j];
    }
    const double gap = static_cast<double>(gap_l);

    double kkt = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double c = corr[j] / lam;
      double v;
      if (beta[j] > 0.0) {
        v = std::abs(c - 1.0);
      } else if (beta[j] < 0.0) {
        v = std::abs(c + 1.0);
      } else {
        v = std::max(0.0, std::abs(c) - 1.0);
      }
      kkt = std::max(kkt, v);
    }

    if (gap <= opts.target_gap && kkt <= opts.kkt_tol) {
      sol.beta_hat = beta;
      sol.theta_hat.resize(n);
      for (Index i = 0; i < n; ++i) sol.theta_hat[i] = r[i] / lam;
      sol.correlations.resize(p);
      for (Index j = 0; j < p; ++j) sol.correlations[j] = static_cast<double>(cl[j] / lam);
      sol.gap = std::max(gap, 0.0);
      sol.kkt_residual = kkt;
      sol.sweeps = sweep;
      sol.equicorrelation = equicorrelation(sol, opts.equicorrelation_tol);
      return sol;
    }
  }
  throw OracleFailure("reference solver did not reach gap " + std::to_string(opts.target_gap) +
                      " within " + std::to_string(opts.max_sweeps) + " sweeps");
}

std::vector<Index> equicorrelation(const ReferenceSolution& sol, double tol) {
  std::vector<Index> e;
  for (Index j = 0; j < sol.correlations.size(); ++j) {
    if (std::abs(sol.correlations[j]) >= 1.0 - tol) e.push_back(j);
  }
  return e;
}

double separation_margin(const ReferenceSolution& sol) {
  double m = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (Index j = 0; j < sol.correlations.size(); ++j) {
    if (k < sol.equicorrelation.size() && sol.equicorrelation[k] == j) {
      ++k;
      continue;
    }
    m = std::min(m, 1.0 - std::abs(sol.correlations[j]));
  }
  return m;
}

SafetyAudit audit_safety(const Region& region, const ReferenceSolution& sol,
                         const DesignMatrix& X, double screen_tol) {
  if (sol.beta_hat.size() != X.cols()) throw ParameterError("solution does not match design");
  SafetyAudit a;
  a.containment_distance = distance_to_region(region, sol.theta_hat);
  a.screened = screen(region, X, screen_tol).zero_set;
  for (Index j : a.screened) {
    if (sol.beta_hat[j] != 0.0) a.screened_nonzero.push_back(j);
    if (std::abs(sol.correlations[j]) > 1.0 - 1e-9) a.screened_tight.push_back(j);
  }
  a.n_screened = a.screened.size();
  a.n_outside_equicorrelation = X.cols() - sol.equicorrelation.size();
  return a;
}

IdentificationReport support_identification_pass(const LassoProblem& prob, Rule rule,
                                                 std::span<const double> eps_sequence,
                                                 const ReferenceSolution& ref,
                                                 SolverConfig base) {
  if (eps_sequence.empty()) throw ParameterError("empty epsilon sequence");
  const std::vector<Index>& E = ref.equicorrelation;
  IdentificationReport rep;
  std::vector<char> equal_at;
  std::vector<std::size_t> pass_at;
  std::size_t pass_offset = 0;

  base.rule = rule;
  base.on_checkpoint = [&](const CheckpointView& v) {
    const bool equal = std::equal(v.active_after.begin(), v.active_after.end(), E.begin(),
                                  E.end());
    if (!std::includes(v.active_after.begin(), v.active_after.end(), E.begin(), E.end())) {
      rep.superset_everywhere = false;
    }
    equal_at.push_back(equal ? 1 : 0);
    pass_at.push_back(pass_offset + v.pass);
    rep.active_sizes.push_back(v.active_after.size());
  };

  Vector beta(prob.p(), 0.0);
  std::optional<std::vector<Index>> active;
  for (double eps : eps_sequence) {
    base.epsilon = eps;
    SolveResult r = active ? solve(prob, base, beta, std::span<const Index>(*active))
                           : solve(prob, base, beta);
    pass_offset += r.state.passes_done;
    beta = r.beta;
    active = r.state.active;
  }

  rep.checkpoints = equal_at.size();
  for (std::size_t k = 0; k < equal_at.size(); ++k) {
    if (equal_at[k]) {
      rep.first_equal = k;
      break;
    }
  }
  if (!equal_at.empty() && equal_at.back()) {
    std::size_t k = equal_at.size() - 1;
    while (k > 0 && equal_at[k - 1]) --k;
    rep.checkpoint = k;
    rep.pass = pass_at[k];
  }
  return rep;
}

DynamicThresholds dynamic_rule_thresholds(const LassoProblem& prob,
                                          const ReferenceSolution& sol) {
  const double lmax = prob.lambda_max();
  const double y_norm = std::sqrt(prob.y_norm_sq());
  const double theta_norm = std::sqrt(squared_norm(sol.theta_hat));
  DynamicThresholds t;
  t.ratio = prob.lambda() / lmax;
  t.hard = std::numeric_limits<double>::infinity();
  t.soft = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < prob.p(); ++j) {
    const double xn = prob.X().col_norm(j);
    if (xn == 0.0) continue;
    const double c = std::abs(prob.xty()[j]);
    const double scale = xn * y_norm;
    t.hard = std::min(t.hard, (1.0 + c / scale) / (lmax * theta_norm / y_norm + lmax / scale));
    t.soft = std::min(t.soft, c / lmax);
  }
  return t;
}

}  // namespace gapsafe
