#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "covsel/ans.hpp"
#include "covsel/spg.hpp"

namespace covsel {

enum class Method { aspg, ans };

inline const char* to_string(Method m) { return m == Method::aspg ? "aspg" : "ans"; }

struct GsicsParams {
  double eps_o = 0.1;
  double eps_c = 1e-4;
  double r_rho = 2.0;
  double rho0_omega = 0.5;
  Method method = Method::aspg;
  int max_outer = 60;
  double beta0 = 1.0;   // first-stage beta
  double r_beta = 10.0; // ASPG escalation ratio
  SpgParams spg;
  AnsParams ans;

  void check() const {
    if (!(eps_o > 0.0) || !(eps_c > 0.0)) throw InvalidInput("GsicsParams: eps_o and eps_c must be positive");
    if (!(r_rho > 1.0)) throw InvalidInput("GsicsParams: r_rho must exceed 1");
    if (!(rho0_omega > 0.0)) throw InvalidInput("GsicsParams: rho0_omega must be positive");
    if (max_outer < 1) throw InvalidInput("GsicsParams: max_outer must be >= 1");
    if (!(beta0 > 0.0) || !(r_beta > 1.0)) throw InvalidInput("GsicsParams: need beta0 > 0 and r_beta > 1");
  }
};

// Per outer stage: the penalty level on omega, the bounds it induced and what the inner solve produced.
struct StageRecord {
  double rho_omega = 0.0;
  Bounds bounds;
  double beta_start = 0.0;
  double violation = 0.0;  // max |X_ij| over omega
};

struct EstimationResult {
  SymMatrix x_approx;  // inner solution of the last stage
  SymMatrix x_star;    // omega entries zeroed, diagonal shifted by t_star
  double t_star = 0.0;
  int outer_iters = 0;
  std::vector<SolveReport> inner_reports;
  std::vector<StageRecord> stages;
  double final_rho_omega = 0.0;
  bool converged = false;  // false when an inner solve hit its caps

  long total_iterations() const {
    long s = 0;
    for (const auto& r : inner_reports) s += r.iterations;
    return s;
  }
  long total_fevals() const {
    long s = 0;
    for (const auto& r : inner_reports) s += r.fevals;
    return s;
  }
};

/// Raised when max_outer penalty escalations did not reach the violation target.
class PenaltyDivergence : public Error {
 public:
  PenaltyDivergence(const std::string& what, EstimationResult best) : Error(what), best_(std::move(best)) {}
  const EstimationResult& best() const { return best_; }

 private:
  EstimationResult best_;
};

/// Dual start for the next penalty level: omega entries of the previous dual
/// point are divided by r_rho, and beta restarts from the previous lambda_max.
inline std::pair<SymMatrix, double> warm_start(const SymMatrix& prev_u, double prev_lam_max, double r_rho,
                                               const PairSet& omega, double new_alpha) {
  if (!(r_rho > 1.0)) throw InvalidInput("warm_start: r_rho must exceed 1");
  omega.check_dimension(prev_u.size());
  SymMatrix u = prev_u;
  for (auto [i, j] : omega.pairs())
    if (i < j) u.set(i, j, prev_u(i, j) / r_rho);
  return {u, std::max(new_alpha, prev_lam_max)};
}

/// Zeroes omega in x_approx and adds t I, where t maximizes
/// log det(X + t I) - <Sigma, X + t I>. Stationarity reads
/// sum_i 1/(lambda_i + t) = Tr(Sigma); in s = t + lambda_min the left side is
/// decreasing and the root lies in (0, n / Tr(Sigma)].
inline std::pair<SymMatrix, double> post_process(const Instance& inst, const SymMatrix& x_approx, const PairSet& omega) {
  if (x_approx.size() != inst.size()) throw InvalidInput("post_process: dimension mismatch");
  omega.check_dimension(x_approx.size());
  const double tr = inst.sigma.trace();
  if (!(tr > 0.0)) throw DegenerateTrace("post_process: Tr(Sigma) must be positive");

  SymMatrix zeroed = x_approx;
  for (auto [i, j] : omega.pairs()) zeroed.set(i, j, 0.0);

  const Eigen::VectorXd lam = sym_eigenvalues(zeroed);
  const double lmin = lam(lam.size() - 1);
  const Eigen::VectorXd mu = lam.array() - lmin;  // >= 0
  auto residual = [&](double s) { return (mu.array() + s).inverse().sum() - tr; };
  auto slope = [&](double s) { return -(mu.array() + s).square().inverse().sum(); };

  double lo = 0.0;
  double hi = static_cast<double>(lam.size()) / tr;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 5; ++it) {
    const double next = s - residual(s) / slope(s);
    if (!(next > lo && next < hi) || !std::isfinite(next)) break;
    s = next;
  }
  const double t = s - lmin;

  SymMatrix x_star = zeroed;
  for (Index i = 0; i < x_star.size(); ++i) x_star.set(i, i, zeroed(i, i) + t);
  return {x_star, t};
}

namespace detail {

inline Instance with_omega_penalty(Instance inst, double level) {
  for (auto [i, j] : inst.omega.pairs()) inst.rho.set(i, j, level);
  return inst;
}

}  // namespace detail

/// Adaptive l1-penalty loop for the zero-constrained problem: solve the
/// penalized problem to eps_o, and while some omega entry exceeds eps_c in
/// magnitude multiply the omega penalties by r_rho and re-solve from a warm start.
inline EstimationResult gsics_solve(const Instance& input, const GsicsParams& p = {}) {
  p.check();
  input.check();
  const PairSet& omega = input.omega;
  Instance inst = validate(detail::with_omega_penalty(input, p.rho0_omega));

  EstimationResult res;
  SymMatrix u = SymMatrix::zeros(inst.size());
  double beta_start = p.beta0;
  bool done = false;

  for (int stage = 0; stage < p.max_outer; ++stage) {
    const double level = p.rho0_omega * std::pow(p.r_rho, stage);
    if (stage > 0) inst = detail::with_omega_penalty(std::move(inst), level);
    const Bounds bounds = compute_bounds(inst);

    if (stage > 0) {
      const SolveReport& prev = res.inner_reports.back();
      std::tie(u, beta_start) = warm_start(prev.u, prev.eval.lam_max, p.r_rho, omega, bounds.alpha);
    }
    beta_start = std::clamp(beta_start, bounds.alpha, bounds.beta);

    SolveReport rep = p.method == Method::aspg ? aspg_solve(inst, bounds, u, p.eps_o, beta_start, p.r_beta, p.spg)
                                               : ans_solve(inst, bounds, u, beta_start, p.eps_o, p.ans);

    StageRecord rec;
    rec.rho_omega = level;
    rec.bounds = bounds;
    rec.beta_start = beta_start;
    rec.violation = max_abs_on_set(rep.eval.x, omega);

    res.outer_iters = stage + 1;
    res.final_rho_omega = level;
    res.x_approx = rep.eval.x;
    res.stages.push_back(rec);
    const bool inner_ok = rep.converged;
    res.inner_reports.push_back(std::move(rep));

    if (!inner_ok) break;
    if (rec.violation <= p.eps_c) {
      done = true;
      break;
    }
  }

  // With nothing to zero the inner solution is already feasible and positive definite.
  if (omega.empty()) {
    res.x_star = res.x_approx;
    res.t_star = 0.0;
  } else {
    std::tie(res.x_star, res.t_star) = post_process(inst, res.x_approx, omega);
  }
  res.converged = done;
  if (!done && res.inner_reports.back().converged)
    throw PenaltyDivergence("gsics_solve: omega violation above eps_c after max_outer stages", std::move(res));
  return res;
}

}  // namespace covsel
