#pragma once

#include <algorithm>
#include <cmath>

#include "covsel/solve_report.hpp"

namespace covsel {

struct AnsParams {
  double varsigma1 = 1.05;  // expansion factor while the bound is active
  double varsigma2 = 1.05;  // re-centering factor when shrinking
  double varsigma3 = 0.95;  // shrink trigger
  long max_iter = 50000;
  long max_feval = 100000;
  bool trace = false;

  void check() const {
    if (!(varsigma1 > 1.0 && varsigma2 > 1.0)) throw InvalidInput("AnsParams: varsigma1, varsigma2 must exceed 1");
    if (!(varsigma3 > 0.0 && varsigma3 < 1.0)) throw InvalidInput("AnsParams: varsigma3 must lie in (0,1)");
    if (max_iter < 0 || max_feval < 1) throw InvalidInput("AnsParams: bad iteration caps");
  }
};

/// Mutable part of the accelerated scheme. `center` is the prox center U_0,
/// `k` the inner counter since the last beta change, `grad_accum` the running
/// sum of (i+1)/2 grad g(U_i) over that same span.
struct AnsState {
  SymMatrix center;
  long k = 0;
  double beta = 0.0;
  double lipschitz = 0.0;  // beta^2 rho_max^2
  double sigma = 1.0;
  SymMatrix grad_accum;
};

/// Step-3 point: argmin <grad, U - U_k> + L/2 ||U - U_k||^2 over the unit box.
inline SymMatrix ans_descent_point(const SymMatrix& u, const SymMatrix& grad, double lipschitz) {
  return project_onto_unit_box(u.dense() - grad.dense() / lipschitz);
}

/// Step-4 point: argmin L/(2 sigma) ||U - U_0||^2 + <grad_accum, U> over the unit
/// box. The affine terms of the aggregated lower model only contribute their
/// gradient sum, so the minimizer is a projection.
inline SymMatrix ans_aggregate_point(const SymMatrix& center, const SymMatrix& grad_accum, double lipschitz,
                                     double sigma = 1.0) {
  return project_onto_unit_box(center.dense() - (sigma / lipschitz) * grad_accum.dense());
}

/// Adaptive Nesterov smooth method, one oracle pass per call to step().
class AnsSolver {
 public:
  enum class Event { none, expanded, shrunk };

  AnsSolver(const Instance& inst, const Bounds& bounds, const SymMatrix& u_init, double beta_init, double eps_o,
            const AnsParams& p = {})
      : inst_(inst), bounds_(bounds), eps_o_(eps_o), p_(p), u_(u_init) {
    p_.check();
    if (u_init.size() != inst.size() || !u_init.all_finite() || u_init.max_abs() > 1.0)
      throw InvalidInput("ans_solve: U_init lies outside the unit box");
    if (!(eps_o > 0.0)) throw InvalidInput("ans_solve: eps_o must be positive");
    if (!(beta_init >= bounds.alpha && beta_init <= bounds.beta))
      throw InvalidInput("ans_solve: beta_init outside [alpha, beta_rho]");
    rho_max_ = inst.rho.max_abs();
    reset(u_init, beta_init);
  }

  /// Steps 1-6. Returns true once the gap test passes.
  bool step() {
    OracleEval ev = eval(u_, state_.beta);
    event_ = Event::none;
    if (ev.active) {
      double trial = state_.beta;
      for (int s = 1;; ++s) {
        trial = std::min(std::pow(p_.varsigma1, s) * state_.beta, bounds_.beta);
        ev = eval(u_, trial);
        if (!ev.active) break;
      }
      reset(u_, trial);
      event_ = Event::expanded;
    } else if (ev.lam_max <= p_.varsigma3 * state_.beta) {
      const double next = std::max(std::min(p_.varsigma2 * ev.lam_max, bounds_.beta), bounds_.alpha);
      reset(u_, next);
      // lambda_max < beta before and after, so X_beta(U_k) is unchanged.
      ev.beta = next;
      ev.active = is_active(ev.lam_max, next, bounds_.beta);
      event_ = Event::shrunk;
    }
    if (p_.trace) {
      TraceRecord r;
      r.iteration = iterations_;
      r.g = ev.g;
      r.gap = ev.gap();
      r.lam_max = ev.lam_max;
      r.beta = state_.beta;
      trace_.push_back(r);
    }
    if (!has_best_ || ev.gap() < best_eval_.gap()) {
      best_u_ = u_;
      best_eval_ = ev;
      has_best_ = true;
    }
    current_ = ev;
    if (ev.gap() <= eps_o_) {
      converged_ = true;
      return true;
    }

    const SymMatrix u_sd = ans_descent_point(u_, ev.grad, state_.lipschitz);
    state_.grad_accum += (0.5 * static_cast<double>(state_.k + 1)) * ev.grad;
    const SymMatrix u_ag = ans_aggregate_point(state_.center, state_.grad_accum, state_.lipschitz, state_.sigma);
    const double kk = static_cast<double>(state_.k);
    u_ = project_onto_unit_box((2.0 / (kk + 3.0)) * u_ag + ((kk + 1.0) / (kk + 3.0)) * u_sd);
    ++state_.k;
    ++iterations_;
    return false;
  }

  bool caps_exceeded() const { return iterations_ >= p_.max_iter || fevals_ >= p_.max_feval; }

  const AnsState& state() const { return state_; }
  const SymMatrix& u() const { return u_; }
  const OracleEval& current_eval() const { return current_; }
  Event last_event() const { return event_; }
  long iterations() const { return iterations_; }
  long fevals() const { return fevals_; }
  double rho_max() const { return rho_max_; }

  SolveReport report() const {
    SolveReport rep;
    rep.converged = converged_;
    if (converged_) {
      rep.u = u_;
      rep.eval = current_;
    } else {
      rep.u = best_u_;
      rep.eval = best_eval_;
    }
    rep.iterations = iterations_;
    rep.fevals = fevals_;
    rep.gap = rep.eval.gap();
    rep.beta_final = rep.eval.beta;
    rep.betas = betas_;
    rep.trace = trace_;
    return rep;
  }

 private:
  OracleEval eval(const SymMatrix& u, double beta) {
    ++fevals_;
    return oracle_eval(inst_, u, bounds_.alpha, beta, bounds_.beta);
  }

  void reset(const SymMatrix& u, double beta) {
    state_.center = u;
    state_.k = 0;
    state_.beta = beta;
    state_.lipschitz = beta * beta * rho_max_ * rho_max_;
    state_.grad_accum = SymMatrix::zeros(u.size());
    betas_.push_back(beta);
  }

  Instance inst_;
  Bounds bounds_;
  double eps_o_;
  AnsParams p_;
  double rho_max_ = 0.0;

  AnsState state_;
  SymMatrix u_;
  OracleEval current_;
  Event event_ = Event::none;
  long iterations_ = 0;
  long fevals_ = 0;
  bool converged_ = false;

  bool has_best_ = false;
  SymMatrix best_u_;
  OracleEval best_eval_;
  std::vector<double> betas_;
  std::vector<TraceRecord> trace_;
};

/// Runs AnsSolver until the gap test passes or an iteration/evaluation cap is hit.
inline SolveReport ans_solve(const Instance& inst, const Bounds& bounds, const SymMatrix& u_init, double beta_init,
                             double eps_o, const AnsParams& p = {}) {
  AnsSolver solver(inst, bounds, u_init, beta_init, eps_o, p);
  while (!solver.caps_exceeded()) {
    if (solver.step()) break;
  }
  return solver.report();
}

}  // namespace covsel
