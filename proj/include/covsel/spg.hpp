#pragma once

#include <algorithm>
#include <cmath>
#include <deque>

#include "covsel/solve_report.hpp"

namespace covsel {

struct SpgParams {
  double gamma = 1e-4;  // sufficient decrease
  int memory = 8;       // nonmonotone window M
  double sigma1 = 0.1;  // backtracking safeguards
  double sigma2 = 0.9;
  double alpha_min = 1e-15;
  double alpha_max = 1e15;
  double alpha0 = 0.0;  // <= 0 selects 1/||grad g(U_0)||_inf
  long max_iter = 50000;
  long max_feval = 100000;
  int max_backtracks = 60;
  bool trace = false;

  void check() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("SpgParams: gamma must lie in (0,1)");
    if (memory < 1) throw InvalidInput("SpgParams: memory must be >= 1");
    if (!(sigma1 > 0.0 && sigma1 < sigma2 && sigma2 < 1.0)) throw InvalidInput("SpgParams: need 0 < sigma1 < sigma2 < 1");
    if (!(alpha_min > 0.0 && alpha_min < alpha_max)) throw InvalidInput("SpgParams: need 0 < alpha_min < alpha_max");
    if (max_iter < 0 || max_feval < 1) throw InvalidInput("SpgParams: bad iteration caps");
  }
};

namespace detail {

/// Minimizer of the 1-D quadratic through g(0), g'(0) = dd and g(lambda),
/// safeguarded into [sigma1 lambda, sigma2 lambda]; lambda/2 if degenerate.
inline double backtrack_step(double lambda, double dd, double g0, double g_new, double sigma1, double sigma2) {
  const double curv = g_new - g0 - lambda * dd;
  double next = 0.5 * lambda;
  if (curv > 0.0) {
    const double cand = -0.5 * lambda * lambda * dd / curv;
    if (std::isfinite(cand)) next = cand;
  }
  return std::clamp(next, sigma1 * lambda, sigma2 * lambda);
}

inline void check_in_box(const SymMatrix& u, Index n, const char* who) {
  if (u.size() != n) throw InvalidInput(std::string(who) + ": U has the wrong dimension");
  if (!u.all_finite() || u.max_abs() > 1.0) throw InvalidInput(std::string(who) + ": U lies outside the unit box");
}

inline TraceRecord make_record(long it, const OracleEval& ev) {
  TraceRecord r;
  r.iteration = it;
  r.g = ev.g;
  r.gap = ev.gap();
  r.lam_max = ev.lam_max;
  r.beta = ev.beta;
  return r;
}

}  // namespace detail

/// Spectral projected gradient (SPG2 variant) on min { g_{rho,beta}(U) : |U_ij| <= 1 }
/// for a fixed beta, with a nonmonotone Armijo search and safeguarded
/// Barzilai-Borwein steps. Stops as soon as g - f <= eps_o at the current pair.
inline SolveReport spg_solve(const Instance& inst, double alpha, double beta, double beta_rho, const SymMatrix& u0,
                             double eps_o, const SpgParams& p = {}) {
  p.check();
  detail::check_in_box(u0, inst.size(), "spg_solve");
  if (!(eps_o > 0.0)) throw InvalidInput("spg_solve: eps_o must be positive");
  if (!(alpha > 0.0 && alpha <= beta && beta <= beta_rho)) throw InvalidInput("spg_solve: need 0 < alpha <= beta <= beta_rho");

  SolveReport rep;
  rep.betas.push_back(beta);
  rep.beta_final = beta;

  SymMatrix u = u0;
  OracleEval ev = oracle_eval(inst, u, alpha, beta, beta_rho);
  rep.fevals = 1;
  if (p.trace) rep.trace.push_back(detail::make_record(0, ev));

  SymMatrix best_u = u;
  OracleEval best_ev = ev;

  std::deque<double> window{ev.g};
  double step = p.alpha0 > 0.0 ? p.alpha0 : 1.0 / std::max(ev.grad.max_abs(), 1e-300);
  step = std::clamp(step, p.alpha_min, p.alpha_max);

  while (true) {
    if (ev.gap() <= eps_o) {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= p.max_iter || rep.fevals >= p.max_feval) break;

    const SymMatrix d = project_onto_unit_box(u.dense() - step * ev.grad.dense()) - u;
    const double dd = inner(d, ev.grad);
    // A zero direction means U is stationary for this beta; nothing left to gain.
    if (d.max_abs() == 0.0 || !(dd < 0.0)) break;

    const double g_ref = *std::max_element(window.begin(), window.end());
    double lambda = 1.0;
    int backtracks = 0;
    SymMatrix u_new;
    OracleEval ev_new;
    while (true) {
      u_new = project_onto_unit_box(u + lambda * d);
      ev_new = oracle_eval(inst, u_new, alpha, beta, beta_rho);
      ++rep.fevals;
      if (ev_new.g <= g_ref + p.gamma * lambda * dd) break;
      if (++backtracks > p.max_backtracks) throw StalledLineSearch("spg_solve: no acceptable step after backtracking");
      lambda = detail::backtrack_step(lambda, dd, ev.g, ev_new.g, p.sigma1, p.sigma2);
    }

    const SymMatrix s = u_new - u;
    const SymMatrix y = ev_new.grad - ev.grad;
    const double b = inner(s, y);
    step = b <= 0.0 ? p.alpha_max : std::clamp(inner(s, s) / b, p.alpha_min, p.alpha_max);

    u = std::move(u_new);
    ev = std::move(ev_new);
    ++rep.iterations;
    window.push_back(ev.g);
    if (static_cast<int>(window.size()) > p.memory) window.pop_front();

    if (p.trace) {
      TraceRecord r = detail::make_record(rep.iterations, ev);
      r.step = lambda;
      r.g_ref = g_ref;
      r.dir_deriv = dd;
      rep.trace.push_back(r);
    }
    if (ev.gap() < best_ev.gap()) {
      best_u = u;
      best_ev = ev;
    }
  }

  if (rep.converged) {
    rep.u = std::move(u);
    rep.eval = std::move(ev);
  } else {
    rep.u = std::move(best_u);
    rep.eval = std::move(best_ev);
  }
  rep.gap = rep.eval.gap();
  return rep;
}

/// Adaptive SPG: runs SPG with beta = beta0, beta0 r, beta0 r^2, ... (capped at
/// bounds.beta), warm-starting each stage from the previous dual point, until
/// the maximizer no longer touches beta or beta reaches bounds.beta.
inline SolveReport aspg_solve(const Instance& inst, const Bounds& bounds, const SymMatrix& u0, double eps_o,
                              double beta0 = 1.0, double r_beta = 10.0, const SpgParams& p = {}) {
  if (!(r_beta > 1.0)) throw InvalidInput("aspg_solve: r_beta must exceed 1");
  if (!(beta0 >= bounds.alpha && beta0 <= bounds.beta)) throw InvalidInput("aspg_solve: beta0 outside [alpha, beta_rho]");

  SolveReport total;
  SymMatrix u = u0;
  double beta = beta0;
  while (true) {
    SpgParams stage = p;
    stage.max_iter = p.max_iter - total.iterations;
    stage.max_feval = std::max<long>(1, p.max_feval - total.fevals);
    SolveReport rep = spg_solve(inst, bounds.alpha, beta, bounds.beta, u, eps_o, stage);

    total.iterations += rep.iterations;
    total.fevals += rep.fevals;
    total.betas.push_back(beta);
    total.trace.insert(total.trace.end(), rep.trace.begin(), rep.trace.end());
    total.u = std::move(rep.u);
    total.eval = std::move(rep.eval);
    total.gap = rep.gap;
    total.beta_final = beta;
    total.converged = rep.converged;

    if (!rep.converged) break;
    if (beta >= bounds.beta || !total.eval.active) break;
    u = total.u;
    beta = std::min(beta * r_beta, bounds.beta);
  }
  return total;
}

}  // namespace covsel
