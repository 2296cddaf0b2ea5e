#pragma once

#include <cmath>
#include <limits>

#include "covsel/problem.hpp"

namespace covsel {

inline constexpr double kActiveRelTol = 1e-9;

/// Everything the dual solvers need at one dual point U for a fixed spectral box.
struct OracleEval {
  SymMatrix x;        // maximizer of phi(., U) over alpha I <= X <= beta I
  double g = 0.0;     // dual value g_{rho,beta}(U)
  SymMatrix grad;     // gradient of g at U, equal to -rho * X
  double f = 0.0;     // penalized primal objective at X
  double lam_max = 0.0;
  double lam_min = 0.0;
  double beta = 0.0;  // box upper bound used
  bool active = false;

  double gap() const { return g - f; }
};

/// True when lambda_max sits on the upper bound beta and beta can still grow.
inline bool is_active(double lam_max, double beta, double beta_rho) {
  return lam_max >= beta * (1.0 - kActiveRelTol) && beta < beta_rho;
}

/// Closed-form dual oracle. With Sigma + rho * U = Q diag(d) Q^T the problem
/// max { log det X - <Sigma + rho * U, X> : alpha I <= X <= beta I } separates
/// over the eigenbasis, giving x_i = clamp(1/d_i, alpha, beta) (x_i = beta when
/// d_i <= 0) and g = sum_i log x_i - d_i x_i.
inline OracleEval oracle_eval(const Instance& inst, const SymMatrix& u, double alpha, double beta,
                              double beta_rho = std::numeric_limits<double>::infinity()) {
  if (u.size() != inst.size()) throw InvalidInput("oracle_eval: dimension mismatch");
  if (!(alpha > 0.0) || !(beta >= alpha)) throw InvalidInput("oracle_eval: need 0 < alpha <= beta");
  if (!u.all_finite() || u.max_abs() > 1.0 + 1e-12) throw InvalidInput("oracle_eval: U lies outside the unit box");

  const SymMatrix c = inst.sigma + pointwise_product(inst.rho, u);
  const EigenDecomp es = sym_eigen(c);
  const Index n = inst.size();

  Eigen::VectorXd xs(n);
  double g = 0.0;
  double logdet = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double d = es.lambda(i);
    const double xi = d > 0.0 ? std::clamp(1.0 / d, alpha, beta) : beta;
    xs(i) = xi;
    logdet += std::log(xi);
    g += std::log(xi) - d * xi;
  }

  OracleEval ev;
  ev.x = es.reconstruct(xs);
  ev.g = g;
  ev.grad = pointwise_product(inst.rho, ev.x) * -1.0;
  ev.f = detail::penalized_from_logdet(inst, ev.x, logdet);
  ev.lam_max = xs.maxCoeff();
  ev.lam_min = xs.minCoeff();
  ev.beta = beta;
  ev.active = is_active(ev.lam_max, beta, beta_rho);
  if (!std::isfinite(ev.g) || !std::isfinite(ev.f)) throw NumericalFailure("oracle_eval: non-finite dual or primal value");
  return ev;
}

inline double duality_gap(const OracleEval& ev) { return ev.gap(); }

}  // namespace covsel
