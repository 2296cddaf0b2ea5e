#pragma once

#include <cmath>
#include <limits>

#include "covsel/linalg.hpp"

namespace covsel {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Sample covariance, full penalty matrix and the known-zero pattern.
/// Entries of rho on omega are the adaptive penalty levels; the rest stay fixed.
struct Instance {
  SymMatrix sigma;
  SymMatrix rho;
  PairSet omega;

  Index size() const { return sigma.size(); }

  /// Throws InvalidInput unless dimensions agree, entries are finite and rho >= 0.
  void check() const {
    if (sigma.empty() || rho.empty()) throw InvalidInput("Instance: empty matrices");
    if (sigma.size() != rho.size()) throw InvalidInput("Instance: sigma and rho differ in dimension");
    if (!sigma.all_finite() || !rho.all_finite()) throw InvalidInput("Instance: non-finite entries");
    if (rho.dense().minCoeff() < 0.0) throw InvalidInput("Instance: rho has negative entries");
    omega.check_dimension(size());
  }
};

/// Spectral bounds on the penalized maximizer.
struct Bounds {
  double alpha = 0.0;
  double beta = 0.0;
  double vartheta = 0.0;
  double theta = 0.0;
  double lam_min_shift = 0.0;  // lambda_min(Sigma + Diag(rho))
  bool degenerate = false;     // no bracketing root; beta clamped to 1/lam_min_shift
};

/// Sigma + Diag(rho).
inline SymMatrix shifted_sigma(const Instance& inst) {
  SymMatrix s = inst.sigma;
  for (Index i = 0; i < s.size(); ++i) s.set(i, i, s(i, i) + inst.rho(i, i));
  return s;
}

/// Returns a copy whose diagonal penalties are raised by the smallest multiple of
/// `perturb` that lifts lambda_min(Sigma + Diag(rho)) to at least `perturb`.
inline Instance validate(const Instance& inst, double perturb = 1e-8) {
  inst.check();
  if (!(perturb > 0.0)) throw InvalidInput("validate: perturbation must be positive");
  Instance out = inst;
  double lmin = lambda_min(shifted_sigma(out));
  if (lmin >= perturb) return out;
  double steps = std::ceil((perturb - lmin) / perturb);
  // The eigensolver is only accurate to rounding, so re-check and top up.
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (Index i = 0; i < out.size(); ++i) out.rho.set(i, i, inst.rho(i, i) + steps * perturb);
    lmin = lambda_min(shifted_sigma(out));
    if (lmin >= perturb) return out;
    steps += 1.0;
  }
  throw NumericalFailure("validate: could not make Sigma + Diag(rho) positive definite");
}

namespace detail {

inline void check_dim(const Instance& inst, const SymMatrix& x, const char* who) {
  if (x.size() != inst.size()) throw InvalidInput(std::string(who) + ": dimension mismatch");
}

/// log det via Cholesky; -inf when x is not positive definite.
inline double log_det_or_neg_inf(const SymMatrix& x) {
  Eigen::LLT<Eigen::MatrixXd> llt(x.dense());
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::VectorXd d = llt.matrixLLT().diagonal();
  if (d.minCoeff() <= 0.0) return kNegInf;
  return 2.0 * d.array().log().sum();
}

/// log det X - <Sigma, X> - sum rho_ij |X_ij| given log det X.
inline double penalized_from_logdet(const Instance& inst, const SymMatrix& x, double logdet) {
  return logdet - inner(inst.sigma, x) - inst.rho.dense().cwiseProduct(x.dense().cwiseAbs()).sum();
}

}  // namespace detail

/// log det X - <Sigma, X> - sum_{i,j} rho_ij |X_ij|; -inf unless X is positive definite.
inline double f_penalized(const Instance& inst, const SymMatrix& x) {
  detail::check_dim(inst, x, "f_penalized");
  const double ld = detail::log_det_or_neg_inf(x);
  if (ld == kNegInf) return kNegInf;
  return detail::penalized_from_logdet(inst, x, ld);
}

inline constexpr double kFeasibilityTol = 1e-12;

/// Objective of the constrained problem: the penalty skips omega, and X must vanish
/// there (to 1e-12) and be positive definite, otherwise -inf.
inline double f_constrained(const Instance& inst, const SymMatrix& x) {
  detail::check_dim(inst, x, "f_constrained");
  if (max_abs_on_set(x, inst.omega) > kFeasibilityTol) return kNegInf;
  const double ld = detail::log_det_or_neg_inf(x);
  if (ld == kNegInf) return kNegInf;
  Eigen::MatrixXd w = inst.rho.dense();
  for (auto [i, j] : inst.omega.pairs()) w(i, j) = 0.0;
  return ld - inner(inst.sigma, x) - w.cwiseProduct(x.dense().cwiseAbs()).sum();
}

/// log det X - <Sigma + rho * U, X>.
inline double phi(const Instance& inst, const SymMatrix& x, const SymMatrix& u) {
  detail::check_dim(inst, x, "phi");
  detail::check_dim(inst, u, "phi");
  const double ld = detail::log_det_or_neg_inf(x);
  if (ld == kNegInf) throw InvalidInput("phi: X is not positive definite");
  return ld - inner(inst.sigma + pointwise_product(inst.rho, u), x);
}

struct RootResult {
  double t = 0.0;
  bool degenerate = false;
};

/// Largest root of log t - a t - c = 0 (a > 0). The left side peaks at t = 1/a
/// with value -1 - log a - c and decreases afterwards, so the root is bracketed
/// by doubling and refined by bisection. If the peak is below zero beyond
/// tolerance there is no root; the peak location is returned, flagged.
inline RootResult largest_root_log_linear(double a, double c) {
  if (!(a > 0.0) || !std::isfinite(c)) throw InvalidInput("largest_root_log_linear: need a > 0 and finite c");
  auto h = [&](double t) { return std::log(t) - a * t - c; };
  const double peak = 1.0 / a;
  const double h_peak = -1.0 - std::log(a) - c;
  if (h_peak <= 0.0) return {peak, h_peak < -1e-8 * (1.0 + std::abs(c))};
  double lo = peak;
  double hi = 2.0 * peak;
  int doublings = 0;
  while (h(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 2000 || !std::isfinite(hi)) throw NumericalFailure("largest_root_log_linear: no bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), false};
}

/// alpha = 1/(||Sigma|| + ||rho||) and beta = largest root of
/// log t - lambda_min(Sigma + Diag(rho)) t - vartheta = 0 bracket the penalized
/// maximizer's spectrum. Requires a validated instance.
inline Bounds compute_bounds(const Instance& inst) {
  inst.check();
  const Index n = inst.size();
  const double nd = static_cast<double>(n);
  const SymMatrix shifted = shifted_sigma(inst);
  const EigenDecomp es = sym_eigen(shifted);
  const double a = es.lambda_min();
  if (!(a > 0.0)) throw InvalidInput("compute_bounds: Sigma + Diag(rho) is not positive definite; validate first");

  Bounds b;
  b.lam_min_shift = a;
  b.alpha = 1.0 / (spectral_norm(inst.sigma) + spectral_norm(inst.rho));

  const double tr = (inst.sigma + inst.rho).trace();
  b.theta = nd * (-1.0 - std::log(tr) + std::log(nd));

  const SymMatrix inv = es.reconstruct(es.lambda.cwiseInverse());
  const double logdet_inv = -es.lambda.array().log().sum();
  const double f_inv = detail::penalized_from_logdet(inst, inv, logdet_inv);
  b.vartheta = std::max(f_inv, b.theta) - (nd - 1.0) * (-1.0 - std::log(a));

  const RootResult r = largest_root_log_linear(a, b.vartheta);
  b.beta = std::max(r.t, b.alpha);
  b.degenerate = r.degenerate;
  return b;
}

}  // namespace covsel
