#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "covsel/linalg.hpp"

namespace covsel {

enum class Family { density, spike };

struct GenConfig {
  Index n = 100;
  double density = 0.1;
  double tau = 0.15;
  double vartheta_gen = 1e-4;
  std::uint64_t seed = 1;
  Family family = Family::density;
  Index omega_bandwidth = 2;
};

struct GeneratedInstance {
  SymMatrix a;      // sparse ground-truth precision
  SymMatrix sigma;  // shifted noisy covariance
  PairSet omega;
  SymMatrix b;      // A^{-1} + tau V before the shift
};

/// Portable random stream: a 64-bit Mersenne twister keyed by (seed, stream id)
/// through std::seed_seq, with the integer-to-real mapping done here because the
/// standard distributions are implementation-defined.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool bernoulli(double p) { return uniform01() < p; }
  /// Uniform on {0, ..., n-1}, rejection sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do r = engine_(); while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

namespace stream_id {
inline constexpr std::uint32_t truth = 1;
inline constexpr std::uint32_t noise = 2;
}  // namespace stream_id

/// Ground-truth precision matrix.
///   density: each upper off-diagonal entry is nonzero with probability
///     `density`, drawn uniform in [-1,1]; the diagonal is the row absolute sum
///     plus one, so A is strictly diagonally dominant.
///   spike: diagonal uniform in [0.9,1.1], ceil(n/10) random off-diagonal pairs
///     set to +1 or -1, then the diagonal is raised just enough for lambda_min >= 0.1.
inline SymMatrix gen_truth(const GenConfig& cfg) {
  if (cfg.n < 1) throw InvalidInput("gen_truth: n must be >= 1");
  const Index n = cfg.n;
  RandomStream rng(cfg.seed, stream_id::truth);
  SymMatrix a(n);

  if (cfg.family == Family::density) {
    if (!(cfg.density > 0.0 && cfg.density <= 1.0)) throw InvalidInput("gen_truth: density must lie in (0, 1]");
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (rng.bernoulli(cfg.density)) {
          double v = 0.0;
          while (v == 0.0) v = rng.uniform(-1.0, 1.0);
          a.set(i, j, v);
        }
    for (Index i = 0; i < n; ++i) a.set(i, i, a.dense().row(i).cwiseAbs().sum() + 1.0);
    return a;
  }

  for (Index i = 0; i < n; ++i) a.set(i, i, rng.uniform(0.9, 1.1));
  const auto unordered = static_cast<std::size_t>(n * (n - 1) / 2);
  const std::size_t spikes = std::min(unordered, static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(n))));
  std::set<std::pair<Index, Index>> used;
  while (used.size() < spikes) {
    Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    if (!used.insert({i, j}).second) continue;
    a.set(i, j, rng.bernoulli(0.5) ? 1.0 : -1.0);
  }
  constexpr double floor = 0.1;
  double shift = floor - lambda_min(a);
  for (int attempt = 0; shift > 0.0 && attempt < 64; ++attempt) {
    for (Index i = 0; i < n; ++i) a.set(i, i, a(i, i) + shift);
    shift = floor - lambda_min(a);
    if (shift > 0.0) shift = std::max(shift, 1e-15);
  }
  return a;
}

/// B = A^{-1} + tau V with V symmetric uniform on [-1,1]; Sigma = B shifted so
/// lambda_min(Sigma) >= vartheta. Returns (Sigma, B).
inline std::pair<SymMatrix, SymMatrix> make_sigma(const SymMatrix& a, double tau, double vartheta_gen,
                                                  std::uint64_t seed) {
  const Index n = a.size();
  Eigen::LLT<Eigen::MatrixXd> llt(a.dense());
  if (llt.info() != Eigen::Success) throw NumericalFailure("make_sigma: A is not positive definite");
  const SymMatrix a_inv = SymMatrix::symmetrize(llt.solve(Eigen::MatrixXd::Identity(n, n)));
  if (!a_inv.all_finite()) throw NumericalFailure("make_sigma: A is singular");

  RandomStream rng(seed, stream_id::noise);
  SymMatrix v(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) v.set(i, j, rng.uniform(-1.0, 1.0));

  const SymMatrix b = a_inv + tau * v;
  const double shift = std::min(lambda_min(b) - vartheta_gen, 0.0);
  SymMatrix sigma = b;
  if (shift < 0.0)
    for (Index i = 0; i < n; ++i) sigma.set(i, i, b(i, i) - shift);
  return {sigma, b};
}

/// All (i,j) with A_ij exactly zero and |i - j| >= bandwidth.
inline PairSet derive_omega(const SymMatrix& a, Index bandwidth) {
  if (bandwidth < 1) throw InvalidInput("derive_omega: bandwidth must be >= 1");
  std::vector<PairSet::Pair> pairs;
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = i + bandwidth; j < a.size(); ++j)
      if (a(i, j) == 0.0) pairs.emplace_back(i, j);
  return PairSet::from_unordered(pairs);
}

inline GeneratedInstance generate(const GenConfig& cfg) {
  GeneratedInstance g;
  g.a = gen_truth(cfg);
  std::tie(g.sigma, g.b) = make_sigma(g.a, cfg.tau, cfg.vartheta_gen, cfg.seed);
  g.omega = derive_omega(g.a, cfg.omega_bandwidth);
  return g;
}

}  // namespace covsel
