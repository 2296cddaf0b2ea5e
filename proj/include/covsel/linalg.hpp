#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "covsel/errors.hpp"

namespace covsel {

using Index = Eigen::Index;

/// Dense real symmetric matrix. Every mutation keeps (i,j) and (j,i) equal,
/// and the checked constructors refuse input that is not symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Index n) : m_(Eigen::MatrixXd::Zero(n, n)) {
    if (n < 1) throw InvalidInput("SymMatrix: dimension must be at least 1");
  }

  static SymMatrix zeros(Index n) { return SymMatrix(n); }

  static SymMatrix identity(Index n) {
    SymMatrix s(n);
    s.m_.diagonal().setOnes();
    return s;
  }

  static SymMatrix constant(Index n, double value) {
    SymMatrix s(n);
    s.m_.setConstant(value);
    return s;
  }

  static SymMatrix diagonal(std::span<const double> d) {
    SymMatrix s(static_cast<Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) s.m_(Index(i), Index(i)) = d[i];
    return s;
  }

  static SymMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  /// Row-major nested list; must be square and exactly symmetric.
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const Index n = static_cast<Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    Index i = 0;
    for (const auto& r : rows) {
      if (static_cast<Index>(r.size()) != n) throw InvalidInput("SymMatrix: ragged rows");
      Index j = 0;
      for (double v : r) m(i, j++) = v;
      ++i;
    }
    return from_dense(m);
  }

  /// Adopts a square matrix, rejecting any asymmetry.
  static SymMatrix from_dense(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw InvalidInput("SymMatrix: matrix must be square and non-empty");
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = j + 1; i < m.rows(); ++i)
        if (!(m(i, j) == m(j, i)) && !(std::isnan(m(i, j)) && std::isnan(m(j, i))))
          throw InvalidInput("SymMatrix: input is not symmetric");
    SymMatrix s;
    s.m_ = m;
    return s;
  }

  /// Returns (M + M^T) / 2, which is exactly symmetric.
  static SymMatrix symmetrize(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw InvalidInput("SymMatrix: matrix must be square and non-empty");
    SymMatrix s;
    s.m_ = m;
    const Index n = m.rows();
    for (Index j = 0; j < n; ++j)
      for (Index i = j + 1; i < n; ++i) {
        const double v = 0.5 * (m(i, j) + m(j, i));
        s.m_(i, j) = v;
        s.m_(j, i) = v;
      }
    return s;
  }

  Index size() const { return m_.rows(); }
  bool empty() const { return m_.size() == 0; }

  double operator()(Index i, Index j) const { return m_(i, j); }

  void set(Index i, Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Eigen::MatrixXd& dense() const { return m_; }

  bool all_finite() const { return m_.allFinite(); }
  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }
  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace(); }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_same(o);
    m_ += o.m_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    check_same(o);
    m_ -= o.m_;
    return *this;
  }
  SymMatrix& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.size() == b.size() && a.m_ == b.m_;
  }

 private:
  void check_same(const SymMatrix& o) const {
    if (o.size() != size()) throw InvalidInput("SymMatrix: dimension mismatch");
  }

  Eigen::MatrixXd m_;
};

/// Frobenius inner product <A, B> = Tr(A B^T).
inline double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw InvalidInput("inner: dimension mismatch");
  return a.dense().cwiseProduct(b.dense()).sum();
}

/// Orthonormal eigenvectors (columns of q) and eigenvalues sorted descending.
struct EigenDecomp {
  Eigen::MatrixXd q;
  Eigen::VectorXd lambda;

  double lambda_max() const { return lambda(0); }
  double lambda_min() const { return lambda(lambda.size() - 1); }

  /// Q diag(values) Q^T, symmetrized.
  SymMatrix reconstruct(const Eigen::VectorXd& values) const {
    return SymMatrix::symmetrize(q * values.asDiagonal() * q.transpose());
  }
  SymMatrix reconstruct() const { return reconstruct(lambda); }
};

inline EigenDecomp sym_eigen(const SymMatrix& m) {
  if (m.empty()) throw InvalidInput("sym_eigen: empty matrix");
  if (!m.all_finite()) throw InvalidInput("sym_eigen: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense(), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalFailure("sym_eigen: eigensolver did not converge");
  // Eigen sorts ascending.
  EigenDecomp out;
  out.lambda = es.eigenvalues().reverse();
  out.q = es.eigenvectors().rowwise().reverse();
  return out;
}

/// Eigenvalues only, descending.
inline Eigen::VectorXd sym_eigenvalues(const SymMatrix& m) {
  if (m.empty()) throw InvalidInput("sym_eigenvalues: empty matrix");
  if (!m.all_finite()) throw InvalidInput("sym_eigenvalues: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("sym_eigenvalues: eigensolver did not converge");
  return es.eigenvalues().reverse();
}

inline double lambda_min(const SymMatrix& m) {
  const auto ev = sym_eigenvalues(m);
  return ev(ev.size() - 1);
}

inline double lambda_max(const SymMatrix& m) { return sym_eigenvalues(m)(0); }

/// Operator 2-norm: the largest eigenvalue magnitude.
inline double spectral_norm(const SymMatrix& m) {
  const auto ev = sym_eigenvalues(m);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

inline SymMatrix pointwise_product(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw InvalidInput("pointwise_product: dimension mismatch");
  return SymMatrix::from_dense(a.dense().cwiseProduct(b.dense()));
}

/// Euclidean projection onto {U symmetric : |U_ij| <= 1}: symmetrize, then clamp.
inline SymMatrix project_onto_unit_box(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw InvalidInput("project_onto_unit_box: non-finite entries");
  Eigen::MatrixXd c = SymMatrix::symmetrize(m).dense().cwiseMax(-1.0).cwiseMin(1.0);
  return SymMatrix::from_dense(c);
}

inline SymMatrix project_onto_unit_box(const SymMatrix& m) { return project_onto_unit_box(m.dense()); }

/// Symmetric set of off-diagonal index pairs, stored with both orientations.
class PairSet {
 public:
  using Pair = std::pair<Index, Index>;

  PairSet() = default;

  /// Builds from any list of pairs; each pair is inserted together with its mirror.
  static PairSet from_unordered(const std::vector<Pair>& pairs) {
    PairSet s;
    s.pairs_.reserve(pairs.size() * 2);
    for (auto [i, j] : pairs) {
      check_pair(i, j);
      s.pairs_.emplace_back(i, j);
      s.pairs_.emplace_back(j, i);
    }
    s.normalize();
    return s;
  }

  /// Builds from a list that must already contain every mirror pair.
  static PairSet from_ordered(const std::vector<Pair>& pairs) {
    PairSet s;
    s.pairs_ = pairs;
    for (auto [i, j] : pairs) check_pair(i, j);
    s.normalize();
    for (auto [i, j] : s.pairs_)
      if (!s.contains(j, i)) throw InvalidInput("PairSet: pair list is not symmetric");
    return s;
  }

  bool empty() const { return pairs_.empty(); }
  /// Number of ordered pairs (twice the number of unordered ones).
  std::size_t size() const { return pairs_.size(); }
  const std::vector<Pair>& pairs() const { return pairs_; }

  bool contains(Index i, Index j) const { return std::binary_search(pairs_.begin(), pairs_.end(), Pair{i, j}); }

  Index max_index() const {
    Index m = -1;
    for (auto [i, j] : pairs_) m = std::max({m, i, j});
    return m;
  }

  void check_dimension(Index n) const {
    if (max_index() >= n) throw InvalidInput("PairSet: index out of range for dimension " + std::to_string(n));
  }

  /// n x n 0/1 indicator of membership.
  Eigen::MatrixXd indicator(Index n) const {
    check_dimension(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (auto [i, j] : pairs_) m(i, j) = 1.0;
    return m;
  }

  friend bool operator==(const PairSet&, const PairSet&) = default;

 private:
  static void check_pair(Index i, Index j) {
    if (i < 0 || j < 0) throw InvalidInput("PairSet: negative index");
    if (i == j) throw InvalidInput("PairSet: diagonal pairs are not allowed");
  }

  void normalize() {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  }

  std::vector<Pair> pairs_;
};

inline double max_abs_on_set(const SymMatrix& m, const PairSet& s) {
  s.check_dimension(m.size());
  double best = 0.0;
  for (auto [i, j] : s.pairs()) best = std::max(best, std::abs(m(i, j)));
  return best;
}

}  // namespace covsel
