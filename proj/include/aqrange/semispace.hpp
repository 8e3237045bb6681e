#pragma once

// Dense complex matrices over a weighted semi-inner product <x,y>_A = <Ax,y>.
//
// Convention: the inner product is linear in the first argument and
// conjugate-linear in the second, <x,y>_A = y^H A x.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace aqr {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct InvalidMatrix : Error {
  using Error::Error;
};
/// Weight is not Hermitian PSD, or a cached factorization no longer agrees.
struct BrokenWeight : Error {
  using Error::Error;
};
struct InvalidQ : Error {
  using Error::Error;
};
/// T does not map null(A) into null(A), so it is not A-bounded.
struct NotABounded : Error {
  using Error::Error;
};
struct RankTooLow : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Matrix helpers

inline void require_square_finite(const CMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw InvalidMatrix(std::string(what) + ": expected a non-empty square matrix, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (!m.allFinite()) throw InvalidMatrix(std::string(what) + ": non-finite entry");
}

/// Standard Kronecker product, (a⊗b)(i*p+k, j*q+l) = a(i,j) b(k,l).
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Block diagonal a ⊕ b.
inline CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

inline double largest_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------
// QParam

/// The constraint value q of <x,y>_A = q, with 0 < |q| <= 1.
class QParam {
 public:
  explicit QParam(Complex q) : q_(checked(q, false)) {}
  QParam(double re, double im = 0.0) : QParam(Complex(re, im)) {}

  /// Admits q = 0 as well; the classical q-numerical range is defined for |q| <= 1.
  static QParam classical(Complex q) {
    QParam p(Complex(1.0, 0.0));
    p.q_ = checked(q, true);
    return p;
  }

  Complex value() const { return q_; }
  double modulus() const { return std::abs(q_); }
  /// sqrt(1 - |q|^2)
  double complement() const { return std::sqrt(std::max(0.0, 1.0 - std::norm(q_))); }
  bool unimodular() const { return std::abs(modulus() - 1.0) <= 1e-14; }

 private:
  static Complex checked(Complex q, bool allow_zero) {
    if (!std::isfinite(q.real()) || !std::isfinite(q.imag())) throw InvalidQ("q must be finite");
    double m = std::abs(q);
    if (m > 1.0 + 1e-12) throw InvalidQ("|q| must be at most 1, got " + std::to_string(m));
    if (m > 1.0) q /= m;  // round-off from composite parameters
    if (!allow_zero && m == 0.0) throw InvalidQ("q must be nonzero");
    return q;
  }

  Complex q_;
};

// ---------------------------------------------------------------------------
// Weight

/// A nonzero Hermitian positive-semidefinite matrix with its spectral factorization.
///
/// Eigenvalues at or below psd_tol (default 1e-10 * lambda_max) count as zero;
/// the reduced coordinates u = diag(sqrt(lambda_r)) U_r^H x live in C^rank and
/// satisfy <x,y>_A = v^H u.
class Weight {
 public:
  explicit Weight(const CMatrix& a, std::optional<double> psd_tol = std::nullopt) {
    require_square_finite(a, "weight");
    a_ = (a + a.adjoint()) / 2.0;
    const Eigen::Index n = a_.rows();

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a_);
    if (eig.info() != Eigen::Success) throw BrokenWeight("weight eigendecomposition failed");
    // Eigen sorts ascending; store descending.
    eigvals_ = eig.eigenvalues().reverse();
    eigvecs_ = eig.eigenvectors().rowwise().reverse();

    const double lmax = eigvals_(0);
    if (!(lmax > 0.0)) throw BrokenWeight("weight must be nonzero positive semidefinite");
    tol_ = psd_tol.value_or(1e-10 * lmax);
    if (tol_ < 0.0) throw BrokenWeight("psd_tol must be nonnegative");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (eigvals_(i) < -tol_)
        throw BrokenWeight("weight has eigenvalue " + std::to_string(eigvals_(i)) +
                           " below -psd_tol");
      if (eigvals_(i) <= tol_) eigvals_(i) = std::max(0.0, eigvals_(i));
    }
    rank_ = 0;
    while (rank_ < n && eigvals_(rank_) > tol_) ++rank_;

    RVector s = eigvals_.cwiseSqrt();
    RVector sinv = RVector::Zero(n);
    for (int i = 0; i < rank_; ++i) sinv(i) = 1.0 / s(i);
    sqrt_a_ = eigvecs_ * s.asDiagonal() * eigvecs_.adjoint();
    pinv_sqrt_a_ = eigvecs_ * sinv.asDiagonal() * eigvecs_.adjoint();

    const auto ur = eigvecs_.leftCols(rank_);
    restrict_ = s.head(rank_).asDiagonal() * ur.adjoint();
    lift_ = ur * sinv.head(rank_).asDiagonal();
    projector_ = ur * ur.adjoint();
  }

  static Weight identity(Eigen::Index n) { return Weight(CMatrix::Identity(n, n)); }

  const CMatrix& matrix() const { return a_; }
  const RVector& eigenvalues() const { return eigvals_; }
  const CMatrix& eigenvectors() const { return eigvecs_; }
  int rank() const { return rank_; }
  Eigen::Index dim() const { return a_.rows(); }
  double psd_tol() const { return tol_; }
  bool positive_definite() const { return rank_ == dim(); }

  const CMatrix& sqrt_a() const { return sqrt_a_; }
  const CMatrix& pinv_sqrt_a() const { return pinv_sqrt_a_; }
  /// Orthogonal projector onto range(A).
  const CMatrix& range_projector() const { return projector_; }
  /// rank x n: x -> reduced coordinates with ||x||_A = ||u||.
  const CMatrix& to_reduced() const { return restrict_; }
  /// n x rank: reduced coordinates -> a vector in range(A) with the same A-geometry.
  const CMatrix& from_reduced() const { return lift_; }

 private:
  CMatrix a_;
  RVector eigvals_;
  CMatrix eigvecs_;
  int rank_ = 0;
  double tol_ = 0.0;
  CMatrix sqrt_a_, pinv_sqrt_a_, restrict_, lift_, projector_;
};

// ---------------------------------------------------------------------------
// Semi-inner product and seminorms

inline void require_dim(const Weight& w, const CVector& v, const char* what) {
  if (v.size() != w.dim())
    throw DimensionMismatch(std::string(what) + ": vector of size " + std::to_string(v.size()) +
                            " against weight of size " + std::to_string(w.dim()));
}

inline void require_dim(const Weight& w, const CMatrix& t, const char* what) {
  require_square_finite(t, what);
  if (t.rows() != w.dim())
    throw DimensionMismatch(std::string(what) + ": matrix of size " + std::to_string(t.rows()) +
                            " against weight of size " + std::to_string(w.dim()));
}

/// <x,y>_A = y^H A x
inline Complex a_inner(const Weight& w, const CVector& x, const CVector& y) {
  require_dim(w, x, "a_inner");
  require_dim(w, y, "a_inner");
  return y.dot(w.matrix() * x);  // Eigen's dot conjugates the left operand
}

inline double a_norm_vec(const Weight& w, const CVector& x) {
  Complex s = a_inner(w, x, x);
  double scale = std::max(1.0, x.squaredNorm() * w.eigenvalues()(0));
  if (std::abs(s.imag()) >= 1e-10 * scale)
    throw BrokenWeight("non-real <x,x>_A: imaginary part " + std::to_string(s.imag()));
  return std::sqrt(std::max(0.0, s.real()));
}

namespace detail {

inline void require_a_bounded(const Weight& w, const CMatrix& t) {
  if (w.positive_definite()) return;
  const Eigen::Index n = w.dim();
  CMatrix at = w.matrix() * t;
  CMatrix leak = at * (CMatrix::Identity(n, n) - w.range_projector());
  double ref = at.norm();
  if (leak.norm() > 1e-8 * ref)
    throw NotABounded("operator maps null(A) outside null(A): leak " + std::to_string(leak.norm()) +
                      " vs ||AT||_F " + std::to_string(ref));
}

}  // namespace detail

/// A^{1/2} T A^{+1/2} as an n x n matrix acting on C^n (zero on null(A)).
inline CMatrix reduce(const Weight& w, const CMatrix& t) {
  require_dim(w, t, "reduce");
  detail::require_a_bounded(w, t);
  return w.sqrt_a() * t * w.pinv_sqrt_a();
}

/// The same operator written in the rank-dimensional reduced coordinates:
/// <Tx,y>_A = v^H B u with u, v the reduced coordinates of x, y.
inline CMatrix reduce_compact(const Weight& w, const CMatrix& t) {
  require_dim(w, t, "reduce");
  detail::require_a_bounded(w, t);
  return w.to_reduced() * t * w.from_reduced();
}

/// ||T||_A
inline double a_opnorm(const Weight& w, const CMatrix& t) {
  return largest_singular_value(reduce_compact(w, t));
}

}  // namespace aqr
