#pragma once

// Closed forms: the 2x2 canonical form e^{it}[[g, a], [b, g]] with its
// q-numerical range (a translated filled ellipse), the q-numerical radius of the
// 3x3 nilpotent Jordan block, and scalar operators.

#include "aqrange/radius.hpp"
#include "aqrange/semispace.hpp"

#include <cmath>
#include <numbers>

namespace aqr {

struct ComplexQUnsupported : Error {
  using Error::Error;
};
struct QOutOfRange : Error {
  using Error::Error;
};

/// u^H T u = e^{it} [[gamma, a], [b, gamma]] with 0 <= b <= a and 0 <= t < 2pi.
struct CanonicalForm2x2 {
  double t = 0.0;
  Complex gamma{};
  double a = 0.0;
  double b = 0.0;
  CMatrix u_similar;

  CMatrix matrix() const {
    CMatrix m(2, 2);
    m << gamma, a, b, gamma;
    return std::polar(1.0, t) * m;
  }
};

/// e^{it} { gamma q + r (M cos s + i m sin s) : 0 <= r <= 1, 0 <= s <= 2pi }.
struct EllipseDisk {
  Complex center{};
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double rotation = 0.0;

  /// Point of the set for the polar parameters (r, s).
  Complex point(double r, double s) const {
    return center + std::polar(1.0, rotation) *
                        Complex(r * semi_major * std::cos(s), r * semi_minor * std::sin(s));
  }

  bool contains(Complex z, double tol = 1e-12) const {
    Complex local = std::polar(1.0, -rotation) * (z - center);
    double x = local.real(), y = local.imag();
    if (semi_minor <= 0.0) {
      if (semi_major <= 0.0) return std::abs(local) <= tol;
      return std::abs(y) <= tol && std::abs(x) <= semi_major + tol;
    }
    double s = (x / semi_major) * (x / semi_major) + (y / semi_minor) * (y / semi_minor);
    return s <= 1.0 + tol;
  }
};

namespace detail {

inline double arg_or_zero(Complex z) { return z == Complex(0.0, 0.0) ? 0.0 : std::arg(z); }

/// Distance from (y0, y1), both >= 0 and outside the ellipse, to the ellipse with
/// semi-axes e0 >= e1 > 0. Newton on the standard projection equation, safeguarded by bisection.
inline double distance_point_ellipse(double e0, double e1, double y0, double y1) {
  if (y1 <= 0.0) {
    double numer = e0 * y0, denom = e0 * e0 - e1 * e1;
    if (numer < denom) {
      double xde = numer / denom;
      double x0 = e0 * xde, x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde * xde));
      return std::hypot(x0 - y0, x1);
    }
    return std::abs(y0 - e0);
  }
  if (y0 <= 0.0) return std::abs(y1 - e1);

  const double z0 = y0 / e0, z1 = y1 / e1;
  const double g = z0 * z0 + z1 * z1 - 1.0;
  if (g <= 0.0) return 0.0;
  const double r0 = (e0 / e1) * (e0 / e1);
  const double n0 = r0 * z0;
  // Root s of F(s) = (n0/(s+r0))^2 + (z1/(s+1))^2 - 1 on [z1 - 1, |(n0, z1)| - 1].
  double lo = z1 - 1.0, hi = std::hypot(n0, z1) - 1.0;
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double a = n0 / (s + r0), b = z1 / (s + 1.0);
    double fs = a * a + b * b - 1.0;
    if (fs > 0.0) lo = s;
    else hi = s;
    double df = -2.0 * (a * a / (s + r0) + b * b / (s + 1.0));
    double next = df != 0.0 ? s - fs / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    double delta = std::abs(next - s);
    s = next;
    if (delta <= 1e-12 * std::max(1.0, std::abs(s)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(s)))
      break;
  }
  double x0 = r0 * y0 / (s + r0), x1 = y1 / (s + 1.0);
  return std::hypot(x0 - y0, x1 - y1);
}

inline void require_2x2(const CMatrix& t) {
  require_square_finite(t, "canonical_2x2");
  if (t.rows() != 2) throw DimensionMismatch("canonical_2x2 needs a 2x2 matrix");
}

inline double real_q(Complex q) {
  if (q.imag() != 0.0) throw ComplexQUnsupported("closed forms need a real q in [0, 1]");
  if (q.real() < 0.0 || q.real() > 1.0)
    throw QOutOfRange("closed forms need 0 <= q <= 1, got " + std::to_string(q.real()));
  return q.real();
}

}  // namespace detail

inline CanonicalForm2x2 canonical_2x2(const CMatrix& t) {
  detail::require_2x2(t);
  const Complex half_trace = t.trace() / 2.0;
  const CMatrix t0 = t - half_trace * CMatrix::Identity(2, 2);

  // A unit x with x^H t0 x = 0: balance the eigenvectors of Re(t0) so that
  // Im(t0) also averages out.
  const CMatrix re = (t0 + t0.adjoint()) / 2.0;
  const CMatrix im = (t0 - t0.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(re);
  const CMatrix e = es.eigenvectors();
  const Complex k12 = (e.adjoint() * im * e)(0, 1);
  const double phi = std::numbers::pi / 2.0 - detail::arg_or_zero(k12);
  CVector x = (e.col(0) + std::polar(1.0, phi) * e.col(1)) / std::sqrt(2.0);
  CVector y(2);
  y << -std::conj(x(1)), std::conj(x(0));

  CMatrix v(2, 2);
  v << x, y;
  CMatrix m = v.adjoint() * t0 * v;
  if (std::abs(m(0, 1)) < std::abs(m(1, 0))) {
    v.col(0).swap(v.col(1));
    m = v.adjoint() * t0 * v;
  }
  const Complex upper = m(0, 1), lower = m(1, 0);
  // With a vanishing lower entry the rotation is free; pin it to 0.
  const bool one_sided = std::abs(lower) <= 1e-14 * std::abs(upper);
  const double tau =
      one_sided ? 0.0 : (detail::arg_or_zero(upper) + detail::arg_or_zero(lower)) / 2.0;
  const double psi = tau - detail::arg_or_zero(upper);
  CMatrix d = CMatrix::Identity(2, 2);
  d(1, 1) = std::polar(1.0, psi);

  CanonicalForm2x2 form;
  form.t = std::fmod(tau, 2.0 * std::numbers::pi);
  if (form.t < 0.0) form.t += 2.0 * std::numbers::pi;
  form.a = std::abs(upper);
  form.b = one_sided ? 0.0 : std::abs(lower);
  form.gamma = half_trace * std::polar(1.0, -form.t);
  form.u_similar = v * d;
  return form;
}

/// The q-numerical range of a 2x2 matrix as a translated filled ellipse; q real in [0, 1].
inline EllipseDisk q_range_2x2(const CanonicalForm2x2& form, Complex q) {
  const double qr = detail::real_q(q);
  const double c = (form.a + form.b) / 2.0;
  const double d = (form.a - form.b) / 2.0;
  const double p = std::sqrt(std::max(0.0, 1.0 - qr * qr));
  EllipseDisk e;
  e.rotation = form.t;
  e.center = std::polar(1.0, form.t) * form.gamma * qr;
  e.semi_major = c + p * d;
  e.semi_minor = d + p * c;
  return e;
}

/// Largest modulus over the ellipse disk; attained on the boundary (r = 1).
inline double q_radius_2x2(const CanonicalForm2x2& form, Complex q) {
  const EllipseDisk e = q_range_2x2(form, q);
  auto mod2 = [&](double s) { return std::norm(e.point(1.0, s)); };
  return std::sqrt(std::max(0.0, detail::periodic_max(mod2, 1024).second));
}

/// Smallest modulus over the ellipse disk: 0 when it contains the origin.
inline double q_crawford_2x2(const CanonicalForm2x2& form, Complex q) {
  const EllipseDisk e = q_range_2x2(form, q);
  if (e.contains(Complex(0.0, 0.0), 0.0)) return 0.0;
  // The origin in the ellipse's own frame, folded into the first quadrant.
  const Complex o = std::polar(1.0, -e.rotation) * (-e.center);
  const double y0 = std::abs(o.real()), y1 = std::abs(o.imag());
  const double big = e.semi_major, small = e.semi_minor;
  if (big <= 0.0) return std::abs(e.center);
  if (small <= 0.0) return std::hypot(std::max(0.0, y0 - big), y1);
  return detail::distance_point_ellipse(big, small, y0, y1);
}

inline double q_radius_2x2(const CMatrix& t, Complex q) { return q_radius_2x2(canonical_2x2(t), q); }
inline double q_crawford_2x2(const CMatrix& t, Complex q) {
  return q_crawford_2x2(canonical_2x2(t), q);
}

/// q-numerical radius of [[0,1,0],[0,0,1],[0,0,0]] for 1/2 <= q <= 1.
inline double jordan3_q_radius(double q) {
  if (!(q >= 0.5 && q <= 1.0))
    throw QOutOfRange("jordan3_q_radius needs 1/2 <= q <= 1, got " + std::to_string(q));
  const double inner = (9.0 + 7.0 * q) * std::sqrt((1.0 - q) * (9.0 + 7.0 * q));
  return std::sqrt(27.0 + 18.0 * q - 13.0 * q * q + inner) / 8.0;
}

inline CMatrix jordan3() {
  CMatrix j = CMatrix::Zero(3, 3);
  j(0, 1) = 1.0;
  j(1, 2) = 1.0;
  return j;
}

}  // namespace aqr
