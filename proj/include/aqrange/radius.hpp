#pragma once

// Estimators for the A-numerical radius / Crawford number and their
// (A,q) generalizations, plus an independent brute-force grid oracle.
//
// Everything runs on the compact reduced matrix B (see reduce_compact), where
// A-unit vectors become ordinary unit vectors u in C^rank. For a fixed u the
// admissible partners are y = conj(q) u + p e^{i theta} z with z a unit vector
// orthogonal to u and p = sqrt(1 - |q|^2), so
//
//   <Bu, y> = q h + p e^{-i theta} z^H w,   h = u^H B u,  w = (I - u u^H) B u,
//
// which sweeps the circle (rank 2) or the disk (rank >= 3) of radius p|w|
// centred at q h. The sup and inf over the partner are therefore closed form
// and only u has to be searched for.

#include "aqrange/pairset.hpp"
#include "aqrange/semispace.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace aqr {

struct Budget {
  int restarts = 64;
  int iterations = 500;
  /// Pairs drawn by sample_pairs to seed the first restart.
  int samples = 256;
  /// Angular resolution of the rotation sweep (points on [0, 2pi)).
  double grid_resolution = 256;

  /// The same search with k times as many restarts and initial samples.
  Budget scaled(int k) const {
    Budget b = *this;
    b.restarts *= k;
    b.samples *= k;
    return b;
  }
  bool operator==(const Budget&) const = default;
};

enum class BoundDirection { LowerBoundOfSup, UpperBoundOfInf, TwoSided };

inline const char* to_string(BoundDirection d) {
  switch (d) {
    case BoundDirection::LowerBoundOfSup: return "lower_bound_of_sup";
    case BoundDirection::UpperBoundOfInf: return "upper_bound_of_inf";
    case BoundDirection::TwoSided: return "two_sided";
  }
  return "unknown";
}

struct Estimate {
  double value = 0.0;
  BoundDirection direction = BoundDirection::TwoSided;
  CVector witness_x;
  CVector witness_y;
  Budget budget;
  std::uint64_t seed = 0;
};

struct GapValue {
  double op_norm = 0.0;
  double radius_or_crawford = 0.0;
  double gap = 0.0;
};

struct OracleTooLarge : Error {
  using Error::Error;
};

/// |<T x, y>_A| for the estimate's witness pair.
inline double witness_value(const Weight& w, const CMatrix& t, const Estimate& e) {
  return std::abs(a_inner(w, t * e.witness_x, e.witness_y));
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(restart) + 1));
}

inline Complex phase_of(Complex z) {
  double m = std::abs(z);
  return m > 0.0 ? z / m : Complex(1.0, 0.0);
}

/// Any unit vector orthogonal to the given orthonormal columns.
inline CVector orthogonal_unit(const std::vector<CVector>& basis, Eigen::Index n) {
  CVector best;
  double best_norm = -1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    CVector e = CVector::Unit(n, k);
    for (const auto& b : basis) e -= b.dot(e) * b;
    double nn = e.norm();
    if (nn > best_norm) {
      best_norm = nn;
      best = e;
    }
  }
  return best / best_norm;
}

/// Maximizer of a function on [lo, hi] by golden-section search.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double x = (a + b) / 2.0;
  return {x, f(x)};
}

/// max over phi of a periodic function: coarse grid, then golden-section
/// refinement around the three best grid local maxima.
template <class F>
std::pair<double, double> periodic_max(F&& f, int grid) {
  grid = std::max(grid, 8);
  const double h = 2.0 * std::numbers::pi / grid;
  std::vector<double> vals(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) vals[k] = f(k * h);
  std::vector<int> peaks;
  for (int k = 0; k < grid; ++k) {
    double l = vals[(k + grid - 1) % grid], r = vals[(k + 1) % grid];
    if (vals[k] >= l && vals[k] >= r) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vals[a] > vals[b]; });
  if (peaks.size() > 3) peaks.resize(3);
  std::pair<double, double> best{0.0, -std::numeric_limits<double>::infinity()};
  for (int k : peaks) {
    auto cand = golden_max(f, (k - 1) * h, (k + 1) * h, 1e-10);
    if (vals[k] > cand.second) cand = {k * h, vals[k]};
    if (cand.second > best.second) best = cand;
  }
  return best;
}

/// Hermitian part of e^{i phi} B.
inline CMatrix rotated_hermitian_part(const CMatrix& b, double phi) {
  CMatrix r = std::polar(1.0, phi) * b;
  return (r + r.adjoint()) / 2.0;
}

/// Evaluates h = u^H B u, |w| and gradients of the sup/inf objectives on the unit sphere.
class QObjective {
 public:
  QObjective(const CMatrix& b, const QParam& q)
      : b_(b), bh_(b.adjoint()), qmod_(q.modulus()), p_(q.complement()),
        diagonal_(b.isDiagonal(0.0)), circle_(b.rows() == 2), n_(b.rows()),
        bu_(n_), bhu_(n_), bhbu_(n_) {
    if (diagonal_) diag_ = b.diagonal();
  }

  Eigen::Index dim() const { return n_; }
  double qmod() const { return qmod_; }
  double p() const { return p_; }

  /// Fills Bu, h and |w|; returns |w|.
  double parts(const CVector& u) {
    if (diagonal_) bu_ = diag_.cwiseProduct(u);
    else bu_.noalias() = b_ * u;
    h_ = u.dot(bu_);
    // |Bu - h u| directly; |Bu|^2 - |h|^2 loses half the digits near eigenvectors.
    wn_ = (bu_ - h_ * u).norm();
    return wn_;
  }
  Complex h() const { return h_; }
  double wnorm() const { return wn_; }
  const CVector& bu() const { return bu_; }

  double sup_value() const { return qmod_ * std::abs(h_) + p_ * wn_; }
  /// Signed gap between |q h| and p|w|.
  double deficit() const { return qmod_ * std::abs(h_) - p_ * wn_; }
  double inf_value() const {
    double d = deficit();
    return circle_ || p_ == 0.0 ? std::abs(d) : std::max(0.0, d);
  }
  /// Smooth surrogate minimized in place of inf_value.
  double inf_surrogate() const {
    double v = inf_value();
    return v * v;
  }

  /// Riemannian gradient of sup_value at u (call parts(u) first).
  void sup_gradient(const CVector& u, CVector& g) {
    g.setZero(n_);
    adjoint_products(u);
    double hm = std::abs(h_);
    if (qmod_ > 0.0 && hm > 1e-300) g += (qmod_ / hm) * (std::conj(h_) * bu_ + h_ * bhu_);
    if (p_ > 0.0 && wn_ > 1e-150)
      g += (p_ / wn_) * (bhbu_ - std::conj(h_) * bu_ - h_ * bhu_);
    project(u, g);
  }

  /// Riemannian gradient of inf_surrogate at u (call parts(u) first).
  void inf_gradient(const CVector& u, CVector& g) {
    g.setZero(n_);
    double d = deficit();
    double v = inf_value();
    if (v == 0.0) return;
    adjoint_products(u);
    double hm = std::abs(h_);
    if (p_ == 0.0) {
      g = 2.0 * qmod_ * qmod_ * (std::conj(h_) * bu_ + h_ * bhu_);
    } else {
      if (qmod_ > 0.0 && hm > 1e-300) g += (qmod_ / hm) * (std::conj(h_) * bu_ + h_ * bhu_);
      if (wn_ > 1e-150) g -= (p_ / wn_) * (bhbu_ - std::conj(h_) * bu_ - h_ * bhu_);
      g *= 2.0 * d;
    }
    project(u, g);
  }

 private:
  void adjoint_products(const CVector& u) {
    if (diagonal_) {
      bhu_ = diag_.conjugate().cwiseProduct(u);
      bhbu_ = diag_.conjugate().cwiseProduct(bu_);
    } else {
      bhu_.noalias() = bh_ * u;
      bhbu_.noalias() = bh_ * bu_;
    }
  }
  static void project(const CVector& u, CVector& g) { g -= u.dot(g).real() * u; }

  CMatrix b_, bh_;
  CVector diag_;
  double qmod_, p_;
  bool diagonal_, circle_;
  Eigen::Index n_;
  CVector bu_, bhu_, bhbu_;
  Complex h_{};
  double wn_ = 0.0;
};

enum class Goal { Sup, Inf };

struct LocalResult {
  CVector u;
  double value;
};

inline double objective(QObjective& obj, const CVector& u, Goal goal) {
  obj.parts(u);
  return goal == Goal::Sup ? obj.sup_value() : obj.inf_surrogate();
}

/// Projected (normalized-gradient) ascent/descent with backtracking on the unit sphere.
inline LocalResult local_search(QObjective& obj, CVector u, Goal goal, int iterations,
                                std::mt19937_64& rng) {
  const double sign = goal == Goal::Sup ? 1.0 : -1.0;
  u.normalize();
  double val = objective(obj, u, goal);
  CVector g(obj.dim()), trial(obj.dim());
  LocalResult best{u, val};
  double step = 0.1;
  int perturbations = 0;
  int flat = 0;
  for (int it = 0; it < iterations; ++it) {
    if (goal == Goal::Inf && val == 0.0) break;
    obj.parts(u);
    if (goal == Goal::Sup) obj.sup_gradient(u, g);
    else obj.inf_gradient(u, g);
    g *= sign;
    double gn = g.norm();
    bool accepted = false;
    double next = val;
    if (gn > 1e-14) {
      while (step > 1e-13) {
        trial = u + (step / gn) * g;
        trial.normalize();
        next = objective(obj, trial, goal);
        if (sign * (next - val) >= 1e-4 * step * gn) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted) {
      // Stationary or stuck at a kink: nudge and keep going a few times.
      if (perturbations++ >= 3) break;
      std::normal_distribution<double> normal(0.0, 1e-3);
      for (Eigen::Index i = 0; i < u.size(); ++i) u(i) += Complex(normal(rng), normal(rng));
      u.normalize();
      val = objective(obj, u, goal);
      step = 0.1;
      flat = 0;
    } else {
      double gain = std::abs(next - val);
      u = trial;
      val = next;
      step = std::min(step * 2.0, 1.0);
      flat = gain <= 1e-15 * std::max(1.0, std::abs(val)) ? flat + 1 : 0;
      if (flat >= 10) break;
    }
    if (sign * (val - best.value) > 0.0) best = {u, val};
  }
  if (sign * (val - best.value) > 0.0) best = {u, val};
  return best;
}

/// Partner v (reduced coordinates) attaining sup (or inf) of |<Bu, v>| over admissible v.
inline CVector partner(QObjective& obj, const CVector& u, const QParam& q, Goal goal) {
  obj.parts(u);
  const Eigen::Index n = u.size();
  const double p = q.complement();
  const Complex qh = q.value() * obj.h();
  const Complex s = phase_of(qh);
  CVector zhat;
  if (n >= 2) {
    if (obj.wnorm() > 1e-150) zhat = (obj.bu() - obj.h() * u) / obj.wnorm();
    else zhat = orthogonal_unit({u}, n);
  }
  CVector v = std::conj(q.value()) * u;
  if (p == 0.0 || n < 2) return v;
  if (goal == Goal::Sup) return v + p * std::conj(s) * zhat;
  if (n >= 3 && std::abs(qh) < p * obj.wnorm()) {
    double alpha = std::abs(qh) / (p * obj.wnorm());
    CVector e = orthogonal_unit({u, zhat}, n);
    CVector z = alpha * zhat + std::sqrt(std::max(0.0, 1.0 - alpha * alpha)) * e;
    return v - p * std::conj(s) * z;
  }
  return v - p * std::conj(s) * zhat;
}

/// Monotone alternating maximization of |v^H B u| over admissible (u, v), started at u.
inline CVector polish_sup(QObjective& obj, const CMatrix& b, CVector u, const QParam& q,
                          int rounds) {
  const double p = q.complement();
  obj.parts(u);
  double val = obj.sup_value();
  for (int k = 0; k < rounds; ++k) {
    CVector v = partner(obj, u, q, Goal::Sup);
    CVector c = b.adjoint() * v;
    CVector cperp = c - v.dot(c) * v;
    double cn = cperp.norm();
    CVector next = q.value() * v;
    if (p > 0.0 && cn > 1e-150) next += p * phase_of(q.value() * c.dot(v)) * cperp / cn;
    next.normalize();
    obj.parts(next);
    double nv = obj.sup_value();
    if (!(nv > val)) break;
    bool tiny = nv - val <= 1e-16 * std::max(1.0, nv);
    u = next;
    val = nv;
    if (tiny) break;
  }
  return u;
}

inline void require_searchable(const Weight& w, const QParam& q) {
  if (w.rank() < 2 && !q.unimodular())
    throw RankTooLow("rank(A) = " + std::to_string(w.rank()) + " admits no pair with |q| < 1");
}

inline Estimate search(const Weight& w, const CMatrix& t, const QParam& q, const Budget& budget,
                       std::uint64_t seed, Goal goal) {
  require_searchable(w, q);
  const CMatrix b = reduce_compact(w, t);
  const Eigen::Index r = b.rows();
  QObjective obj(b, q);

  CVector best_u;
  double best = goal == Goal::Sup ? -1.0 : std::numeric_limits<double>::infinity();
  auto consider = [&](const LocalResult& lr) {
    bool better = goal == Goal::Sup ? lr.value > best : lr.value < best;
    if (better) {
      best = lr.value;
      best_u = lr.u;
    }
  };

  // Seed: the best sampled constraint-satisfying pair.
  CVector seed_u = CVector::Unit(r, 0);
  if (budget.samples > 0) {
    auto pairs = sample_pairs(w, q, budget.samples, seed);
    double seed_val = goal == Goal::Sup ? -1.0 : std::numeric_limits<double>::infinity();
    for (const auto& pr : pairs) {
      double v = std::abs(a_inner(w, t * pr.x, pr.y));
      if (goal == Goal::Sup ? v > seed_val : v < seed_val) {
        seed_val = v;
        seed_u = w.to_reduced() * pr.x;
      }
    }
  }

  std::vector<LocalResult> finals;
  for (int k = 0; k < budget.restarts; ++k) {
    std::mt19937_64 rng(restart_seed(seed, k));
    CVector start = k == 0 ? seed_u : complex_gaussian(rng, r);
    if (start.norm() == 0.0) start = CVector::Unit(r, 0);
    auto lr = local_search(obj, start, goal, budget.iterations, rng);
    if (goal == Goal::Sup) finals.push_back(lr);
    consider(lr);
  }
  if (budget.restarts <= 0) {
    obj.parts(seed_u.normalized());
    consider({seed_u.normalized(), goal == Goal::Sup ? obj.sup_value() : obj.inf_surrogate()});
  }

  if (goal == Goal::Sup) {
    std::sort(finals.begin(), finals.end(),
              [](const LocalResult& a, const LocalResult& c) { return a.value > c.value; });
    if (finals.size() > 4) finals.resize(4);
    for (const auto& f : finals) {
      CVector u = polish_sup(obj, b, f.u, q, 4 * budget.iterations);
      obj.parts(u);
      consider({u, obj.sup_value()});
    }
  }

  obj.parts(best_u);
  Estimate e;
  e.value = goal == Goal::Sup ? obj.sup_value() : obj.inf_value();
  e.direction = goal == Goal::Sup ? BoundDirection::LowerBoundOfSup : BoundDirection::UpperBoundOfInf;
  CVector v = partner(obj, best_u, q, goal);
  e.witness_x = w.from_reduced() * best_u;
  e.witness_y = w.from_reduced() * v;
  e.budget = budget;
  e.seed = seed;
  return e;
}

}  // namespace detail

/// omega_A(T) by the rotation sweep omega(B) = max_phi lambda_max(Re(e^{i phi} B)).
inline Estimate a_radius(const Weight& w, const CMatrix& t) {
  const CMatrix b = reduce_compact(w, t);
  auto lam_max = [&](double phi) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(detail::rotated_hermitian_part(b, phi),
                                              Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
  };
  Budget budget;
  auto [phi, val] = detail::periodic_max(lam_max, static_cast<int>(budget.grid_resolution));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(detail::rotated_hermitian_part(b, phi));
  CVector u = es.eigenvectors().col(b.rows() - 1);
  Estimate e;
  e.value = std::max(0.0, val);
  e.direction = BoundDirection::TwoSided;
  e.witness_x = w.from_reduced() * u;
  e.witness_y = e.witness_x;
  e.budget = budget;
  return e;
}

/// c_A(T) = max(0, max_phi lambda_min(Re(e^{i phi} B))): the distance from 0 to the
/// (convex) numerical range of B.
inline Estimate a_crawford(const Weight& w, const CMatrix& t) {
  const CMatrix b = reduce_compact(w, t);
  auto lam_min = [&](double phi) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(detail::rotated_hermitian_part(b, phi),
                                              Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  Budget budget;
  auto [phi, val] = detail::periodic_max(lam_min, static_cast<int>(budget.grid_resolution));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(detail::rotated_hermitian_part(b, phi));
  CVector u = es.eigenvectors().col(0);
  if (val <= 0.0) {
    // 0 lies in the numerical range; find a vector close to it.
    detail::QObjective obj(b, QParam(1.0));
    std::mt19937_64 rng(0);
    CVector best = u;
    double bestv = detail::objective(obj, u, detail::Goal::Inf);
    for (int k = 0; k < 8 && bestv > 0.0; ++k) {
      CVector start = k == 0 ? u : detail::complex_gaussian(rng, b.rows());
      auto lr = detail::local_search(obj, start, detail::Goal::Inf, 500, rng);
      if (lr.value < bestv) {
        bestv = lr.value;
        best = lr.u;
      }
    }
    u = best;
  }
  Estimate e;
  e.value = std::max(0.0, val);
  e.direction = BoundDirection::TwoSided;
  e.witness_x = w.from_reduced() * u;
  e.witness_y = e.witness_x;
  e.budget = budget;
  return e;
}

/// omega_{A,q}(T): multi-start projected ascent over A-unit x with the partner y
/// maximized in closed form. A lower bound of the supremum.
inline Estimate aq_radius(const Weight& w, const CMatrix& t, const QParam& q,
                          const Budget& budget = {}, std::uint64_t seed = 0) {
  return detail::search(w, t, q, budget, seed, detail::Goal::Sup);
}

/// c_{A,q}(T): multi-start projected descent. An upper bound of the infimum.
inline Estimate aq_crawford(const Weight& w, const CMatrix& t, const QParam& q,
                            const Budget& budget = {}, std::uint64_t seed = 0) {
  return detail::search(w, t, q, budget, seed, detail::Goal::Inf);
}

inline std::pair<GapValue, GapValue> gaps(const Weight& w, const CMatrix& t, const QParam& q,
                                          const Budget& budget = {}, std::uint64_t seed = 0) {
  const double norm = a_opnorm(w, t);
  const double om = aq_radius(w, t, q, budget, seed).value;
  const double cr = aq_crawford(w, t, q, budget, seed).value;
  return {GapValue{norm, om, norm - om}, GapValue{norm, cr, norm - cr}};
}

// ---------------------------------------------------------------------------
// Brute-force oracle

struct OracleBounds {
  double lower_sup = 0.0;
  double upper_inf = 0.0;
};

namespace detail {

/// Evaluates |<Tx, y>_A| directly from angle coordinates of (x, z, theta) in
/// reduced dimension D (2 or 3).
template <int D>
class OracleEvaluator {
 public:
  static constexpr int kParams = 4 * D - 5;
  using Vec = Eigen::Matrix<Complex, D, 1>;
  using Mat = Eigen::Matrix<Complex, D, D>;
  using Params = std::array<double, kParams>;

  OracleEvaluator(const Weight& w, const CMatrix& t, const QParam& q)
      : q_(q.value()), p_(q.complement()) {
    // K(i,j) = <T l_j, l_i>_A for the columns l_j of the reduced lift.
    const CMatrix& lift = w.from_reduced();
    k_ = lift.adjoint() * w.matrix() * t * lift;
  }

  /// Polar angles live on [0, pi/2]; the remaining coordinates are phases on [0, 2pi).
  static constexpr std::array<bool, kParams> polar_mask() {
    if constexpr (D == 2) return {true, false, false};
    else return {true, true, false, false, true, false, false};
  }

  double value(const Params& a) const {
    Vec xi, zeta_local;
    double theta;
    if constexpr (D == 2) {
      xi << std::cos(a[0]), std::polar(std::sin(a[0]), a[1]);
      zeta_local << 0.0, 1.0;
      theta = a[2];
    } else {
      xi << std::cos(a[0]), std::polar(std::sin(a[0]) * std::cos(a[1]), a[2]),
          std::polar(std::sin(a[0]) * std::sin(a[1]), a[3]);
      zeta_local << 0.0, std::cos(a[4]), std::polar(std::sin(a[4]), a[5]);
      theta = a[6];
    }
    // Householder reflector H with H e1 = xi; its other columns span xi's complement.
    Vec v = xi;
    v(0) -= 1.0;
    double vn2 = v.squaredNorm();
    Vec zeta = zeta_local;
    if (vn2 > 1e-30) zeta -= (2.0 / vn2) * v * v.dot(zeta_local);
    Vec eta = std::conj(q_) * xi + p_ * std::polar(1.0, theta) * zeta;
    return std::abs(eta.dot(k_ * xi));
  }

 private:
  Complex q_;
  double p_;
  Mat k_;
};

/// Compass search on the angle coordinates; sign = +1 maximizes, -1 minimizes.
template <class Ev, class Params>
double compass_refine(const Ev& ev, Params a, Params step, double sign) {
  double best = sign * ev.value(a);
  int evals = 0;
  while (evals < 40000) {
    bool moved = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      for (double dir : {1.0, -1.0}) {
        Params trial = a;
        trial[j] += dir * step[j];
        double v = sign * ev.value(trial);
        ++evals;
        if (v > best) {
          best = v;
          a = trial;
          moved = true;
          break;
        }
      }
    }
    if (!moved) {
      double mx = 0.0;
      for (auto& s : step) {
        s *= 0.5;
        mx = std::max(mx, s);
      }
      if (mx < 1e-10) break;
    }
  }
  return sign * best;
}

template <int D>
OracleBounds oracle_grid_fixed(const Weight& w, const CMatrix& t, const QParam& q, int res) {
  using Ev = OracleEvaluator<D>;
  using Params = typename Ev::Params;
  constexpr int m = Ev::kParams;
  constexpr auto polar = Ev::polar_mask();
  Ev ev(w, t, q);

  std::array<std::vector<double>, m> axis;
  Params spacing{};
  for (int j = 0; j < m; ++j) {
    spacing[j] = polar[j] ? (std::numbers::pi / 2.0) / (res - 1) : 2.0 * std::numbers::pi / res;
    for (int k = 0; k < res; ++k) axis[j].push_back(k * spacing[j]);
  }

  // Keep the best few grid points for each direction (min-heaps on the key).
  constexpr std::size_t keep = 12;
  using Cand = std::pair<double, Params>;
  auto cmp = [](const Cand& l, const Cand& r) { return l.first > r.first; };
  std::vector<Cand> tops, bottoms;
  auto offer = [&](std::vector<Cand>& pool, double key, const Params& a) {
    if (pool.size() < keep) {
      pool.emplace_back(key, a);
      std::push_heap(pool.begin(), pool.end(), cmp);
    } else if (key > pool.front().first) {
      std::pop_heap(pool.begin(), pool.end(), cmp);
      pool.back() = {key, a};
      std::push_heap(pool.begin(), pool.end(), cmp);
    }
  };

  std::array<int, m> idx{};
  Params a{};
  for (;;) {
    for (int j = 0; j < m; ++j) a[j] = axis[j][idx[j]];
    double v = ev.value(a);
    if (tops.size() < keep || v > tops.front().first) offer(tops, v, a);
    if (bottoms.size() < keep || -v > bottoms.front().first) offer(bottoms, -v, a);
    int j = 0;
    while (j < m && ++idx[j] == res) idx[j++] = 0;
    if (j == m) break;
  }

  OracleBounds out{0.0, std::numeric_limits<double>::infinity()};
  for (const auto& c : tops)
    out.lower_sup = std::max(out.lower_sup, compass_refine(ev, c.second, spacing, 1.0));
  for (const auto& c : bottoms)
    out.upper_inf = std::min(out.upper_inf, compass_refine(ev, c.second, spacing, -1.0));
  return out;
}

}  // namespace detail

/// Exhaustive product-grid evaluation of |<Tx,y>_A| over the (x, z, theta)
/// parameterization of admissible pairs, followed by compass refinement of the
/// best grid points. Shares no code with the closed-form partner optimization.
///
/// Reduced dimension 2 uses `resolution` points per coordinate (3 coordinates).
/// Reduced dimension 3 has 7 coordinates; the per-coordinate resolution is capped
/// so the grid stays under ~2e7 points.
inline OracleBounds oracle_grid(const Weight& w, const CMatrix& t, const QParam& q,
                                int resolution) {
  require_dim(w, t, "oracle_grid");
  if (w.rank() > 3) throw OracleTooLarge("oracle_grid supports reduced dimension <= 3");
  if (w.rank() < 2) {
    if (!q.unimodular()) throw RankTooLow("oracle_grid needs rank(A) >= 2 for |q| < 1");
    // Single A-unit direction up to phase; y = conj(q) x.
    CVector x = w.from_reduced().col(0);
    double v = std::abs(a_inner(w, t * x, std::conj(q.value()) * x));
    return {v, v};
  }
  int res = std::max(resolution, 2);
  if (w.rank() == 2) return detail::oracle_grid_fixed<2>(w, t, q, res);
  return detail::oracle_grid_fixed<3>(w, t, q, std::min(res, 11));
}

}  // namespace aqr
