#pragma once

// Inequalities and identities for the (A,q)-numerical radius and Crawford number
// as executable checks, plus a randomized suite runner.
//
// Estimates of suprema are lower bounds and estimates of infima are upper bounds.
// A law whose estimates can only err towards a violation ("wrong side") is re-run
// at 4x and then 16x budget before a failure is reported, and passes with the
// looser tolerance tol_loose; other laws use tol_exact.

#include "aqrange/radius.hpp"
#include "aqrange/semispace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace aqr {

struct LawReport {
  std::string law_id;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs - lhs
  double slack = 0.0;
  bool pass = true;
  bool skipped = false;
  std::string note;
  double tol_law = 0.0;
  std::string instance_digest;
  Budget estimator_budget;
};

/// Coefficients of lambda x + mu y in the linear-combination bounds.
struct LinComboParams {
  Complex lambda;
  Complex mu;
  double gamma = 0.0;

  LinComboParams(Complex l, Complex m, const QParam& q) : lambda(l), mu(m) {
    double g2 = std::norm(l) + std::norm(m) + 2.0 * (l * std::conj(m) * q.value()).real();
    gamma = std::sqrt(std::max(0.0, g2));
    if (!(gamma > 0.0)) throw InvalidQ("gamma = sqrt(|l|^2 + |m|^2 + 2 Re(l conj(m) q)) must be > 0");
  }
};

enum class AdjointKind {
  /// Ordinary conjugate transpose T^H.
  Ordinary,
  /// A-adjoint A^+ T^H A (equals T^H when A = I).
  AAdjoint,
};

struct LawOptions {
  Budget budget{};
  std::uint64_t seed = 0;
  double tol_exact = 1e-7;
  double tol_loose = 5e-3;
  /// Tolerance on |lhs - rhs| for identities checked between two estimates.
  double tol_equal = 2e-3;
  /// Check the composite parameter (lambda + conj(mu) q)/gamma instead of (lambda + mu conj(q))/gamma.
  bool linear_combo_proof_form = false;
  /// With the ordinary adjoint the linear-combination bounds fail for weights that do not commute with T.
  AdjointKind adjoint = AdjointKind::AAdjoint;
  /// Check the Crawford consequences of the tensor bound in the literal direction
  /// c2 <= c(T)/omega1 instead of the one the set inclusion gives, c(T)/omega1 <= c2.
  bool product_literal_c_direction = false;
  std::string digest;
};

namespace detail {

struct Sides {
  double lhs;
  double rhs;
};

using SideFn = std::function<Sides(const Budget&)>;

inline LawReport evaluate_law(const std::string& id, bool wrong_side, double tol,
                              const SideFn& compute, const LawOptions& opt) {
  Budget b = opt.budget;
  Sides s = compute(b);
  if (wrong_side) {
    for (int k : {4, 16}) {
      if (s.rhs - s.lhs >= -opt.tol_exact) break;
      b = opt.budget.scaled(k);
      s = compute(b);
    }
  }
  LawReport r;
  r.law_id = id;
  r.lhs = s.lhs;
  r.rhs = s.rhs;
  r.slack = s.rhs - s.lhs;
  r.tol_law = tol;
  r.pass = r.slack >= -tol;
  r.instance_digest = opt.digest;
  r.estimator_budget = b;
  return r;
}

inline LawReport skipped_law(const std::string& id, const std::string& why, const LawOptions& opt) {
  LawReport r;
  r.law_id = id;
  r.skipped = true;
  r.pass = true;
  r.note = why;
  r.instance_digest = opt.digest;
  r.estimator_budget = opt.budget;
  return r;
}

inline double omega(const Weight& w, const CMatrix& t, const QParam& q, const Budget& b,
                    std::uint64_t seed) {
  return aq_radius(w, t, q, b, seed).value;
}
inline double crawford(const Weight& w, const CMatrix& t, const QParam& q, const Budget& b,
                       std::uint64_t seed) {
  return aq_crawford(w, t, q, b, seed).value;
}

inline double root_two_one_minus_re(Complex q) {
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - q.real())));
}

}  // namespace detail

/// omega_{A,q}(T) <= ||T||_A
inline LawReport law_t1_1(const Weight& w, const CMatrix& t, const QParam& q,
                          const LawOptions& opt = {}) {
  const double norm = a_opnorm(w, t);
  return detail::evaluate_law(
      "T1.1", false, opt.tol_exact,
      [&](const Budget& b) { return detail::Sides{detail::omega(w, t, q, b, opt.seed), norm}; }, opt);
}

/// omega_{A,q}(alpha T) = omega_{A,alpha q}(T) and c_{A,q}(alpha T) = c_{A,alpha q}(T), |alpha| = 1.
inline std::vector<LawReport> law_t1_23(const Weight& w, const CMatrix& t, const QParam& q,
                                        Complex alpha, const LawOptions& opt = {}) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12) throw InvalidQ("alpha must be unimodular");
  const CMatrix at = alpha * t;
  const QParam aq(alpha * q.value());
  auto omega_side = [&](const Budget& b) {
    double l = detail::omega(w, at, q, b, opt.seed), r = detail::omega(w, t, aq, b, opt.seed);
    return detail::Sides{std::abs(l - r), 0.0};
  };
  auto c_side = [&](const Budget& b) {
    double l = detail::crawford(w, at, q, b, opt.seed), r = detail::crawford(w, t, aq, b, opt.seed);
    return detail::Sides{std::abs(l - r), 0.0};
  };
  return {detail::evaluate_law("T1.2", true, opt.tol_equal, omega_side, opt),
          detail::evaluate_law("T1.3", true, opt.tol_equal, c_side, opt)};
}

/// gamma omega_{A,q'}(T) <= |lambda| omega_A(T) + |mu| omega_{A,q}(T*) and
/// gamma c_{A,q'}(T) <= |lambda| omega_A(T) + |mu| c_{A,q}(T*), q' = (lambda + mu conj(q))/gamma.
inline std::vector<LawReport> law_t1_45(const Weight& w, const CMatrix& t, const QParam& q,
                                        const LinComboParams& lc, const LawOptions& opt = {}) {
  const Complex composite = opt.linear_combo_proof_form
                                ? (lc.lambda + std::conj(lc.mu) * q.value()) / lc.gamma
                                : (lc.lambda + lc.mu * std::conj(q.value())) / lc.gamma;
  const double cm = std::abs(composite);
  if (!(cm > 1e-12) || cm > 1.0 + 1e-12) {
    std::string why = "composite parameter |q'| = " + std::to_string(cm) + " outside (0, 1]";
    return {detail::skipped_law("T1.4", why, opt), detail::skipped_law("T1.5", why, opt)};
  }
  const QParam qc(composite);
  CMatrix tstar = t.adjoint();
  if (opt.adjoint == AdjointKind::AAdjoint)
    tstar = w.pinv_sqrt_a() * w.pinv_sqrt_a() * t.adjoint() * w.matrix();
  const double wa = a_radius(w, t).value;
  const double l = std::abs(lc.lambda), m = std::abs(lc.mu);
  auto omega_sides = [&](const Budget& b) {
    return detail::Sides{lc.gamma * detail::omega(w, t, qc, b, opt.seed),
                         l * wa + m * detail::omega(w, tstar, q, b, opt.seed)};
  };
  auto c_sides = [&](const Budget& b) {
    return detail::Sides{lc.gamma * detail::crawford(w, t, qc, b, opt.seed),
                         l * wa + m * detail::crawford(w, tstar, q, b, opt.seed)};
  };
  return {detail::evaluate_law("T1.4", true, opt.tol_loose, omega_sides, opt),
          detail::evaluate_law("T1.5", true, opt.tol_loose, c_sides, opt)};
}

/// omega_A(T) <= omega_{A,q}(T) + s omega_{A,(1-q)/s}(T) and the c_A analogue, s = sqrt(2(1-Re q)).
inline std::vector<LawReport> law_t1_78(const Weight& w, const CMatrix& t, const QParam& q,
                                        const LawOptions& opt = {}) {
  const double s = detail::root_two_one_minus_re(q.value());
  if (std::abs(1.0 - q.value()) < 1e-12 || s == 0.0)
    return {detail::skipped_law("T1.7", "q = 1", opt), detail::skipped_law("T1.8", "q = 1", opt)};
  const QParam q2((1.0 - q.value()) / s);
  const double wa = a_radius(w, t).value;
  const double ca = a_crawford(w, t).value;
  auto omega_sides = [&](const Budget& b) {
    return detail::Sides{wa, detail::omega(w, t, q, b, opt.seed) + s * detail::omega(w, t, q2, b, opt.seed)};
  };
  auto c_sides = [&](const Budget& b) {
    return detail::Sides{ca,
                         detail::crawford(w, t, q, b, opt.seed) + s * detail::omega(w, t, q2, b, opt.seed)};
  };
  return {detail::evaluate_law("T1.7", true, opt.tol_loose, omega_sides, opt),
          detail::evaluate_law("T1.8", true, opt.tol_loose, c_sides, opt)};
}

/// (1 - sqrt(2(1-Re q))) omega_A(T) <= omega_{A,q}(T)
inline LawReport law_note(const Weight& w, const CMatrix& t, const QParam& q,
                          const LawOptions& opt = {}) {
  const double coef = 1.0 - detail::root_two_one_minus_re(q.value());
  const double wa = a_radius(w, t).value;
  return detail::evaluate_law(
      "Note", true, opt.tol_loose,
      [&](const Budget& b) { return detail::Sides{coef * wa, detail::omega(w, t, q, b, opt.seed)}; },
      opt);
}

/// 2|Re q| omega_A <= omega_{A,q} + omega_{A,conj q} <= 2 omega_A + 2 sqrt(2) sqrt(1-Re q) ||T||_A
inline std::vector<LawReport> law_t2(const Weight& w, const CMatrix& t, const QParam& q,
                                     const LawOptions& opt = {}) {
  const double wa = a_radius(w, t).value;
  const double norm = a_opnorm(w, t);
  const QParam qbar(std::conj(q.value()));
  auto middle = [&](const Budget& b) {
    return detail::omega(w, t, q, b, opt.seed) + detail::omega(w, t, qbar, b, opt.seed);
  };
  const double upper =
      2.0 * wa + 2.0 * std::sqrt(2.0) * std::sqrt(std::max(0.0, 1.0 - q.value().real())) * norm;
  return {detail::evaluate_law(
              "T2.lower", true, opt.tol_loose,
              [&](const Budget& b) { return detail::Sides{2.0 * std::abs(q.value().real()) * wa, middle(b)}; },
              opt),
          detail::evaluate_law(
              "T2.upper", false, opt.tol_exact,
              [&](const Budget& b) { return detail::Sides{middle(b), upper}; }, opt)};
}

namespace detail {

struct TensorValues {
  double c_prod, omega_prod;  // on A1⊗A2, T1⊗T2 at q1 q2
  double c1, c2, omega1, omega2;
};

inline TensorValues tensor_values(const Weight& w1, const CMatrix& t1, const QParam& q1,
                                  const Weight& w2, const CMatrix& t2, const QParam& q2,
                                  const Budget& b, std::uint64_t seed) {
  const Weight w(kron(w1.matrix(), w2.matrix()));
  const CMatrix t = kron(t1, t2);
  const QParam q(q1.value() * q2.value());
  return {crawford(w, t, q, b, seed), omega(w, t, q, b, seed),     crawford(w1, t1, q1, b, seed),
          crawford(w2, t2, q2, b, seed), omega(w1, t1, q1, b, seed), omega(w2, t2, q2, b, seed)};
}

}  // namespace detail

/// c_{A,q}(T) <= c1 c2 <= omega1 omega2 <= omega_{A,q}(T) for A = A1⊗A2, T = T1⊗T2, q = q1 q2.
inline std::vector<LawReport> law_t3(const Weight& w1, const CMatrix& t1, const QParam& q1,
                                     const Weight& w2, const CMatrix& t2, const QParam& q2,
                                     const LawOptions& opt = {}) {
  auto values = [&](const Budget& b) {
    return detail::tensor_values(w1, t1, q1, w2, t2, q2, b, opt.seed);
  };
  return {detail::evaluate_law(
              "T3.c_link", true, opt.tol_loose,
              [&](const Budget& b) {
                auto v = values(b);
                return detail::Sides{v.c_prod, v.c1 * v.c2};
              },
              opt),
          detail::evaluate_law(
              "T3.middle_link", true, opt.tol_loose,
              [&](const Budget& b) {
                auto v = values(b);
                return detail::Sides{v.c1 * v.c2, v.omega1 * v.omega2};
              },
              opt),
          detail::evaluate_law(
              "T3.omega_link", true, opt.tol_loose,
              [&](const Budget& b) {
                auto v = values(b);
                return detail::Sides{v.omega1 * v.omega2, v.omega_prod};
              },
              opt)};
}

/// Scalar consequences of W2 ⊂ W(T) W1^{-1} (and symmetrically):
///   c1 > 0 => omega2 <= omega(T)/c1,   c2 > 0 => omega1 <= omega(T)/c2,
///   omega1 > 0 => c(T)/omega1 <= c2,   omega2 > 0 => c(T)/omega2 <= c1.
inline std::vector<LawReport> law_cor1(const Weight& w1, const CMatrix& t1, const QParam& q1,
                                       const Weight& w2, const CMatrix& t2, const QParam& q2,
                                       const LawOptions& opt = {}) {
  constexpr double floor = 1e-6;
  const auto base = detail::tensor_values(w1, t1, q1, w2, t2, q2, opt.budget, opt.seed);
  std::vector<LawReport> out;
  auto values = [&](const Budget& b) {
    return b == opt.budget ? base : detail::tensor_values(w1, t1, q1, w2, t2, q2, b, opt.seed);
  };
  using V = detail::TensorValues;
  auto add = [&](const std::string& id, double denom, const std::function<detail::Sides(const V&)>& f) {
    if (!(denom > floor))
      out.push_back(detail::skipped_law(id, "near-zero denominator", opt));
    else
      out.push_back(detail::evaluate_law(
          id, true, opt.tol_loose, [&](const Budget& b) { return f(values(b)); }, opt));
  };
  add("Cor1.omega2", base.c1, [](const V& v) { return detail::Sides{v.omega2, v.omega_prod / v.c1}; });
  add("Cor1.omega1", base.c2, [](const V& v) { return detail::Sides{v.omega1, v.omega_prod / v.c2}; });
  if (opt.product_literal_c_direction) {
    add("Cor1.c2", base.omega1, [](const V& v) { return detail::Sides{v.c2, v.c_prod / v.omega1}; });
    add("Cor1.c1", base.omega2, [](const V& v) { return detail::Sides{v.c1, v.c_prod / v.omega2}; });
  } else {
    add("Cor1.c2", base.omega1, [](const V& v) { return detail::Sides{v.c_prod / v.omega1, v.c2}; });
    add("Cor1.c1", base.omega2, [](const V& v) { return detail::Sides{v.c_prod / v.omega2, v.c1}; });
  }
  return out;
}

/// |omega_{A,q}(T) - omega_A(T)| <= sqrt(2(1-Re q)) ||T||_A
inline LawReport law_t4_1(const Weight& w, const CMatrix& t, const QParam& q,
                          const LawOptions& opt = {}) {
  const double wa = a_radius(w, t).value;
  const double bound = detail::root_two_one_minus_re(q.value()) * a_opnorm(w, t);
  return detail::evaluate_law(
      "T4.1", true, opt.tol_loose,
      [&](const Budget& b) {
        return detail::Sides{std::abs(detail::omega(w, t, q, b, opt.seed) - wa), bound};
      },
      opt);
}

/// |c_{A,q}(T) - c_A(T)| <= sqrt(2(1-Re q)) ||T||_A
inline LawReport law_t5_1(const Weight& w, const CMatrix& t, const QParam& q,
                          const LawOptions& opt = {}) {
  const double ca = a_crawford(w, t).value;
  const double bound = detail::root_two_one_minus_re(q.value()) * a_opnorm(w, t);
  return detail::evaluate_law(
      "T5.1", true, opt.tol_loose,
      [&](const Budget& b) {
        return detail::Sides{std::abs(detail::crawford(w, t, q, b, opt.seed) - ca), bound};
      },
      opt);
}

/// |c_{A,q}(T) - c_{A,q}(S)| <= omega_{A,q}(T - S)
inline LawReport law_t5_3(const Weight& w, const CMatrix& t, const CMatrix& s, const QParam& q,
                          const LawOptions& opt = {}) {
  const CMatrix diff = t - s;
  return detail::evaluate_law(
      "T5.3", true, opt.tol_loose,
      [&](const Budget& b) {
        return detail::Sides{
            std::abs(detail::crawford(w, t, q, b, opt.seed) - detail::crawford(w, s, q, b, opt.seed)),
            detail::omega(w, diff, q, b, opt.seed)};
      },
      opt);
}

/// For A = A1⊕A2, T = S⊕M:
///   g_omega(T) <= max(g_omega(S), g_omega(M)) and g_c(T) >= max(g_c(S), g_c(M)).
inline std::vector<LawReport> law_app1(const Weight& w1, const CMatrix& s, const Weight& w2,
                                       const CMatrix& m, const QParam& q, const LawOptions& opt = {}) {
  const Weight w(direct_sum(w1.matrix(), w2.matrix()));
  const CMatrix t = direct_sum(s, m);
  const double nt = a_opnorm(w, t), ns = a_opnorm(w1, s), nm = a_opnorm(w2, m);
  auto omega_sides = [&](const Budget& b) {
    double gt = nt - detail::omega(w, t, q, b, opt.seed);
    double gs = ns - detail::omega(w1, s, q, b, opt.seed);
    double gm = nm - detail::omega(w2, m, q, b, opt.seed);
    return detail::Sides{gt, std::max(gs, gm)};
  };
  auto c_sides = [&](const Budget& b) {
    double gt = nt - detail::crawford(w, t, q, b, opt.seed);
    double gs = ns - detail::crawford(w1, s, q, b, opt.seed);
    double gm = nm - detail::crawford(w2, m, q, b, opt.seed);
    return detail::Sides{std::max(gs, gm), gt};
  };
  return {detail::evaluate_law("App1.omega_gap", true, opt.tol_loose, omega_sides, opt),
          detail::evaluate_law("App1.c_gap", true, opt.tol_loose, c_sides, opt)};
}

// ---------------------------------------------------------------------------
// Suite

struct SuiteConfig {
  int n_instances = 200;
  std::vector<int> dims{2, 3, 4};
  std::uint64_t seed = 0;
  Budget budget{};
  double tol_law = 1e-7;
  double tol_loose = 5e-3;
};

namespace detail {

inline CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  return complex_gaussian(rng, n * n).reshaped(n, n);
}

/// Random unitary conjugation of diag(LogUniform[0.1, 10]).
inline CMatrix random_pd_weight(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> logu(std::log(0.1), std::log(10.0));
  RVector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(logu(rng));
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, n));
  CMatrix u = qr.householderQ();
  return u * d.cast<Complex>().asDiagonal() * u.adjoint();
}

inline QParam random_q(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < 0.1) return QParam(1.0);
  double modulus = 1.0 - unit(rng);  // (0, 1]
  double phase = 2.0 * std::numbers::pi * unit(rng);
  return QParam(std::polar(modulus, phase));
}

}  // namespace detail

/// Runs every law on n_instances random instances; deterministic per seed.
/// Reports are sorted by (instance_digest, law_id).
inline std::vector<LawReport> run_suite(const SuiteConfig& cfg) {
  std::vector<LawReport> all;
  if (cfg.n_instances <= 0 || cfg.dims.empty()) return all;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.dims.size() - 1);

  for (int k = 0; k < cfg.n_instances; ++k) {
    const int n = cfg.dims[pick(rng)];
    const Weight w(detail::random_pd_weight(rng, n));
    const CMatrix t = detail::random_matrix(rng, n);
    const QParam q = detail::random_q(rng);
    const Complex alpha = std::polar(1.0, 2.0 * std::numbers::pi * unit(rng));
    const CVector lm = detail::complex_gaussian(rng, 2);
    const CMatrix s = detail::random_matrix(rng, n);
    // Tensor and direct-sum partners are 2x2 so the product/sum stays at most 8-dimensional.
    const Weight w2(detail::random_pd_weight(rng, 2));
    const CMatrix t2 = detail::random_matrix(rng, 2);
    const QParam q2 = detail::random_q(rng);

    LawOptions opt;
    opt.budget = cfg.budget;
    opt.seed = detail::splitmix64(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(k));
    opt.tol_exact = cfg.tol_law;
    opt.tol_loose = cfg.tol_loose;
    char digest[64];
    std::snprintf(digest, sizeof digest, "seed=%llu/inst=%04d/n=%d",
                  static_cast<unsigned long long>(cfg.seed), k, n);
    opt.digest = digest;

    auto push = [&](std::vector<LawReport> rs) {
      for (auto& r : rs) all.push_back(std::move(r));
    };
    push({law_t1_1(w, t, q, opt)});
    push(law_t1_23(w, t, q, alpha, opt));
    try {
      push(law_t1_45(w, t, q, LinComboParams(lm(0), lm(1), q), opt));
    } catch (const InvalidQ&) {
      push({detail::skipped_law("T1.4", "gamma = 0", opt), detail::skipped_law("T1.5", "gamma = 0", opt)});
    }
    push(law_t1_78(w, t, q, opt));
    push({law_note(w, t, q, opt)});
    push(law_t2(w, t, q, opt));
    push(law_t3(w, t, q, w2, t2, q2, opt));
    push(law_cor1(w, t, q, w2, t2, q2, opt));
    push({law_t4_1(w, t, q, opt)});
    push({law_t5_1(w, t, q, opt)});
    push({law_t5_3(w, t, s, q, opt)});
    push(law_app1(w, t, w2, t2, q, opt));
  }
  std::stable_sort(all.begin(), all.end(), [](const LawReport& a, const LawReport& b) {
    return std::tie(a.instance_digest, a.law_id) < std::tie(b.instance_digest, b.law_id);
  });
  return all;
}

struct LawSummary {
  std::string law_id;
  int evaluated = 0;
  int passed = 0;
  int skipped = 0;
  double pass_rate = 1.0;
  double min_slack = 0.0;
};

inline std::vector<LawSummary> summarize(const std::vector<LawReport>& reports) {
  std::map<std::string, LawSummary> by_id;
  for (const auto& r : reports) {
    auto [it, fresh] = by_id.try_emplace(r.law_id);
    auto& s = it->second;
    if (fresh) {
      s.law_id = r.law_id;
      s.min_slack = std::numeric_limits<double>::infinity();
    }
    if (r.skipped) {
      ++s.skipped;
      continue;
    }
    ++s.evaluated;
    if (r.pass) ++s.passed;
    s.min_slack = std::min(s.min_slack, r.slack);
  }
  std::vector<LawSummary> out;
  for (auto& [id, s] : by_id) {
    s.pass_rate = s.evaluated > 0 ? static_cast<double>(s.passed) / s.evaluated : 1.0;
    if (s.evaluated == 0) s.min_slack = 0.0;
    out.push_back(s);
  }
  return out;
}

inline int count_failures(const std::vector<LawReport>& reports) {
  return static_cast<int>(
      std::count_if(reports.begin(), reports.end(), [](const LawReport& r) { return !r.skipped && !r.pass; }));
}

}  // namespace aqr
