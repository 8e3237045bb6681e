#pragma once

// Convergence experiments: operator sequences T_n -> T in the A-seminorm and
// parameter sequences q_n with Re q_n -> 1, traced against Lipschitz envelopes.

#include "aqrange/radius.hpp"
#include "aqrange/semispace.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace aqr {

enum class SequenceRule { Perturbation, Multiplication, Explicit };

class OperatorSequence {
 public:
  /// T_n = limit + direction / n
  static OperatorSequence perturbation(Weight w, CMatrix limit, CMatrix direction) {
    require_dim(w, limit, "perturbation");
    require_dim(w, direction, "perturbation");
    OperatorSequence s(SequenceRule::Perturbation, std::move(w), std::move(limit));
    s.direction_ = std::move(direction);
    return s;
  }

  /// Diagonal discretization of multiplication operators on a uniform grid of [0, 1]:
  /// weight diag(psi(x_i)), T_n = diag(phi(x_i, n)), limit diag(phi_limit(x_i)).
  static OperatorSequence multiplication(int grid_points, const std::function<double(double)>& psi,
                                         std::function<double(double, int)> phi,
                                         const std::function<double(double)>& phi_limit) {
    if (grid_points < 2) throw InvalidMatrix("multiplication rule needs at least 2 grid points");
    RVector x = RVector::LinSpaced(grid_points, 0.0, 1.0);
    CMatrix a = CMatrix::Zero(grid_points, grid_points);
    CMatrix lim = CMatrix::Zero(grid_points, grid_points);
    for (int i = 0; i < grid_points; ++i) {
      a(i, i) = psi(x(i));
      lim(i, i) = phi_limit(x(i));
    }
    OperatorSequence s(SequenceRule::Multiplication, Weight(a), std::move(lim));
    s.grid_ = std::move(x);
    s.phi_ = std::move(phi);
    return s;
  }

  /// The defaults psi(x) = 1 + x, phi_n(x) = 1 + x/n, converging to the identity.
  static OperatorSequence multiplication_default(int grid_points = 64) {
    return multiplication(
        grid_points, [](double x) { return 1.0 + x; },
        [](double x, int n) { return 1.0 + x / n; }, [](double) { return 1.0; });
  }

  /// T_n = terms[n - 1]
  static OperatorSequence explicit_terms(Weight w, std::vector<CMatrix> terms, CMatrix limit) {
    require_dim(w, limit, "explicit sequence");
    for (const auto& t : terms) require_dim(w, t, "explicit sequence");
    OperatorSequence s(SequenceRule::Explicit, std::move(w), std::move(limit));
    s.terms_ = std::move(terms);
    return s;
  }

  SequenceRule rule() const { return rule_; }
  const Weight& weight() const { return weight_; }
  const CMatrix& limit() const { return limit_; }

  CMatrix term(int n) const {
    if (n < 1) throw InvalidMatrix("sequence indices start at 1");
    switch (rule_) {
      case SequenceRule::Perturbation:
        return limit_ + direction_ / static_cast<double>(n);
      case SequenceRule::Multiplication: {
        CMatrix t = CMatrix::Zero(grid_.size(), grid_.size());
        for (Eigen::Index i = 0; i < grid_.size(); ++i) t(i, i) = phi_(grid_(i), n);
        return t;
      }
      case SequenceRule::Explicit:
        if (static_cast<std::size_t>(n) > terms_.size())
          throw InvalidMatrix("explicit sequence has only " + std::to_string(terms_.size()) + " terms");
        return terms_[static_cast<std::size_t>(n - 1)];
    }
    return limit_;
  }

  /// ||T_n - T||_A
  double distance(int n) const { return a_opnorm(weight_, term(n) - limit_); }

  /// Geometric 1, 2, 4, ... up to 256; up to 2^15 for the multiplication rule, whose gaps
  /// approach the limit at rate O(1/n); 1..size for explicit lists.
  std::vector<int> default_indices() const {
    std::vector<int> out;
    if (rule_ == SequenceRule::Explicit) {
      for (std::size_t i = 1; i <= terms_.size(); ++i) out.push_back(static_cast<int>(i));
      return out;
    }
    const int last = rule_ == SequenceRule::Multiplication ? (1 << 15) : 256;
    for (int n = 1; n <= last; n *= 2) out.push_back(n);
    return out;
  }

  /// ||T_n - T||_A is nonincreasing along `indices` from position `from` on, and its last
  /// value is at most `tail`.
  bool converges_uniformly(const std::vector<int>& indices, std::size_t from = 0,
                           double tail = 1e-2) const {
    double prev = std::numeric_limits<double>::infinity();
    double d = prev;
    for (std::size_t k = from; k < indices.size(); ++k) {
      d = distance(indices[k]);
      if (d > prev + 1e-12) return false;
      prev = d;
    }
    return d <= tail;
  }

 private:
  OperatorSequence(SequenceRule r, Weight w, CMatrix limit)
      : rule_(r), weight_(std::move(w)), limit_(std::move(limit)) {
    require_dim(weight_, limit_, "sequence limit");
  }

  SequenceRule rule_;
  Weight weight_;
  CMatrix limit_;
  CMatrix direction_;
  RVector grid_;
  std::function<double(double, int)> phi_;
  std::vector<CMatrix> terms_;
};

struct ConvergenceTrace {
  std::string quantity;
  std::vector<int> indices;
  std::vector<double> values;
  double target = 0.0;
  /// |value_n - target|
  std::vector<double> rates;
  /// Upper bound on the rate at each index.
  std::vector<double> envelopes;

  bool within_envelope() const {
    for (std::size_t k = 0; k < rates.size(); ++k)
      if (!(std::isfinite(rates[k]) && rates[k] <= envelopes[k])) return false;
    return true;
  }

  double final_rate() const { return rates.empty() ? 0.0 : rates.back(); }

  void add(int n, double value, double envelope) {
    indices.push_back(n);
    values.push_back(value);
    rates.push_back(std::abs(value - target));
    envelopes.push_back(envelope);
  }
};

/// CSV with columns n, value, target, rate, envelope; 12 significant digits.
inline void write_csv(std::ostream& os, const ConvergenceTrace& tr) {
  os << "n,value,target,rate,envelope\n";
  char buf[160];
  for (std::size_t k = 0; k < tr.indices.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g\n", tr.indices[k], tr.values[k],
                  tr.target, tr.rates[k], tr.envelopes[k]);
    os << buf;
  }
}

/// Per-estimate allowance for sampled suprema/infima falling short.
inline constexpr double kEstimatorSlack = 2.5e-3;

enum class Quantity { Radius, Crawford };

namespace detail {

inline double evaluate(Quantity what, const Weight& w, const CMatrix& t, const QParam& q,
                       const Budget& b, std::uint64_t seed) {
  return what == Quantity::Radius ? aq_radius(w, t, q, b, seed).value
                                  : aq_crawford(w, t, q, b, seed).value;
}

inline ConvergenceTrace trace_operator(Quantity what, const OperatorSequence& seq, const QParam& q,
                                       const std::vector<int>& indices, const Budget& budget,
                                       std::uint64_t seed, double slack) {
  const Weight& w = seq.weight();
  ConvergenceTrace tr;
  tr.quantity = what == Quantity::Radius ? "omega_aq" : "c_aq";
  tr.target = evaluate(what, w, seq.limit(), q, budget, seed);
  for (int n : indices)
    tr.add(n, evaluate(what, w, seq.term(n), q, budget, seed), seq.distance(n) + 2.0 * slack);
  return tr;
}

}  // namespace detail

/// omega_{A,q}(T_n) against omega_{A,q}(T), envelope ||T_n - T||_A + 2 slack.
inline ConvergenceTrace trace_radius(const OperatorSequence& seq, const QParam& q,
                                     const std::vector<int>& indices, const Budget& budget = {},
                                     std::uint64_t seed = 0, double slack = kEstimatorSlack) {
  return detail::trace_operator(Quantity::Radius, seq, q, indices, budget, seed, slack);
}

/// c_{A,q}(T_n) against c_{A,q}(T), envelope ||T_n - T||_A + 2 slack.
inline ConvergenceTrace trace_crawford(const OperatorSequence& seq, const QParam& q,
                                       const std::vector<int>& indices, const Budget& budget = {},
                                       std::uint64_t seed = 0, double slack = kEstimatorSlack) {
  return detail::trace_operator(Quantity::Crawford, seq, q, indices, budget, seed, slack);
}

/// omega_{A,q_n}(T) (or c_{A,q_n}(T)) against omega_A(T) (or c_A(T)),
/// envelope sqrt(2(1 - Re q_n)) ||T||_A + slack.
inline ConvergenceTrace trace_q(const Weight& w, const CMatrix& t, const std::vector<QParam>& q_list,
                                const Budget& budget = {}, std::uint64_t seed = 0,
                                Quantity what = Quantity::Radius, double slack = kEstimatorSlack) {
  ConvergenceTrace tr;
  tr.quantity = what == Quantity::Radius ? "omega_aq" : "c_aq";
  tr.target = what == Quantity::Radius ? a_radius(w, t).value : a_crawford(w, t).value;
  const double norm = a_opnorm(w, t);
  for (std::size_t k = 0; k < q_list.size(); ++k) {
    const QParam& q = q_list[k];
    const double env = std::sqrt(std::max(0.0, 2.0 * (1.0 - q.value().real()))) * norm + slack;
    tr.add(static_cast<int>(k + 1), detail::evaluate(what, w, t, q, budget, seed), env);
  }
  return tr;
}

/// Gap traces (g_omega, g_c) with envelope 2 ||T_n - T||_A + 2 slack.
inline std::pair<ConvergenceTrace, ConvergenceTrace> trace_gaps(const OperatorSequence& seq,
                                                                const QParam& q,
                                                                const std::vector<int>& indices,
                                                                const Budget& budget = {},
                                                                std::uint64_t seed = 0,
                                                                double slack = kEstimatorSlack) {
  const Weight& w = seq.weight();
  ConvergenceTrace go, gc;
  go.quantity = "gap_omega";
  gc.quantity = "gap_c";
  auto [lo, lc] = gaps(w, seq.limit(), q, budget, seed);
  go.target = lo.gap;
  gc.target = lc.gap;
  for (int n : indices) {
    const CMatrix tn = seq.term(n);
    const double env = 2.0 * seq.distance(n) + 2.0 * slack;
    auto [o, c] = gaps(w, tn, q, budget, seed);
    go.add(n, o.gap, env);
    gc.add(n, c.gap, env);
  }
  return {go, gc};
}

}  // namespace aqr
