// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "aqrange/aqrange.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

using namespace aqr;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

CMatrix nilpotent2(double corner) {
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 1) = corner;
  return t;
}

Outcome example1() {
  const Weight w = Weight::identity(2);
  const CMatrix t = nilpotent2(1.0 / 70.0);
  double closed = 0.0, est = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double q = k / 10.0;
    const double target = (1.0 + std::sqrt(1.0 - q * q)) / 140.0;
    closed = std::max(closed, std::abs(q_radius_2x2(t, q) - target));
    const QParam qp = k == 0 ? QParam::classical(0.0) : QParam(q);
    est = std::max(est, std::abs(aq_radius(w, t, qp).value - target));
  }
  return {closed <= 1e-6 && est <= 5e-4, fmt("max error closed form %.2e, estimator %.2e", closed, est)};
}

Outcome example2() {
  const CMatrix t = nilpotent2(1.0 / 24.0);
  const double omega = a_radius(Weight::identity(2), t).value;
  double err = 0.0, min_margin = 1e300;
  for (int k = 0; k <= 100; ++k) {
    const double q = k / 100.0;
    const double diff = std::abs(q_radius_2x2(t, q) - omega);
    err = std::max(err, std::abs(diff - std::sqrt(1.0 - q * q) / 48.0));
    min_margin = std::min(min_margin, std::sqrt(2.0 * (1.0 - q)) / 24.0 - diff);
  }
  err = std::max(err, std::abs(omega - 1.0 / 48.0));
  return {err <= 1e-6 && min_margin >= 0.0, fmt("max error %.2e, min bound margin %.3g", err, min_margin)};
}

Outcome example3() {
  const CMatrix t = CMatrix::Identity(2, 2) / 20.0;
  double err = 0.0, min_margin = 1e300;
  for (int k = 0; k <= 100; ++k) {
    const double q = k / 100.0;
    const double wq = q_radius_2x2(t, q);
    err = std::max(err, std::abs(wq - q / 20.0));
    const double diff = std::abs(wq - 1.0 / 20.0);
    err = std::max(err, std::abs(diff - (1.0 - q) / 20.0));
    min_margin = std::min(min_margin, std::sqrt(2.0 * (1.0 - q)) / 20.0 - diff);
  }
  return {err <= 1e-10 && min_margin >= 0.0, fmt("max error %.2e, min bound margin %.3g", err, min_margin)};
}

Outcome example4() {
  const Weight w = Weight::identity(3);
  const CMatrix j = jordan3();
  double err = 0.0, min_margin = 1e300;
  for (int k = 0; k <= 10; ++k) {
    const double q = 0.5 + 0.05 * k;
    const double formula = jordan3_q_radius(q);
    err = std::max(err, std::abs(aq_radius(w, j, QParam(q)).value - formula));
    min_margin = std::min(min_margin, std::sqrt(2.0 * (1.0 - q)) - std::abs(formula - 1.0 / std::sqrt(2.0)));
  }
  const double at_one = std::max(std::abs(jordan3_q_radius(1.0) - 1.0 / std::sqrt(2.0)),
                                 std::abs(aq_radius(w, j, QParam(1.0)).value - 1.0 / std::sqrt(2.0)));
  // At q = 1 the bound is 0 and both sides are 1/sqrt(2) up to rounding.
  return {err <= 1e-4 && at_one <= 1e-6 && min_margin >= -1e-12,
          fmt("max |estimator - formula| %.2e, error at q = 1 %.2e, min bound margin %.3g", err, at_one,
              min_margin)};
}

Outcome law_suite() {
  SuiteConfig cfg;
  cfg.n_instances = 200;
  cfg.dims = {2, 3, 4};
  cfg.seed = 0;
  const auto reports = run_suite(cfg);
  const int failures = count_failures(reports);
  const std::set<std::string> required{"T1.1", "T1.2", "T1.3", "T1.4", "T1.5", "T1.7", "T1.8",
                                       "Note", "T2.lower", "T2.upper", "T3.c_link", "T3.middle_link",
                                       "T3.omega_link", "Cor1.omega1", "Cor1.omega2", "Cor1.c1", "Cor1.c2",
                                       "T4.1", "T5.1", "T5.3", "App1.omega_gap", "App1.c_gap"};
  std::set<std::string> evaluated;
  int skipped = 0;
  for (const auto& r : reports) {
    if (r.skipped) ++skipped;
    else evaluated.insert(r.law_id);
  }
  bool covered = true;
  std::string missing;
  for (const auto& id : required)
    if (!evaluated.count(id)) {
      covered = false;
      missing += " " + id;
    }
  std::string detail = std::to_string(reports.size()) + " reports, " + std::to_string(skipped) + " skipped, " +
                       std::to_string(failures) + " hard failures";
  if (!covered) detail += ", never evaluated:" + missing;
  for (const auto& r : reports)
    if (!r.skipped && !r.pass) std::printf("    failure %s %s slack %.3g\n", r.law_id.c_str(), r.instance_digest.c_str(), r.slack);
  return {failures == 0 && covered, detail};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  double worst_sup = 0.0, worst_inf = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int n = k % 2 == 0 ? 2 : 3;
    const Weight w(detail::random_pd_weight(rng, n));
    CMatrix t = detail::random_matrix(rng, n);
    if (k % 4 >= 2) t += 2.0 * CMatrix::Identity(n, n);  // Crawford number away from 0
    const QParam q = detail::random_q(rng);
    const OracleBounds o = oracle_grid(w, t, q, 200);
    worst_sup = std::max(worst_sup, std::abs(aq_radius(w, t, q).value - o.lower_sup));
    worst_inf = std::max(worst_inf, std::abs(aq_crawford(w, t, q).value - o.upper_inf));
  }
  return {worst_sup <= 5e-3 && worst_inf <= 5e-3,
          fmt("max |radius - oracle| %.2e, max |crawford - oracle| %.2e", worst_sup, worst_inf)};
}

Outcome convergence() {
  bool ok = true;
  int traces = 0;
  auto check = [&](const ConvergenceTrace& tr) {
    ++traces;
    ok = ok && tr.within_envelope();
  };
  // Operator sequences: scaled Example 1, a weighted random perturbation, the multiplication rule.
  const CMatrix ex1 = nilpotent2(1.0 / 70.0);
  const auto scaled = OperatorSequence::perturbation(Weight::identity(2), ex1, ex1);
  std::mt19937_64 rng(7);
  const auto weighted = OperatorSequence::perturbation(Weight(detail::random_pd_weight(rng, 3)),
                                                       detail::random_matrix(rng, 3), detail::random_matrix(rng, 3));
  const auto mult = OperatorSequence::multiplication_default(64);
  for (const auto* seq : {&scaled, &weighted}) {
    for (QParam q : {QParam(0.5), QParam(0.3, 0.6)}) {
      check(trace_radius(*seq, q, seq->default_indices()));
      check(trace_crawford(*seq, q, seq->default_indices()));
    }
  }
  check(trace_radius(mult, QParam(0.5), {1, 2, 4, 8, 16, 32, 64, 128, 256}));
  check(trace_crawford(mult, QParam(0.5), {1, 2, 4, 8, 16, 32, 64, 128, 256}));

  double worst_gap = 0.0;
  for (Complex qv : {Complex(0.3), Complex(0.5, 0.5), Complex(0.9)}) {
    const QParam q(qv);
    auto [go, gc] = trace_gaps(mult, q, mult.default_indices());
    check(go);
    check(gc);
    const double limit = 1.0 - q.modulus();
    worst_gap = std::max({worst_gap, std::abs(go.values.back() - limit), std::abs(gc.values.back() - limit)});
  }
  ok = ok && worst_gap <= 1e-4;
  return {ok, std::to_string(traces) + " traces within envelope: " + (ok ? "yes" : "no") +
                  fmt(", Application 2 final gap error %.2e", worst_gap)};
}

Outcome q_one() {
  std::mt19937_64 rng(11);
  double worst_r = 0.0, worst_c = 0.0;
  int positive_c = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 3;
    const Weight w(detail::random_pd_weight(rng, n));
    CMatrix t = detail::random_matrix(rng, n);
    if (k % 2) t += 3.0 * CMatrix::Identity(n, n);
    const double ca = a_crawford(w, t).value;
    if (ca > 1e-3) ++positive_c;
    worst_r = std::max(worst_r, std::abs(aq_radius(w, t, QParam(1.0)).value - a_radius(w, t).value));
    worst_c = std::max(worst_c, std::abs(aq_crawford(w, t, QParam(1.0)).value - ca));
  }
  return {worst_r <= 1e-6 && worst_c <= 1e-6,
          fmt("max radius difference %.2e, max Crawford difference %.2e, %g instances with c_A > 0", worst_r,
              worst_c, positive_c)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Example 1 reproduction", 10, example1},
      {2, "Example 2 curves and bound", 5, example2},
      {3, "Example 3 curves and bound", 1, example3},
      {4, "Example 4 Jordan block formula vs estimator", 60, example4},
      {5, "law suite, 200 instances, seed 0", 900, law_suite},
      {6, "oracle equivalence, 50 instances", 600, oracle_equivalence},
      {7, "convergence envelopes and Application 2 gaps", 300, convergence},
      {8, "q = 1 degeneration, 50 instances", 120, q_one},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.ok && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d: %s -- %s; %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
