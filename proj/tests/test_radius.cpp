#include "support.hpp"

#include <numbers>

using namespace aqr;
using namespace testing_support;

namespace {
double example1(double q) { return (1.0 + std::sqrt(1.0 - q * q)) / 140.0; }
}  // namespace

TEST(ARadius, KnownValues) {
  Weight i2 = Weight::identity(2);
  EXPECT_NEAR(a_radius(i2, nilpotent2(1.0 / 24.0)).value, 1.0 / 48.0, 1e-14);
  EXPECT_NEAR(a_radius(Weight::identity(3), jordan3()).value, 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(a_radius(i2, diag({-2, 1})).value, 2.0, 1e-12);
  EXPECT_EQ(a_radius(i2, diag({-2, 1})).direction, BoundDirection::TwoSided);
}

TEST(ACrawford, KnownValues) {
  std::mt19937_64 rng(1);
  Weight w = random_pd(rng, 3);
  EXPECT_NEAR(a_crawford(w, CMatrix::Identity(3, 3)).value, 1.0, 1e-12);
  EXPECT_NEAR(a_crawford(Weight::identity(2), diag({1, -1})).value, 0.0, 1e-12);
  Estimate e = a_crawford(Weight::identity(2), diag({1, -1}));
  EXPECT_LT(witness_value(Weight::identity(2), diag({1, -1}), e), 1e-7);
}

TEST(ACrawford, MatchesOracleOnWeighted3x3) {
  std::mt19937_64 rng(2);
  Weight w(diag({1, 2, 3}));
  CMatrix t = random_matrix(rng, 3) + 2.5 * CMatrix::Identity(3, 3);
  double c = a_crawford(w, t).value;
  OracleBounds o = oracle_grid(w, t, QParam(1.0), 11);
  EXPECT_GT(c, 0.1);
  EXPECT_NEAR(c, o.upper_inf, 5e-3);
  EXPECT_LE(c, o.upper_inf + 1e-9);
}

TEST(AqRadius, Example1) {
  Weight w = Weight::identity(2);
  const CMatrix t = nilpotent2(1.0 / 70.0);
  for (double q : {0.25, 0.5, 0.75, 1.0}) EXPECT_NEAR(aq_radius(w, t, QParam(q)).value, example1(q), 1e-6);
  EXPECT_NEAR(aq_radius(w, t, QParam::classical(0.0)).value, example1(0.0), 1e-6);
}

TEST(AqRadius, ScalarAndJordan) {
  Weight w2 = Weight::identity(2);
  for (double q : {0.1, 0.5, 1.0})
    EXPECT_NEAR(aq_radius(w2, CMatrix::Identity(2, 2) / 20.0, QParam(q)).value, q / 20.0, 1e-12);
  EXPECT_NEAR(aq_radius(Weight::identity(3), jordan3(), QParam(0.75)).value, jordan3_q_radius(0.75), 1e-5);
}

TEST(AqRadius, QOneMatchesSweep) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    Weight w = random_pd(rng, 2 + k % 3);
    CMatrix t = random_matrix(rng, w.dim());
    EXPECT_NEAR(aq_radius(w, t, QParam(1.0)).value, a_radius(w, t).value, 1e-6);
  }
}

TEST(AqCrawford, KnownValues) {
  Weight w2 = Weight::identity(2);
  for (double q : {0.2, 0.6, 0.95}) EXPECT_NEAR(aq_crawford(w2, nilpotent2(3.0), QParam(q)).value, 0.0, 1e-9);
  EXPECT_NEAR(aq_crawford(w2, CMatrix::Identity(2, 2) / 20.0, QParam(0.8)).value, 0.04, 1e-12);
  EXPECT_NEAR(aq_crawford(w2, diag({1, 3}), QParam(1.0)).value, 1.0, 1e-9);
  EXPECT_EQ(aq_crawford(w2, diag({1, 3}), QParam(1.0)).direction, BoundDirection::UpperBoundOfInf);
}

TEST(AqRadius, ErrorsPropagate) {
  EXPECT_THROW(aq_radius(Weight(diag({1, 0})), diag({1, 2}), QParam(0.5)), RankTooLow);
  CMatrix leaky = CMatrix::Zero(3, 3);
  leaky(0, 2) = 1.0;
  EXPECT_THROW(aq_radius(Weight(diag({1, 1, 0})), leaky, QParam(0.5)), NotABounded);
}

TEST(AqRadius, PsdWeightUsesRangeOnly) {
  // A = diag(1, 1, 0): T acts on the first two coordinates; the third is invisible.
  CMatrix t = CMatrix::Zero(3, 3);
  t(0, 1) = 1.0 / 70.0;
  t(2, 0) = 9.0;
  Weight w(diag({1, 1, 0}));
  EXPECT_NEAR(aq_radius(w, t, QParam(0.5)).value, example1(0.5), 1e-9);
}

TEST(Gaps, WorkedExampleValues) {
  Weight w = Weight::identity(3);
  for (Complex q : {Complex(0.3), Complex(0.5, 0.5), Complex(1.0)}) {
    auto [go, gc] = gaps(w, CMatrix::Identity(3, 3), QParam(q));
    EXPECT_NEAR(go.gap, 1.0 - std::abs(q), 1e-12);
    EXPECT_NEAR(gc.gap, 1.0 - std::abs(q), 1e-12);
    EXPECT_EQ(go.gap, go.op_norm - go.radius_or_crawford);
  }
  auto [go, gc] = gaps(Weight::identity(2), nilpotent2(1.0 / 70.0), QParam(1.0));
  EXPECT_NEAR(go.gap, 1.0 / 140.0, 1e-12);
  EXPECT_GE(go.gap, -1e-7);
}

TEST(Estimates, WitnessReproducesValue) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    Weight w = random_pd(rng, 2 + k % 3);
    CMatrix t = random_matrix(rng, w.dim());
    QParam q = detail::random_q(rng);
    for (const Estimate& e : {aq_radius(w, t, q), aq_crawford(w, t, q)}) {
      EXPECT_GE(e.value, 0.0);
      EXPECT_NEAR(witness_value(w, t, e), e.value, 1e-7);
      EXPECT_NEAR(a_norm_vec(w, e.witness_x), 1.0, 1e-9);
      EXPECT_NEAR(a_norm_vec(w, e.witness_y), 1.0, 1e-9);
      EXPECT_LT(std::abs(a_inner(w, e.witness_x, e.witness_y) - q.value()), 1e-9);
    }
  }
}

TEST(Estimates, MonotoneInBudget) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    Weight w = random_pd(rng, 3 + k % 2);
    CMatrix t = random_matrix(rng, w.dim());
    QParam q = detail::random_q(rng);
    Budget small{4, 100, 16, 256};
    double r1 = aq_radius(w, t, q, small, 7).value, r2 = aq_radius(w, t, q, small.scaled(2), 7).value;
    double c1 = aq_crawford(w, t, q, small, 7).value, c2 = aq_crawford(w, t, q, small.scaled(2), 7).value;
    EXPECT_GE(r2, r1);
    EXPECT_LE(c2, c1);
  }
}

TEST(Estimates, DeterministicForSeed) {
  std::mt19937_64 rng(6);
  Weight w = random_pd(rng, 3);
  CMatrix t = random_matrix(rng, 3);
  EXPECT_EQ(aq_radius(w, t, QParam(0.4, 0.3), {}, 3).value, aq_radius(w, t, QParam(0.4, 0.3), {}, 3).value);
}

TEST(InnerMaximum, ClosedFormBoundsEveryPartner) {
  std::mt19937_64 rng(7);
  for (int n : {2, 3, 4}) {
    CMatrix b = random_matrix(rng, n);
    QParam q = detail::random_q(rng);
    detail::QObjective obj(b, q);
    const double p = q.complement();
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < 10000 / 3; ++k) {
      CVector u = random_vector(rng, n).normalized();
      CVector z = random_vector(rng, n);
      z -= u.dot(z) * u;
      z.normalize();
      double theta = angle(rng);
      Complex h = u.dot(b * u);
      Complex val = q.value() * h + p * std::polar(1.0, -theta) * z.dot(b * u);
      obj.parts(u);
      EXPECT_LE(std::abs(val), obj.sup_value() + 1e-12);
      if (n >= 3) continue;
      // In dimension 2 the value lies on the circle: at least the inner minimum.
      EXPECT_GE(std::abs(val), obj.inf_value() - 1e-12);
    }
    // Equality for the constructed partners.
    for (int k = 0; k < 100; ++k) {
      CVector u = random_vector(rng, n).normalized();
      obj.parts(u);
      double sup = obj.sup_value(), inf = obj.inf_value();
      CVector vs = detail::partner(obj, u, q, detail::Goal::Sup);
      CVector vi = detail::partner(obj, u, q, detail::Goal::Inf);
      EXPECT_NEAR(std::abs(vs.dot(b * u)), sup, 1e-12);
      EXPECT_NEAR(std::abs(vi.dot(b * u)), inf, 1e-12);
      EXPECT_NEAR(vs.norm(), 1.0, 1e-12);
      EXPECT_NEAR(std::abs(vs.dot(u) - q.value()), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(vi.dot(u) - q.value()), 0.0, 1e-12);
    }
  }
}

TEST(InnerMaximum, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  for (int n : {2, 3, 5}) {
    CMatrix b = random_matrix(rng, n);
    QParam q(0.6, 0.3);
    detail::QObjective obj(b, q);
    for (int k = 0; k < 10; ++k) {
      CVector u = random_vector(rng, n).normalized();
      CVector dir = random_vector(rng, n);
      dir -= u.dot(dir).real() * u;  // tangent direction
      for (auto goal : {detail::Goal::Sup, detail::Goal::Inf}) {
        CVector g(n);
        obj.parts(u);
        if (goal == detail::Goal::Sup) obj.sup_gradient(u, g);
        else obj.inf_gradient(u, g);
        if (goal == detail::Goal::Inf && obj.inf_value() == 0.0) continue;
        const double eps = 1e-6;
        double fp = detail::objective(obj, (u + eps * dir).normalized(), goal);
        double fm = detail::objective(obj, (u - eps * dir).normalized(), goal);
        double fd = (fp - fm) / (2.0 * eps);
        double analytic = g.dot(dir).real();
        EXPECT_NEAR(analytic, fd, 1e-5 * (1.0 + std::abs(fd)));
      }
    }
  }
}

TEST(PhaseCovariance, RotatingOperatorRotatesParameter) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    Weight w = random_pd(rng, 2 + k % 2);
    CMatrix t = random_matrix(rng, w.dim());
    QParam q = detail::random_q(rng);
    Complex alpha = std::polar(1.0, 0.37 + k);
    EXPECT_NEAR(aq_radius(w, alpha * t, q).value, aq_radius(w, t, QParam(alpha * q.value())).value, 2e-3);
    EXPECT_NEAR(aq_crawford(w, alpha * t, q).value, aq_crawford(w, t, QParam(alpha * q.value())).value,
                2e-3);
  }
}

TEST(Oracle, Example1) {
  OracleBounds o = oracle_grid(Weight::identity(2), nilpotent2(1.0 / 70.0), QParam(0.5), 400);
  EXPECT_NEAR(o.lower_sup, example1(0.5), 2e-4);
  EXPECT_LE(o.lower_sup, example1(0.5) + 1e-12);
}

TEST(Oracle, ZeroOperator) {
  OracleBounds o = oracle_grid(Weight::identity(3), CMatrix::Zero(3, 3), QParam(0.4), 6);
  EXPECT_EQ(o.lower_sup, 0.0);
  EXPECT_EQ(o.upper_inf, 0.0);
}

TEST(Oracle, HermitianQOne) {
  CMatrix t = diag({2, 0.5});
  t(0, 1) = Complex(0.3, 0.1);
  t(1, 0) = std::conj(t(0, 1));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(t);
  OracleBounds o = oracle_grid(Weight::identity(2), t, QParam(1.0), 100);
  EXPECT_NEAR(o.lower_sup, es.eigenvalues().maxCoeff(), 1e-6);
  EXPECT_NEAR(o.upper_inf, es.eigenvalues().minCoeff(), 1e-6);
}

TEST(Oracle, RejectsLargeReducedDimension) {
  EXPECT_THROW(oracle_grid(Weight::identity(4), CMatrix::Identity(4, 4), QParam(0.5), 10), OracleTooLarge);
  // rank 3 inside dimension 4 is fine
  EXPECT_NO_THROW(oracle_grid(Weight(diag({1, 1, 1, 0})), diag({1, 2, 3, 4}), QParam(1.0), 4));
}

TEST(Oracle, EstimatorsDominateOracle) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 4; ++k) {
    Weight w = random_pd(rng, 2);
    CMatrix t = random_matrix(rng, 2) + (k % 2 ? 2.0 : 0.0) * CMatrix::Identity(2, 2);
    QParam q = detail::random_q(rng);
    OracleBounds o = oracle_grid(w, t, q, 60);
    EXPECT_GE(aq_radius(w, t, q).value, o.lower_sup - 1e-6);
    EXPECT_LE(aq_crawford(w, t, q).value, o.upper_inf + 1e-6);
  }
}
