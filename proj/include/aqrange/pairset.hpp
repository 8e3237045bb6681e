#pragma once

// Pairs (x, y) with ||x||_A = ||y||_A = 1 and <x,y>_A = q.

#include "aqrange/semispace.hpp"

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace aqr {

struct UnitPair {
  CVector x;
  CVector y;
  Complex q_achieved;
  /// max(| ||x||_A - 1 |, | ||y||_A - 1 |, |q_achieved - q|)
  double constraint_residual = 0.0;
};

struct ConstraintResidual : Error {
  using Error::Error;
};

/// y = conj(q) x + sqrt(1-|q|^2) e^{i theta} z, for A-unit x and A-unit z A-orthogonal to x.
inline UnitPair complete_pair(const Weight& w, const CVector& x, const CVector& z, double theta,
                              const QParam& q) {
  require_dim(w, x, "complete_pair");
  require_dim(w, z, "complete_pair");
  const double p = q.complement();
  UnitPair pair;
  pair.x = x;
  pair.y = std::conj(q.value()) * x + p * std::polar(1.0, theta) * z;
  pair.q_achieved = a_inner(w, pair.x, pair.y);
  pair.constraint_residual = std::max({std::abs(a_norm_vec(w, pair.x) - 1.0),
                                       std::abs(a_norm_vec(w, pair.y) - 1.0),
                                       std::abs(pair.q_achieved - q.value())});
  if (pair.constraint_residual > 1e-8)
    throw ConstraintResidual("pair constraint residual " + std::to_string(pair.constraint_residual) +
                             " (are x, z A-orthonormal?)");
  return pair;
}

namespace detail {

inline CVector complex_gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double re = normal(rng);
    double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

/// Gaussian vector projected onto range(A) and A-normalized.
inline CVector random_a_unit(const Weight& w, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    CVector x = w.range_projector() * complex_gaussian(rng, w.dim());
    double nx = a_norm_vec(w, x);
    if (nx > 1e-8) return x / nx;
  }
  throw RankTooLow("could not draw an A-unit vector");
}

}  // namespace detail

/// Deterministic sample of `count` constraint-satisfying pairs for a fixed seed.
inline std::vector<UnitPair> sample_pairs(const Weight& w, const QParam& q, int count,
                                          std::uint64_t seed) {
  if (w.rank() < 2 && !q.unimodular())
    throw RankTooLow("rank(A) = " + std::to_string(w.rank()) + " admits no pair with |q| < 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<UnitPair> pairs;
  pairs.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    CVector x = detail::random_a_unit(w, rng);
    CVector z;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == 100) throw RankTooLow("Gram-Schmidt breakdown after 100 redraws");
      CVector raw = w.range_projector() * detail::complex_gaussian(rng, w.dim());
      if (w.rank() < 2) {
        // |q| = 1: z is multiplied by zero; any A-unit vector will do.
        z = x;
        break;
      }
      raw -= a_inner(w, raw, x) * x;
      double nz = a_norm_vec(w, raw);
      if (nz > 1e-8) {
        z = raw / nz;
        break;
      }
    }
    double theta = angle(rng);
    if (w.rank() < 2) {
      UnitPair pair;
      pair.x = x;
      pair.y = std::conj(q.value()) * x;
      pair.q_achieved = a_inner(w, pair.x, pair.y);
      pair.constraint_residual = std::abs(pair.q_achieved - q.value());
      pairs.push_back(std::move(pair));
    } else {
      pairs.push_back(complete_pair(w, x, z, theta, q));
    }
  }
  return pairs;
}

}  // namespace aqr
