#pragma once

#include "aqrange/aqrange.hpp"

#include <gtest/gtest.h>

#include <random>

namespace testing_support {

using aqr::CMatrix;
using aqr::Complex;
using aqr::CVector;

inline CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline CMatrix diag(std::initializer_list<double> d) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

inline CMatrix nilpotent2(double corner) { return mat2(0.0, corner, 0.0, 0.0); }

inline CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n) { return aqr::detail::random_matrix(rng, n); }
inline CVector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  return aqr::detail::complex_gaussian(rng, n);
}
inline aqr::Weight random_pd(std::mt19937_64& rng, Eigen::Index n) {
  return aqr::Weight(aqr::detail::random_pd_weight(rng, n));
}

}  // namespace testing_support
