#pragma once

#include "lyk/dynamics.hpp"
#include "lyk/kneading.hpp"

namespace lyk::test {

/// Logistic map tuned to the Fibonacci kneading map through depth 20
/// at 512 bits (S_20 = 17711; 256 bits collapse the bracket), computed once per binary.
inline const UnimodalMap& fibonacci_map() {
  static const UnimodalMap f = [] {
    auto target = KneadingData::build(QRule::fibonacci_like(2), 21);
    return UnimodalMap::logistic(tune_parameter(Family::logistic, 2, target, 20, 512).mid);
  }();
  return f;
}

/// Symmetric map |x|^8 tuned to the Fibonacci kneading map through depth 20.
/// Its lifted orbits climb the tower, so pi~ estimates stabilize.
inline const UnimodalMap& fibonacci_flat_map() {
  static const UnimodalMap f = [] {
    auto target = KneadingData::build(QRule::fibonacci_like(2), 21);
    return UnimodalMap::symmetric(tune_parameter(Family::symmetric, 8, target, 20, 512).mid, 8);
  }();
  return f;
}

/// Logistic map tuned to Q(k) = k - 1 through depth 10.
inline const UnimodalMap& feigenbaum_map() {
  static const UnimodalMap f = [] {
    auto target = KneadingData::build(QRule::feigenbaum(), 11);
    return UnimodalMap::logistic(tune_parameter(Family::logistic, 2, target, 10, 256).mid);
  }();
  return f;
}

}  // namespace lyk::test
