#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace lyk {

using BigInt = boost::multiprecision::cpp_int;

/// Dense univariate polynomial with exact integer coefficients, lowest degree first.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<BigInt> coeffs);
  IntPoly(std::initializer_list<long> coeffs);

  static IntPoly monomial(int degree, BigInt coeff = 1);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  BigInt coeff(int i) const;
  const std::vector<BigInt>& coeffs() const { return c_; }
  const BigInt& leading() const { return c_.back(); }
  bool is_zero() const { return c_.empty(); }

  IntPoly derivative() const;

  /// Quotient and remainder by a monic divisor (exact over the integers).
  std::pair<IntPoly, IntPoly> divmod_monic(const IntPoly& divisor) const;
  bool divisible_by(const IntPoly& monic_divisor) const;

  long double eval(long double x) const;
  std::complex<long double> eval(std::complex<long double> z) const;
  /// Sum of |a_i| r^i; bounds rounding noise of eval at |z| = r.
  long double abs_eval(long double r) const;

  std::string to_string(const std::string& var = "x") const;

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }

 private:
  void trim();
  std::vector<BigInt> c_;
};

/// Characteristic polynomial x^d - x^(d-1) - 1 of S_k = S_{k-1} + S_{k-d}.
IntPoly cutting_time_polynomial(int d);

/// n-th cyclotomic polynomial.
IntPoly cyclotomic(int n);

}  // namespace lyk
