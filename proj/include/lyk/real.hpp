#pragma once

// Thin RAII value type over an MPFR float with an explicit mantissa size.
// Binary operations produce a result at the larger of the operand precisions.

#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

namespace lyk {

class Real {
 public:
  explicit Real(long bits = 53);
  Real(double value, long bits);
  Real(long value, long bits);

  /// Parses a decimal string ("3.9124", "-1e-3"). Throws InputError.
  static Real parse(std::string_view text, long bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  long bits() const { return static_cast<long>(mpfr_get_prec(v_)); }
  Real with_bits(long bits) const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  /// Decimal rendering with `digits` significant digits; 0 means enough
  /// digits to round-trip the mantissa.
  std::string to_string(int digits = 0) const;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  int sign() const { return mpfr_sgn(v_); }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator-(const Real& a);

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

 private:
  mpfr_t v_;
};

Real abs(const Real& x);
Real floor(const Real& x);
Real sqrt(const Real& x);
/// x^e for x >= 0; integer exponents use exact repeated multiplication.
Real pow(const Real& x, double e);
Real mul_2si(const Real& x, long e);

}  // namespace lyk
