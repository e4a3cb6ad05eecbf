#include "lyk/real.hpp"

#include <cmath>
#include <string>

#include "lyk/errors.hpp"

namespace lyk {

namespace {

long clamp_bits(long bits) {
  if (bits < MPFR_PREC_MIN) return MPFR_PREC_MIN;
  return bits;
}

long max_bits(const Real& a, const Real& b) { return a.bits() > b.bits() ? a.bits() : b.bits(); }

}  // namespace

Real::Real(long bits) {
  mpfr_init2(v_, clamp_bits(bits));
  mpfr_set_zero(v_, 1);
}

Real::Real(double value, long bits) {
  mpfr_init2(v_, clamp_bits(bits));
  mpfr_set_d(v_, value, MPFR_RNDN);
}

Real::Real(long value, long bits) {
  mpfr_init2(v_, clamp_bits(bits));
  mpfr_set_si(v_, value, MPFR_RNDN);
}

Real Real::parse(std::string_view text, long bits) {
  Real r(bits);
  std::string s(text);
  if (s.empty()) throw InputError("empty number");
  char* end = nullptr;
  mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end == s.c_str() || *end != '\0') throw InputError("not a decimal number: '" + s + "'");
  if (!r.is_finite()) throw InputError("number is not finite: '" + s + "'");
  return r;
}

Real::Real(const Real& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::with_bits(long bits) const {
  Real r(bits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

std::string Real::to_string(int digits) const {
  if (digits <= 0) digits = static_cast<int>(std::ceil(bits() * 0.30103)) + 2;
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Real& Real::operator+=(const Real& rhs) {
  if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), MPFR_RNDN);
  mpfr_add(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(const Real& rhs) {
  if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), MPFR_RNDN);
  mpfr_sub(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& rhs) {
  if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), MPFR_RNDN);
  mpfr_mul(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(const Real& rhs) {
  if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), MPFR_RNDN);
  mpfr_div(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

Real operator+(const Real& a, const Real& b) {
  Real r(max_bits(a, b));
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator-(const Real& a, const Real& b) {
  Real r(max_bits(a, b));
  mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator*(const Real& a, const Real& b) {
  Real r(max_bits(a, b));
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator/(const Real& a, const Real& b) {
  Real r(max_bits(a, b));
  mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator-(const Real& a) {
  Real r(a.bits());
  mpfr_neg(r.v_, a.v_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

Real abs(const Real& x) {
  Real r(x.bits());
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real floor(const Real& x) {
  Real r(x.bits());
  mpfr_floor(r.get(), x.get());
  return r;
}

Real sqrt(const Real& x) {
  Real r(x.bits());
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, double e) {
  Real r(x.bits());
  if (e == std::floor(e) && e >= 0 && e < 1e9) {
    mpfr_pow_ui(r.get(), x.get(), static_cast<unsigned long>(e), MPFR_RNDN);
  } else {
    Real ex(e, 64);
    mpfr_pow(r.get(), x.get(), ex.get(), MPFR_RNDN);
  }
  return r;
}

Real mul_2si(const Real& x, long e) {
  Real r(x.bits());
  mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}

}  // namespace lyk
