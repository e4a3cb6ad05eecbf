#pragma once

// Characteristic polynomials of cutting-time recursions, root isolation,
// Pisot diagnostics and the decay of fp(rho S_k).

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "lyk/kneading.hpp"
#include "lyk/polynomial.hpp"
#include "lyk/real.hpp"

namespace lyk {

struct Enclosure {
  long double lo = 0;
  long double hi = 0;
  long double mid() const { return (lo + hi) / 2; }
  long double width() const { return hi - lo; }
};

/// Real root > 1 of x^d - x^(d-1) - 1, bracketed to width <= tol.
Enclosure leading_root(int d, long double tol);
/// Largest real root of p, assumed > 1 and simple.
Enclosure leading_root(const IntPoly& p, long double tol);
/// Same root at `bits` of mantissa (bisection to the last bit).
Real leading_root_high(const IntPoly& p, long bits);

/// A disc certified to contain exactly one root of the polynomial.
struct RootDisc {
  std::complex<long double> center;
  long double radius = 0;
  long double modulus_lo() const;
  long double modulus_hi() const;
};

/// All complex roots with disjoint inclusion discs.
/// Throws PrecisionError if the discs cannot be separated.
std::vector<RootDisc> isolate_roots(const IntPoly& p);

struct PisotReport {
  bool pisot = false;
  RootDisc leading;
  std::vector<RootDisc> others;  ///< sorted by decreasing modulus
  int unit_modulus_roots = 0;    ///< roots whose modulus enclosure contains 1
  std::vector<IntPoly> cyclotomic_factors;
  IntPoly cofactor;              ///< p divided by its cyclotomic factors
  std::string note;
};

/// Tests the polynomial driving the recursion, not the minimal polynomial of
/// its leading root: yes iff every non-leading root has modulus < 1 - margin.
PisotReport is_pisot_driven(const IntPoly& p, long double margin = 1e-9L);

/// Signed distance to the nearest integer, in [-1/2, 1/2).
double fp(double x);
Real fp(const Real& x);

Real to_real(const BigInt& n, long bits);

/// Produces rho at a requested mantissa size.
using RhoSource = std::function<Real(long bits)>;
RhoSource rho_from_polynomial(IntPoly p);
RhoSource rho_from_decimal(std::string text);

/// fp(rho S_k) for k = 0..k_max, computed with 2 bitlen(S_{k_max}) + 64 bits
/// and checked against twice that precision (relative 2^-20).
/// Throws PrecisionError on disagreement.
struct FpTable {
  std::vector<double> values;
  long bits = 0;
};
FpTable fp_table(const KneadingData& kd, const RhoSource& rho, int k_max);

struct DecayRow {
  int k = 0;
  double window_max = 0;  ///< max_{k-B <= i <= k_max} |fp(rho S_i)|
  double term = 0;        ///< k * window_max
  double partial_sum = 0;
};

enum class DecayVerdict { summable_looking, not_summable_looking, inconclusive };
const char* to_string(DecayVerdict v);

struct DecayReport {
  std::vector<DecayRow> rows;
  double rate = 0;          ///< exp(slope) of a least-squares fit to log term over the last half
  double fit_rms = 0;       ///< rms residual of that fit
  double test_window_min = 0;  ///< min over k in [test_lo, test_hi] of window_max
  int test_lo = 0;
  int test_hi = 0;
  long bits = 0;
  DecayVerdict verdict = DecayVerdict::inconclusive;
};

/// Verdict: summable-looking if rate <= 0.95; otherwise not-summable-looking
/// if test_window_min >= 0.02; otherwise inconclusive.
DecayReport decay_diagnostics(const KneadingData& kd, const RhoSource& rho, int B, int k_max, int test_lo = 20,
                              int test_hi = 60);

}  // namespace lyk
