#pragma once

// Concrete unimodal maps at configurable precision: orbits, itineraries,
// empirical cutting times, kneading-targeted tuning and attractor heuristics.

#include <quadmath.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyk/kneading.hpp"
#include "lyk/real.hpp"

namespace lyk {

enum class Family { symmetric, logistic };

/// symmetric: x -> 1 - a|x|^ell on [-1,1], critical point 0, 0 < a <= 2.
/// logistic:  x -> a x (1 - x) on [0,1], critical point 1/2, 0 < a <= 4, ell = 2.
class UnimodalMap {
 public:
  static constexpr long kDefaultBits = 256;

  UnimodalMap(Family family, Real a, double ell = 2);
  static UnimodalMap logistic(const Real& a) { return UnimodalMap(Family::logistic, a, 2); }
  static UnimodalMap symmetric(const Real& a, double ell) { return UnimodalMap(Family::symmetric, a, ell); }

  /// Grammar: whitespace-separated tokens, each `key:value`, `key=value`, or a
  /// bare family name. Keys: family (logistic|symmetric), a (decimal),
  /// ell (>= 1; logistic requires 2), bits (>= 53). Example:
  /// "family:logistic a:3.9 ell:2 bits:256" or "logistic a=4".
  static UnimodalMap parse(const std::string& spec, long default_bits = kDefaultBits);
  std::string to_spec() const;

  Family family() const { return family_; }
  const Real& a() const { return a_; }
  double ell() const { return ell_; }
  long bits() const { return a_.bits(); }

  UnimodalMap with_parameter(const Real& a) const { return UnimodalMap(family_, a, ell_); }
  UnimodalMap with_bits(long bits) const { return UnimodalMap(family_, a_.with_bits(bits), ell_); }

  Real critical() const;
  Real lo() const;
  Real hi() const;
  double critical_d() const { return family_ == Family::logistic ? 0.5 : 0.0; }
  double lo_d() const { return family_ == Family::logistic ? 0.0 : -1.0; }
  double hi_d() const { return 1.0; }
  double diameter() const { return hi_d() - lo_d(); }

  Real operator()(const Real& x) const;
  double operator()(double x) const;
  __float128 operator()(__float128 x) const;
  /// f'(x).
  Real derivative(const Real& x) const;
  double derivative(double x) const;

  /// Tolerance for ties and membership: 2^(-bits/4).
  Real tolerance() const;
  /// -1 left of c, +1 right of c, 0 within tolerance of c.
  int side(const Real& x) const;

 private:
  Family family_;
  Real a_;
  double ell_;
  double a_d_;
  __float128 a_q_;
};

struct Orbit {
  Real x0;
  long length = 0;  ///< number of iterates n
  long stride = 1;
  std::vector<Real> points;  ///< f^{j*stride}(x0) for j*stride < length
};

/// Throws RangeError if a point leaves the interval by more than one ulp.
Orbit iterate(const UnimodalMap& f, const Real& x, long n, long stride = 1);

/// Symbols of f^1(x) .. f^n(x): 1 right of c, 0 left, 2 within tolerance of c.
std::vector<std::uint8_t> itinerary(const UnimodalMap& f, const Real& x, std::size_t n);

/// Parity-lexicographic order with L < C < R, reversed after an odd number of R.
/// Sequences of symbols 0 (L), 2 (C), 1 (R); compares the common prefix and
/// returns -1, 0 or +1.
int compare_itineraries(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

/// The critical orbit with the tower data D_n = [c_n, c_{beta(n)}].
struct CriticalScan {
  std::vector<Real> orbit;       ///< c_0 = c, c_1, ..., c_N
  std::vector<long> beta;        ///< beta[n] for 2 <= n <= N; beta[0] = beta[1] = 0
  std::vector<bool> cutting;     ///< cutting[n] for 1 <= n <= N
  std::vector<long> cutting_times;  ///< S_0 = 1, S_1, ...
  Real boundary_image;           ///< f(boundary); D_1 = [f(boundary), c_1]
  long levels() const { return static_cast<long>(orbit.size()) - 1; }
};

/// Scans levels 1..n_max. Raises DegenerateError if the critical orbit lands
/// on a fixed point, PrecisionError if c is within tolerance of an endpoint of D_n.
CriticalScan scan_critical_orbit(const UnimodalMap& f, long n_max);

struct EmpiricalKneading {
  KneadingData kneading;
  CriticalScan scan;
};

/// Cutting times S_0..S_{k_max} of the map. Throws RangeError if fewer than
/// k_max cutting times appear within n_limit iterates (finite kneading map).
EmpiricalKneading empirical_cutting_times(const UnimodalMap& f, int k_max, long n_limit = 1L << 22);

struct TuneResult {
  Real lo;
  Real hi;
  Real mid;
  int steps = 0;
  long prefix_length = 0;  ///< length of the kneading prefix matched
  KneadingData verified;   ///< empirical cutting times at mid through depth
};

/// Bisection on a against the target kneading sequence of c_1 up to
/// S_{depth+1}; stops when the midpoint realizes it and its empirical
/// cutting times match the target through depth.
TuneResult tune_parameter(Family family, double ell, const KneadingData& target, int depth, long bits);

enum class AttractorKind { periodic, interval_cycle, solenoidal, undetermined };
const char* to_string(AttractorKind k);

struct AttractorLabel {
  AttractorKind kind = AttractorKind::undetermined;
  int period = 0;  ///< cycle period, number of intervals, or cascade depth
  std::string describe() const;
};

struct AttractorReport {
  std::vector<AttractorLabel> samples;
  AttractorLabel majority;
  int majority_count = 0;
  std::string note;
};

struct AttractorOptions {
  double eps = 0x1p-20;
  int p_max = 64;
  int bins = 1000;
  int cascade_depth = 10;  ///< kneading depth examined for renormalization witnesses
  std::uint64_t seed = 1;
};

/// Heuristic labels for sample_count random starting points.
AttractorReport detect_attractor(const UnimodalMap& f, int sample_count, long transient, long horizon,
                                 const AttractorOptions& opt = {});

/// 53-bit uniform draw in [0,1).
inline double uniform53(std::uint64_t r) { return static_cast<double>(r >> 11) * 0x1.0p-53; }

}  // namespace lyk
