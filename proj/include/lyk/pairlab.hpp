#pragma once

// Finite-window pair classification, Monte Carlo mass estimates, approximate
// periodicity, factor-based distal certificates and interval pushforwards.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyk/dynamics.hpp"
#include "lyk/tower.hpp"

namespace lyk {

enum class PairLabel { asymptotic_like, distal_like, ly_like, undecided };
const char* to_string(PairLabel l);

struct ClassifyParams {
  long burn_in = 1000;
  long window = 100000;  ///< total iterates; gaps are read on (burn_in, window]
  double eps = 0.45;     ///< absolute; callers usually pass 0.45 diam(I)
  double delta_min = 1e-3;
  int precision = 53;  ///< 53 (double) or 113 (binary128)
};

struct PairVerdict {
  PairLabel label = PairLabel::undecided;
  double min_gap = 0;
  double max_gap = 0;
  double tail_max = 0;  ///< max gap over the last quarter of the window
  ClassifyParams params;
  std::string describe() const;  ///< "ly-like(0.45)" etc.
};

/// Labels, first match wins: asymptotic-like if the last quarter of the window
/// stays below delta_min; distal-like if every gap exceeds delta_min; ly-like
/// if the gaps dip to delta_min and reach eps; undecided otherwise.
PairVerdict classify_pair(const UnimodalMap& f, double x, double y, const ClassifyParams& p);

struct LabelCount {
  PairLabel label;
  long count = 0;
  double fraction = 0;
  double wilson_lo = 0;
  double wilson_hi = 0;
};

struct PairRecord {
  long index = 0;
  double x = 0, y = 0;
  PairVerdict verdict;
};

struct MeasureEstimate {
  long pairs = 0;
  std::uint64_t seed = 0;
  std::vector<LabelCount> labels;  ///< in enum order
  std::vector<PairRecord> records;
  const LabelCount& of(PairLabel l) const { return labels[static_cast<std::size_t>(l)]; }
};

/// 95% Wilson score interval for k successes out of n.
std::pair<double, double> wilson_interval(long k, long n, double z = 1.959963984540054);

/// Pair i is drawn from seed_seq{seed, i}; results do not depend on `threads`.
MeasureEstimate measure_estimate(const UnimodalMap& f, long n_pairs, std::uint64_t seed, const ClassifyParams& p,
                                 int threads = 0);

/// Uniform point of the map's interval for sample i of a seeded stream (53-bit).
double sample_point(const UnimodalMap& f, std::uint64_t seed, long i, int slot);

struct PeriodicWitness {
  int period = 0;
  std::vector<double> cycle;  ///< z, f(z), ..., f^{p-1}(z)
  double sup_distance = 0;
};

struct ApproxPeriodicResult {
  std::optional<PeriodicWitness> witness;  ///< empty means no-within-bounds
  int newton_failures = 0;                 ///< seeds where refinement did not converge
};

/// For p = 1..p_max: Newton on f^p(z) = z from late orbit points; yes iff the
/// orbit stays within eps of the cycle (in phase) over `window` further iterates.
ApproxPeriodicResult approx_periodic_test(const UnimodalMap& f, double x, double eps, int p_max, long window);

struct FactorSeparation {
  bool certificate = false;
  double delta = 0;  ///< circle distance of the two pi~ estimates
  double margin = 0; ///< threshold + both residuals
};

/// Throws InputError unless both reports are stabilized.
FactorSeparation factor_separation(const PiTildeReport& a, const PiTildeReport& b, double threshold);
FactorSeparation factor_separation(const TowerTrace& a, const TowerTrace& b, double rho,
                                   const std::vector<long>& n_list, double threshold, double cauchy);

struct Interval {
  double lo = 0;
  double hi = 0;
};

struct PushforwardRow {
  int n = 0;
  double lower = 0;  ///< measure of a subset of f^n(A)
  double upper = 0;  ///< measure of a superset of f^n(A)
  double running_max = 0;  ///< max of lower over 0..n
  std::size_t components = 0;
  bool capped = false;
};

/// Pushes the union A forward exactly (branch images split at c), merging
/// overlaps. Beyond `cap` components the lower set drops its smallest pieces
/// and the upper set fills its smallest gaps.
std::vector<PushforwardRow> limsup_full_estimate(const UnimodalMap& f, const std::vector<Interval>& A, int n_max,
                                                 std::size_t cap = 10000);

}  // namespace lyk
