#pragma once

// Hofbauer tower over a unimodal map: levels D_n, lifted orbits, b_n and the
// rotation estimates pi~_n, the induced Markov map on E_l = D_{1+S_l}, drift,
// omega(c) covers, equal-length loops and first-entry maps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyk/algebra.hpp"
#include "lyk/dynamics.hpp"
#include "lyk/kneading.hpp"

namespace lyk {

class TowerLevels {
 public:
  TowerLevels(UnimodalMap map, CriticalScan scan);

  const UnimodalMap& map() const { return map_; }
  const CriticalScan& scan() const { return scan_; }
  const KneadingData& kneading() const { return kneading_; }
  long n_max() const { return scan_.levels(); }

  bool is_cutting(long n) const;
  /// k with S_k = n, or -1.
  int cutting_index(long n) const;
  /// D_n = [c_n, c_{beta(n)}] (D_1 = [f(boundary), c_1]); endpoints unordered.
  const Real& endpoint(long n) const;
  const Real& other_endpoint(long n) const;
  long beta(long n) const;
  /// Tri-state membership with the map's tolerance: 1 inside, 0 outside, -1 ambiguous.
  int contains(long n, const Real& x) const;
  double length(long n) const;

 private:
  UnimodalMap map_;
  CriticalScan scan_;
  KneadingData kneading_;
};

TowerLevels build_levels(const UnimodalMap& f, long n_max);

enum class Branch : std::uint8_t { none, climb, fall, restart, tie_climb };
const char* to_string(Branch b);

struct TowerTrace {
  Real x;
  /// level[j] = l_j for 1 <= j <= N; level[0] is unused and 0.
  std::vector<long> level;
  /// Decision taken at time j when leaving level[j] (none at non-cutting levels).
  std::vector<Branch> branch;
  long ties = 0;      ///< near ties at c resolved by climbing
  long restarts = 0;  ///< exact hits of c, restarting at level 1
  long outside = 0;   ///< times j with f^j(x) not in D_{l_j} beyond tolerance
  long N() const { return static_cast<long>(level.size()) - 1; }
};

/// Lifts the orbit of x for N steps, starting at l_1 = 1. A near tie at c takes
/// the climb branch and is counted; an exact hit f^j(x) = c restarts at level 1.
/// Throws RangeError when the lift climbs past n_max.
TowerTrace lift(const TowerLevels& levels, const Real& x, long N);

/// Builds a trace from a level sequence l_1..l_N (for synthetic checks).
TowerTrace trace_from_levels(std::vector<long> levels_1_based);

/// Every non-cutting level steps up by one and every cutting level S_k goes to
/// 1+S_k or 1+S_{Q(k)} (level 1 to 2 or 1); exact restarts are exempt.
/// Returns the first offending time, if any. Levels up to `known_through`
/// (e.g. the scanned n_max) missing from kd are non-cutting.
std::optional<long> check_transitions(const TowerTrace& t, const KneadingData& kd, long known_through = 0);

struct BValue {
  long time = 0;
  bool provisional = false;
};

/// b_n = last time j <= N with l_j = n. Provisional unless
/// N - b_n >= guard_factor * |b_{n'} - b_n| for the next larger visited level n'.
/// Throws RangeError if n was never visited.
BValue b_n(const TowerTrace& t, long n, double guard_factor = 4);

/// Visits to the states E_l: times j with l_j = 1 + S_l, and the index l.
struct ChiHat {
  std::vector<long> time;
  std::vector<int> state;
  /// segment[i] is false when the step from i-1 to i crosses a restart.
  std::vector<bool> linked;
};
ChiHat chi_hat(const TowerTrace& t, const KneadingData& kd, long known_through = 0);

/// Every linked chi^ step is l -> l+1 or l -> Q(l+1), taking S_{Q(l+1)} iterates.
bool chi_hat_is_markov(const ChiHat& chi, const KneadingData& kd);

struct PiTildeValue {
  long n = 0;
  long b = 0;
  bool provisional = false;
  double value = 0;  ///< -rho (b_n - n) mod 1
  double bound = 0;  ///< k max_{i >= k-B} |fp(rho S_i)| with S_k <= n < S_{k+1}
};

struct PiTildeReport {
  std::vector<PiTildeValue> values;
  bool stabilized = false;
  double estimate = 0;
  double residual = 0;  ///< max circle distance from the estimate over the stable tail
};

/// pi~_n over the given levels (those visited, in increasing order). The
/// estimate is the last final value once successive differences stay below
/// `cauchy` for the remaining tail.
PiTildeReport pi_tilde(const TowerTrace& t, double rho, const std::vector<long>& n_list, double cauchy = 1e-3,
                       const FpTable* fp = nullptr, int B = 2, const KneadingData* kd = nullptr);

/// Levels 1+S_k for k >= k_min, up to n_max.
std::vector<long> cutting_successor_levels(const KneadingData& kd, int k_min, long n_max);

struct DriftBin {
  int k = 0;
  long count = 0;
  double mean = 0;
  double second_moment = 0;
};

enum class DriftVerdict { positive, negative, inconclusive };
const char* to_string(DriftVerdict v);

struct DriftTable {
  std::vector<DriftBin> bins;  ///< sorted by k, only non-empty bins
  long transitions = 0;
  double mean = 0;
  double ci_half_width = 0;  ///< 95% normal interval for the weighted mean
  DriftVerdict verdict = DriftVerdict::inconclusive;
  std::vector<int> increments_seen;  ///< sorted distinct increments
};

/// Statistics of chi^_{m+1} - chi^_m conditioned on chi^_m = k.
DriftTable drift_from_traces(const std::vector<TowerTrace>& traces, const KneadingData& kd, long known_through = 0);
/// Lifts `samples` seeded random points for N steps each and tallies the drift.
DriftTable drift(const TowerLevels& levels, int samples, long N, std::uint64_t seed, int threads = 0);

struct CoverResult {
  long points = 0;
  long inside = 0;
  long ambiguous = 0;
  double fraction = 0;  ///< (inside + ambiguous) / points
};

/// Fraction of the last sample_len critical-orbit points inside
/// the union of D_n for 1+S_k <= n <= S_{k+B}.
/// HypothesisError if max_j (j - Q(j)) exceeds B over the computed range.
CoverResult omega_cover_check(const TowerLevels& levels, int k, int B, long sample_len);

struct LoopEdge {
  int from = 0;
  int to = 0;
  BigInt cost;  ///< S_{Q(from+1)} iterates of f
};

struct LoopPair {
  std::vector<LoopEdge> loop_a;  ///< kappa -> kappa_hat -> kappa
  std::vector<LoopEdge> loop_b;  ///< kappa_hat -> kappa -> kappa_hat
  BigInt length_a;
  BigInt length_b;
};

/// Shortest paths kappa -> kappa_hat and kappa_hat -> kappa in the graph with
/// edges E_l -> E_{l+1} and E_l -> E_{Q(l+1)}, joined in both orders.
/// Vertices stay below max(kappa, kappa_hat) + search_bound.
LoopPair synthesize_loops(const KneadingData& kd, int kappa, int kappa_hat, int search_bound = 32);

struct OpenInterval {
  double lo = 0;
  double hi = 0;
};

struct EntryPoint {
  double x = 0;
  std::optional<long> r;  ///< first entry time >= 1, if within horizon
  double image = 0;
  double derivative = 0;  ///< Df^r(x)
  long branch = -1;       ///< index into EntryReport::branches
};

struct EntryBranch {
  long r = 0;
  std::string itinerary;  ///< symbols of x .. f^{r-1}(x) and the entered component
  long samples = 0;
  double distortion = 1;  ///< max |Df^r| / min |Df^r| over the samples
};

struct EntryReport {
  std::vector<EntryPoint> points;
  std::vector<EntryBranch> branches;
  long no_entry = 0;
  long boundary_reentries = 0;  ///< orbits of endpoints of U that re-enter U (niceness hint)
};

EntryReport first_entry_map(const UnimodalMap& f, const std::vector<OpenInterval>& U, const std::vector<double>& xs,
                            long horizon);

}  // namespace lyk
