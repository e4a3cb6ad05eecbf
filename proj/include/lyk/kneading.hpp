#pragma once

// Kneading maps and cutting times.
//
// A kneading map Q assigns to every k >= 1 an index 0 <= Q(k) < k, and the
// cutting times follow S_0 = 1, S_k = S_{k-1} + S_{Q(k)}. Cutting times grow
// geometrically, so they are stored as arbitrary-size integers.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyk/polynomial.hpp"

namespace lyk {

/// Kneading map rule: tabulated values Q(1..m) followed by an optional
/// closed-form tail Q(k) = max{k - d, 0}.
class QRule {
 public:
  QRule() = default;

  /// Q(k) = max{k - d, 0}; d = 2 is the Fibonacci map.
  static QRule fibonacci_like(int d);
  /// Q(k) = k - 1, i.e. S_k = 2 S_{k-1}.
  static QRule feigenbaum() { return fibonacci_like(1); }
  static QRule tabulated(std::vector<int> values, std::optional<int> tail_d = std::nullopt,
                         std::string name = {});
  /// S = 1,2,3,4,6,8,10,12 and S_k = S_{k-1} + S_{k-5} for k >= 8.
  static QRule doubled_example();

  /// Parses "fib", "feigenbaum", "d=<n>" (alias "max-k-<n>"), "doubled".
  static QRule parse(std::string_view spec);

  bool defined_at(int k) const;
  /// Throws RangeError where undefined, InputError where the value is invalid.
  int operator()(int k) const;

  const std::vector<int>& table() const { return table_; }
  std::optional<int> tail_offset() const { return tail_; }
  const std::string& name() const { return name_; }

 private:
  std::vector<int> table_;
  std::optional<int> tail_;
  std::string name_;
};

class KneadingData {
 public:
  KneadingData() = default;

  /// Evaluates the cutting-time recursion for k = 0..k_max.
  /// Rejects Q(k) >= k and Q(k) < 0.
  static KneadingData build(const QRule& rule, int k_max);
  /// Recovers Q from a strictly increasing S with S_0 = 1.
  /// Throws InputError naming the first inadmissible k.
  static KneadingData from_cutting_times(std::vector<BigInt> cutting_times, std::string name = "tabulated");

  int depth() const { return static_cast<int>(s_.size()) - 1; }
  const BigInt& S(int k) const;
  /// Q(k) for 1 <= k <= depth.
  int Q(int k) const;
  const std::vector<BigInt>& cutting_times() const { return s_; }
  /// Q(1..depth).
  const std::vector<int>& q_values() const { return q_; }
  const QRule& rule() const { return rule_; }
  const std::string& name() const { return rule_.name(); }

  /// n minus the largest cutting time strictly below n (n >= 2, n <= S_depth).
  BigInt beta(const BigInt& n) const;
  /// Index k with S_k == n, if n is a computed cutting time.
  std::optional<int> index_of(const BigInt& n) const;

  /// max_{1 <= k <= depth} (k - Q(k)).
  int max_gap() const;

  /// Same rule, recomputed to a larger depth.
  KneadingData extended(int k_max) const { return build(rule_, k_max); }

 private:
  QRule rule_;
  std::vector<BigInt> s_;
  std::vector<int> q_;
};

/// Q(1..n-1) from S_0..S_{n-1}; throws InputError on the first k whose
/// difference S_k - S_{k-1} is not an earlier cutting time.
std::vector<int> q_from_cutting_times(std::span<const BigInt> cutting_times);

struct RenormalizationVerdict {
  bool renormalizable = false;
  int k = 0;           ///< least witness, when renormalizable
  BigInt period = 0;   ///< S_k, when renormalizable
  int horizon = 0;     ///< the condition was checked for indices up to here only
  std::string note() const;
};

/// Least k >= 1 with k = Q(k+1) and Q(k+j) >= k for 1 < j <= horizon - k.
RenormalizationVerdict is_renormalizable(const KneadingData& kd, int horizon);

/// +1 if k = 2,3 mod 6; -1 if k = 5,0 mod 6; 0 if k = 1,4 mod 6.
int six_periodic_correction(int k);

struct RelationRow {
  int k = 0;
  BigInt lhs;
  BigInt rhs;
  BigInt residual;
};

/// For S_k = S_{k-1} + S_{k-(6m-1)}: residual of the linear relation read off
/// from (x^{6m-1} - x^{6m-2} - 1) / (x^2 - x + 1), plus the 6-periodic correction.
std::vector<RelationRow> check_six_periodic_relation(const KneadingData& kd, int m, int k_lo, int k_hi);

/// m = 1 case: S_k = S_{k-2} + S_{k-3} + correction(k).
std::vector<RelationRow> check_relation_5fib(const KneadingData& kd, int k_lo, int k_hi);

/// Itinerary of c_1 implied by the kneading map: symbols nu_1..nu_length,
/// 1 for the right of c, 0 for the left. Built from
/// nu_1..nu_{S_k} = nu_1..nu_{S_{k-1}} nu_1..nu'_{S_{Q(k)}} (last symbol flipped).
std::vector<std::uint8_t> kneading_sequence(const KneadingData& kd, std::size_t length);

/// "#kneading v1" followed by one "k Q(k) S_k" line per index ("-" for Q(0)).
std::string to_text(const KneadingData& kd);
KneadingData parse_kneading_text(std::string_view text);

}  // namespace lyk
