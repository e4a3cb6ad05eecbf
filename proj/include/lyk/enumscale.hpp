#pragma once

// Enumeration scale: n = sum e_j S_j with the greedy digits, the odometer
// "add one and carry", and the circle projection pi_rho.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lyk/algebra.hpp"
#include "lyk/kneading.hpp"

namespace lyk {

/// Finite truncation e_0 .. e_{m-1} of a point of the enumeration scale.
/// m never exceeds the depth of the kneading data, so Q(i+1) is known for every i < m.
class EnumSequence {
 public:
  EnumSequence(std::shared_ptr<const KneadingData> kd, std::vector<std::uint8_t> bits);

  static EnumSequence zero(std::shared_ptr<const KneadingData> kd);
  static EnumSequence unit(std::shared_ptr<const KneadingData> kd, int k);

  const KneadingData& kneading() const { return *kd_; }
  const std::shared_ptr<const KneadingData>& kneading_ptr() const { return kd_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  int length() const { return static_cast<int>(bits_.size()); }
  std::uint8_t operator[](int i) const { return bits_[static_cast<std::size_t>(i)]; }

  /// e_i = 1 implies e_j = 0 for Q(i+1) <= j < i.
  bool is_admissible() const;
  /// e_0 S_0 + ... + e_j S_j < S_{j+1} for every j < m.
  bool partial_sums_bounded() const;

  /// "name:0101...", lowest index first.
  std::string to_string() const;

  friend bool operator==(const EnumSequence& a, const EnumSequence& b) {
    return a.kd_ == b.kd_ && a.bits_ == b.bits_;
  }

 private:
  std::shared_ptr<const KneadingData> kd_;
  std::vector<std::uint8_t> bits_;
};

/// Greedy digits of n; length = depth of kd. Requires n < S_depth.
EnumSequence encode(const BigInt& n, std::shared_ptr<const KneadingData> kd);
/// Throws InputError on an inadmissible sequence.
BigInt decode(const EnumSequence& e);

/// Carry rewriting: add 1 at e_0, then replace e_i = e_{Q(i+1)} = 1 (zeros
/// between) by e_{i+1} = 1 until admissible. RangeError on overflow past the
/// truncation; there is no wrap to <0>.
EnumSequence add_one(const EnumSequence& e);
/// Same result through decode/encode.
EnumSequence add_one_by_codec(const EnumSequence& e);

/// Parses "name:0101..." against kd; the name must match kd's.
EnumSequence parse_enum_sequence(const std::string& text, std::shared_ptr<const KneadingData> kd);

/// |fp(rho S_k)| <= C r^k for k >= trunc.
struct DecayModel {
  double C = 1;
  double r = 0.5;
};

struct Projection {
  double point = 0;                 ///< in [0,1)
  std::optional<double> tail_bound;  ///< present when a decay model was supplied
};

/// sum_{k < trunc} e_k fp(rho S_k) mod 1, using a precomputed fp table.
Projection project(const EnumSequence& e, const FpTable& table, int trunc,
                   std::optional<DecayModel> decay = std::nullopt);

/// Distance on R/Z.
double circle_distance(double a, double b);

}  // namespace lyk
