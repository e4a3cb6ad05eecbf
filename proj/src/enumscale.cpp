#include "lyk/enumscale.hpp"

#include <cmath>

#include "lyk/errors.hpp"

namespace lyk {

EnumSequence::EnumSequence(std::shared_ptr<const KneadingData> kd, std::vector<std::uint8_t> bits)
    : kd_(std::move(kd)), bits_(std::move(bits)) {
  if (!kd_) throw InputError("enumeration sequence needs kneading data");
  if (length() > kd_->depth())
    throw RangeError("sequence length " + std::to_string(length()) + " exceeds kneading depth " +
                     std::to_string(kd_->depth()));
  for (auto b : bits_)
    if (b > 1) throw InputError("enumeration digits must be 0 or 1");
}

EnumSequence EnumSequence::zero(std::shared_ptr<const KneadingData> kd) {
  const int m = kd->depth();
  return EnumSequence(std::move(kd), std::vector<std::uint8_t>(static_cast<std::size_t>(m), 0));
}

EnumSequence EnumSequence::unit(std::shared_ptr<const KneadingData> kd, int k) {
  const int m = kd->depth();
  if (k < 0 || k >= m) throw RangeError("unit index " + std::to_string(k) + " outside 0.." + std::to_string(m - 1));
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(m), 0);
  bits[static_cast<std::size_t>(k)] = 1;
  return EnumSequence(std::move(kd), std::move(bits));
}

bool EnumSequence::is_admissible() const {
  for (int i = 0; i < length(); ++i) {
    if (!bits_[static_cast<std::size_t>(i)]) continue;
    for (int j = kd_->Q(i + 1); j < i; ++j)
      if (bits_[static_cast<std::size_t>(j)]) return false;
  }
  return true;
}

bool EnumSequence::partial_sums_bounded() const {
  BigInt sum = 0;
  for (int j = 0; j < length(); ++j) {
    if (bits_[static_cast<std::size_t>(j)]) sum += kd_->S(j);
    if (sum >= kd_->S(j + 1)) return false;
  }
  return true;
}

std::string EnumSequence::to_string() const {
  std::string s = kd_->name() + ":";
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

EnumSequence encode(const BigInt& n, std::shared_ptr<const KneadingData> kd) {
  const int m = kd->depth();
  if (n < 0) throw InputError("cannot encode a negative integer");
  if (n >= kd->S(m))
    throw RangeError("n=" + n.str() + " needs cutting times beyond depth " + std::to_string(m));
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(m), 0);
  BigInt rem = n;
  for (int k = m - 1; k >= 0 && rem > 0; --k) {
    if (kd->S(k) <= rem) {
      bits[static_cast<std::size_t>(k)] = 1;
      rem -= kd->S(k);
    }
  }
  return EnumSequence(std::move(kd), std::move(bits));
}

BigInt decode(const EnumSequence& e) {
  if (!e.is_admissible()) throw InputError("inadmissible sequence " + e.to_string());
  BigInt sum = 0;
  for (int k = 0; k < e.length(); ++k)
    if (e[k]) sum += e.kneading().S(k);
  return sum;
}

EnumSequence add_one(const EnumSequence& e) {
  if (!e.is_admissible()) throw InputError("inadmissible sequence " + e.to_string());
  const KneadingData& kd = e.kneading();
  const int m = e.length();
  // One spare slot catches a carry out of the truncation.
  std::vector<int> d(e.bits().begin(), e.bits().end());
  d.push_back(0);
  d[0] += 1;

  auto overflow = [&] {
    if (d[static_cast<std::size_t>(m)] != 0)
      throw RangeError("add_one overflows the truncation at length " + std::to_string(m));
  };

  for (;;) {
    overflow();
    bool changed = false;
    // 2 S_p = S_{p+1} exactly when Q(p+1) = p.
    for (int p = 0; p < m && !changed; ++p) {
      if (d[static_cast<std::size_t>(p)] < 2) continue;
      if (kd.Q(p + 1) != p) throw Error("carry rewriting reached a doubled digit at index " + std::to_string(p));
      d[static_cast<std::size_t>(p)] -= 2;
      d[static_cast<std::size_t>(p) + 1] += 1;
      changed = true;
    }
    if (changed) continue;
    for (int i = 0; i < m && !changed; ++i) {
      if (d[static_cast<std::size_t>(i)] == 0) continue;
      const int q = kd.Q(i + 1);
      int first = -1, count = 0;
      for (int j = q; j < i; ++j)
        if (d[static_cast<std::size_t>(j)]) {
          if (first < 0) first = j;
          ++count;
        }
      if (count == 0) continue;
      if (first != q || count != 1)
        throw Error("carry rewriting met a violation it cannot normalize at index " + std::to_string(i));
      // S_i + S_{Q(i+1)} = S_{i+1}.
      d[static_cast<std::size_t>(i)] = 0;
      d[static_cast<std::size_t>(q)] = 0;
      d[static_cast<std::size_t>(i) + 1] += 1;
      changed = true;
    }
    if (!changed) break;
  }
  std::vector<std::uint8_t> bits(d.begin(), d.begin() + m);
  return EnumSequence(e.kneading_ptr(), std::move(bits));
}

EnumSequence add_one_by_codec(const EnumSequence& e) {
  BigInt n = decode(e) + 1;
  if (n >= e.kneading().S(e.length()))
    throw RangeError("add_one overflows the truncation at length " + std::to_string(e.length()));
  auto full = encode(n, e.kneading_ptr());
  std::vector<std::uint8_t> bits(full.bits().begin(), full.bits().begin() + e.length());
  return EnumSequence(e.kneading_ptr(), std::move(bits));
}

EnumSequence parse_enum_sequence(const std::string& text, std::shared_ptr<const KneadingData> kd) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos) throw InputError("expected 'name:0101...', got '" + text + "'");
  if (text.substr(0, colon) != kd->name())
    throw InputError("sequence refers to '" + text.substr(0, colon) + "' but the kneading data is '" + kd->name() +
                     "'");
  std::vector<std::uint8_t> bits;
  for (char c : text.substr(colon + 1)) {
    if (c != '0' && c != '1') throw InputError("enumeration digits must be 0 or 1 in '" + text + "'");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  EnumSequence e(std::move(kd), std::move(bits));
  if (!e.is_admissible()) throw InputError("inadmissible sequence '" + text + "'");
  return e;
}

Projection project(const EnumSequence& e, const FpTable& table, int trunc, std::optional<DecayModel> decay) {
  if (trunc < 0 || trunc > e.length()) throw RangeError("truncation exceeds the sequence length");
  if (static_cast<std::size_t>(trunc) > table.values.size()) throw RangeError("fp table shorter than truncation");
  long double sum = 0;
  for (int k = 0; k < trunc; ++k)
    if (e[k]) sum += table.values[static_cast<std::size_t>(k)];
  Projection p;
  sum -= std::floor(sum);
  p.point = static_cast<double>(sum);
  if (p.point >= 1.0) p.point = 0.0;
  if (decay) {
    if (!(decay->r >= 0 && decay->r < 1)) throw InputError("decay ratio must lie in [0,1)");
    p.tail_bound = decay->C * std::pow(decay->r, trunc) / (1 - decay->r);
  }
  return p;
}

double circle_distance(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1 - d);
}

}  // namespace lyk
