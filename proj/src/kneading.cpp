#include "lyk/kneading.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "lyk/errors.hpp"

namespace lyk {

// ---------------------------------------------------------------- QRule

QRule QRule::fibonacci_like(int d) {
  if (d < 1) throw InputError("kneading rule max{k-d,0} needs d >= 1, got d=" + std::to_string(d));
  QRule r;
  r.tail_ = d;
  if (d == 1)
    r.name_ = "feigenbaum";
  else if (d == 2)
    r.name_ = "fib";
  else
    r.name_ = "d=" + std::to_string(d);
  return r;
}

QRule QRule::tabulated(std::vector<int> values, std::optional<int> tail_d, std::string name) {
  if (tail_d && *tail_d < 1) throw InputError("kneading tail offset must be >= 1");
  QRule r;
  r.table_ = std::move(values);
  r.tail_ = tail_d;
  r.name_ = name.empty() ? "tabulated" : std::move(name);
  return r;
}

QRule QRule::doubled_example() {
  // Differences of 1,2,3,4,6,8,10,12 are S_0,S_0,S_0,S_1,S_1,S_1,S_1.
  return tabulated({0, 0, 0, 1, 1, 1, 1}, 5, "doubled");
}

QRule QRule::parse(std::string_view spec) {
  std::string s(spec);
  if (s == "fib" || s == "fibonacci") return fibonacci_like(2);
  if (s == "feigenbaum") return feigenbaum();
  if (s == "doubled") return doubled_example();
  std::string digits;
  if (s.rfind("d=", 0) == 0)
    digits = s.substr(2);
  else if (s.rfind("max-k-", 0) == 0)
    digits = s.substr(6);
  if (!digits.empty()) {
    int d = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return fibonacci_like(d);
  }
  throw InputError("unknown kneading rule '" + s + "' (expected fib, feigenbaum, doubled, d=<n>)");
}

bool QRule::defined_at(int k) const {
  if (k < 1) return false;
  return static_cast<std::size_t>(k) <= table_.size() || tail_.has_value();
}

int QRule::operator()(int k) const {
  if (!defined_at(k)) throw RangeError("kneading map undefined at k=" + std::to_string(k));
  int q = static_cast<std::size_t>(k) <= table_.size() ? table_[static_cast<std::size_t>(k) - 1]
                                                        : std::max(k - *tail_, 0);
  if (q < 0 || q >= k)
    throw InputError("kneading map must satisfy 0 <= Q(k) < k; Q(" + std::to_string(k) + ")=" + std::to_string(q));
  return q;
}

// ---------------------------------------------------------------- KneadingData

KneadingData KneadingData::build(const QRule& rule, int k_max) {
  if (k_max < 0) throw InputError("depth must be >= 0");
  KneadingData kd;
  kd.rule_ = rule;
  kd.s_.reserve(static_cast<std::size_t>(k_max) + 1);
  kd.q_.reserve(static_cast<std::size_t>(k_max));
  kd.s_.emplace_back(1);
  for (int k = 1; k <= k_max; ++k) {
    int q = rule(k);
    kd.q_.push_back(q);
    kd.s_.push_back(kd.s_.back() + kd.s_[static_cast<std::size_t>(q)]);
  }
  return kd;
}

KneadingData KneadingData::from_cutting_times(std::vector<BigInt> cutting_times, std::string name) {
  auto q = q_from_cutting_times(cutting_times);
  KneadingData kd;
  kd.rule_ = QRule::tabulated(q, std::nullopt, std::move(name));
  kd.s_ = std::move(cutting_times);
  kd.q_ = std::move(q);
  return kd;
}

const BigInt& KneadingData::S(int k) const {
  if (k < 0 || k > depth())
    throw RangeError("cutting time index " + std::to_string(k) + " outside computed depth " + std::to_string(depth()));
  return s_[static_cast<std::size_t>(k)];
}

int KneadingData::Q(int k) const {
  if (k < 1 || k > depth())
    throw RangeError("kneading map index " + std::to_string(k) + " outside 1.." + std::to_string(depth()));
  return q_[static_cast<std::size_t>(k) - 1];
}

BigInt KneadingData::beta(const BigInt& n) const {
  if (n < 2) throw RangeError("beta is defined for n >= 2");
  if (depth() < 0 || n > s_.back())
    throw RangeError("beta(" + n.str() + ") needs cutting times beyond the computed depth");
  // Largest S_k < n.
  auto it = std::lower_bound(s_.begin(), s_.end(), n);
  return n - *std::prev(it);
}

std::optional<int> KneadingData::index_of(const BigInt& n) const {
  auto it = std::lower_bound(s_.begin(), s_.end(), n);
  if (it == s_.end() || *it != n) return std::nullopt;
  return static_cast<int>(it - s_.begin());
}

int KneadingData::max_gap() const {
  int best = 0;
  for (int k = 1; k <= depth(); ++k) best = std::max(best, k - Q(k));
  return best;
}

std::vector<int> q_from_cutting_times(std::span<const BigInt> s) {
  if (s.empty()) throw InputError("empty cutting-time sequence");
  if (s[0] != 1) throw InputError("cutting times must start with S_0 = 1");
  std::vector<int> q;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] <= s[k - 1]) throw InputError("cutting times not strictly increasing at k=" + std::to_string(k));
    BigInt diff = s[k] - s[k - 1];
    auto first = s.begin();
    auto last = s.begin() + static_cast<std::ptrdiff_t>(k);
    auto it = std::lower_bound(first, last, diff);
    if (it == last || *it != diff)
      throw InputError("inadmissible cutting times: S_" + std::to_string(k) + " - S_" + std::to_string(k - 1) + " = " +
                       diff.str() + " is not a cutting time (k=" + std::to_string(k) + ")");
    q.push_back(static_cast<int>(it - first));
  }
  return q;
}

// ---------------------------------------------------------------- renormalization

std::string RenormalizationVerdict::note() const {
  std::ostringstream os;
  if (renormalizable)
    os << "renormalizable with witness k=" << k << ", period " << period << "; certified only for indices <= "
       << horizon;
  else
    os << "no renormalization witness within horizon " << horizon;
  return os.str();
}

RenormalizationVerdict is_renormalizable(const KneadingData& kd, int horizon) {
  if (horizon < 2) throw InputError("renormalization horizon must be >= 2");
  if (kd.depth() < horizon)
    throw RangeError("kneading data depth " + std::to_string(kd.depth()) + " below horizon " + std::to_string(horizon));
  RenormalizationVerdict v;
  v.horizon = horizon;
  for (int k = 1; k + 1 <= horizon; ++k) {
    if (kd.Q(k + 1) != k) continue;
    bool ok = true;
    for (int j = 2; k + j <= horizon; ++j) {
      if (kd.Q(k + j) < k) {
        ok = false;
        break;
      }
    }
    if (ok) {
      v.renormalizable = true;
      v.k = k;
      v.period = kd.S(k);
      return v;
    }
  }
  return v;
}

// ---------------------------------------------------------------- 6-periodic identities

int six_periodic_correction(int k) {
  switch (((k % 6) + 6) % 6) {
    case 2:
    case 3:
      return 1;
    case 5:
    case 0:
      return -1;
    default:
      return 0;
  }
}

std::vector<RelationRow> check_six_periodic_relation(const KneadingData& kd, int m, int k_lo, int k_hi) {
  if (m < 1) throw InputError("m must be >= 1");
  const int d = 6 * m - 1;
  auto [quot, rem] = cutting_time_polynomial(d).divmod_monic(IntPoly{1, -1, 1});
  if (!rem.is_zero()) throw Error("x^2 - x + 1 does not divide the characteristic polynomial");
  const int deg = quot.degree();
  if (k_lo < deg) throw InputError("relation needs k >= " + std::to_string(deg));
  if (k_hi > kd.depth()) throw RangeError("k range exceeds kneading depth " + std::to_string(kd.depth()));
  std::vector<RelationRow> rows;
  for (int k = k_lo; k <= k_hi; ++k) {
    BigInt rhs = six_periodic_correction(k);
    for (int i = 1; i <= deg; ++i) rhs -= quot.coeff(deg - i) * kd.S(k - i);
    RelationRow row;
    row.k = k;
    row.lhs = kd.S(k);
    row.rhs = rhs;
    row.residual = row.lhs - rhs;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RelationRow> check_relation_5fib(const KneadingData& kd, int k_lo, int k_hi) {
  return check_six_periodic_relation(kd, 1, k_lo, k_hi);
}

// ---------------------------------------------------------------- kneading sequence

std::vector<std::uint8_t> kneading_sequence(const KneadingData& kd, std::size_t length) {
  std::vector<std::uint8_t> nu{1};  // nu_1: c_1 lies right of c.
  nu.reserve(length);
  KneadingData ext = kd;
  for (int k = 1; nu.size() < length; ++k) {
    if (k > ext.depth()) {
      if (!ext.rule().defined_at(k))
        throw RangeError("kneading data too shallow for a sequence of length " + std::to_string(length));
      ext = ext.extended(std::max(k, 2 * ext.depth()));
    }
    const auto block = ext.S(ext.Q(k)).convert_to<std::size_t>();
    for (std::size_t i = 0; i < block && nu.size() < length; ++i) {
      std::uint8_t sym = nu[i];
      if (i + 1 == block) sym = static_cast<std::uint8_t>(1 - sym);
      nu.push_back(sym);
    }
  }
  nu.resize(length);
  return nu;
}

// ---------------------------------------------------------------- text form

std::string to_text(const KneadingData& kd) {
  std::ostringstream os;
  os << "#kneading v1\n";
  for (int k = 0; k <= kd.depth(); ++k) {
    os << k << ' ';
    if (k == 0)
      os << '-';
    else
      os << kd.Q(k);
    os << ' ' << kd.S(k) << '\n';
  }
  return os.str();
}

KneadingData parse_kneading_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) || line.rfind("#kneading v1", 0) != 0)
    throw InputError("kneading text must start with '#kneading v1'");
  std::vector<BigInt> s;
  std::vector<int> q_listed;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int k = -1;
    std::string q_tok, s_tok;
    if (!(ls >> k >> q_tok >> s_tok) || k != static_cast<int>(s.size()))
      throw InputError("malformed kneading line " + std::to_string(lineno) + ": '" + line + "'");
    try {
      s.emplace_back(s_tok);
    } catch (const std::exception&) {
      throw InputError("bad cutting time on line " + std::to_string(lineno));
    }
    if (k > 0) q_listed.push_back(std::atoi(q_tok.c_str()));
  }
  KneadingData kd = KneadingData::from_cutting_times(std::move(s));
  if (kd.q_values() != q_listed) throw InputError("listed Q values disagree with the cutting times");
  return kd;
}

}  // namespace lyk
