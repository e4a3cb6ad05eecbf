#include "lyk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "lyk/errors.hpp"

namespace lyk {

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InputError("map parameter '" + key + "' is not a number: '" + v + "'");
  }
}

// |x - y| <= t
bool within(const Real& x, const Real& y, const Real& t) { return abs(x - y) <= t; }

}  // namespace

// ---------------------------------------------------------------- UnimodalMap

UnimodalMap::UnimodalMap(Family family, Real a, double ell) : family_(family), a_(std::move(a)), ell_(ell) {
  if (!a_.is_finite() || a_.sign() <= 0) throw InputError("map parameter a must be positive, got " + a_.to_string(20));
  if (a_.bits() < 53) throw InputError("map precision must be at least 53 bits");
  if (family_ == Family::logistic) {
    if (ell_ != 2) throw InputError("logistic family has critical order ell = 2");
    if (a_ > Real(4L, a_.bits())) throw InputError("logistic parameter must satisfy 0 < a <= 4");
  } else {
    if (!(ell_ >= 1)) throw InputError("critical order ell must be >= 1");
    if (a_ > Real(2L, a_.bits())) throw InputError("symmetric parameter must satisfy 0 < a <= 2");
  }
  a_d_ = a_.to_double();
  a_q_ = strtoflt128(a_.to_string(40).c_str(), nullptr);
}

UnimodalMap UnimodalMap::parse(const std::string& spec, long default_bits) {
  std::map<std::string, std::string> kv;
  std::istringstream is(spec);
  std::string tok;
  while (is >> tok) {
    auto pos = tok.find_first_of(":=");
    if (pos == std::string::npos) {
      kv["family"] = tok;
      continue;
    }
    kv[tok.substr(0, pos)] = trim(tok.substr(pos + 1));
  }
  for (const auto& [k, v] : kv)
    if (k != "family" && k != "a" && k != "ell" && k != "bits")
      throw InputError("unknown map key '" + k + "' (expected family, a, ell, bits)");
  if (!kv.count("family")) throw InputError("map spec needs a family (logistic or symmetric)");
  if (!kv.count("a")) throw InputError("map spec needs a parameter a");
  long bits = default_bits;
  if (kv.count("bits")) {
    double b = parse_double("bits", kv["bits"]);
    if (b < 53 || b > 1 << 20 || b != std::floor(b)) throw InputError("map parameter 'bits' must be an integer >= 53");
    bits = static_cast<long>(b);
  }
  double ell = kv.count("ell") ? parse_double("ell", kv["ell"]) : 2.0;
  Real a = Real::parse(kv["a"], bits);
  if (kv["family"] == "logistic") return UnimodalMap(Family::logistic, a, ell);
  if (kv["family"] == "symmetric") return UnimodalMap(Family::symmetric, a, ell);
  throw InputError("unknown map family '" + kv["family"] + "' (expected logistic or symmetric)");
}

std::string UnimodalMap::to_spec() const {
  std::ostringstream os;
  os << "family:" << (family_ == Family::logistic ? "logistic" : "symmetric") << " a:" << a_.to_string()
     << " ell:" << ell_ << " bits:" << bits();
  return os.str();
}

Real UnimodalMap::critical() const {
  return family_ == Family::logistic ? Real(0.5, bits()) : Real(0L, bits());
}
Real UnimodalMap::lo() const { return family_ == Family::logistic ? Real(0L, bits()) : Real(-1L, bits()); }
Real UnimodalMap::hi() const { return Real(1L, bits()); }

Real UnimodalMap::operator()(const Real& x) const {
  const Real one(1L, bits());
  if (family_ == Family::logistic) return a_ * x * (one - x);
  return one - a_ * pow(abs(x), ell_);
}

double UnimodalMap::operator()(double x) const {
  if (family_ == Family::logistic) return a_d_ * x * (1 - x);
  double ax = std::fabs(x);
  return 1 - a_d_ * (ell_ == 2 ? ax * ax : std::pow(ax, ell_));
}

__float128 UnimodalMap::operator()(__float128 x) const {
  if (family_ == Family::logistic) return a_q_ * x * (1 - x);
  __float128 ax = fabsq(x);
  return 1 - a_q_ * (ell_ == 2 ? ax * ax : powq(ax, static_cast<__float128>(ell_)));
}

Real UnimodalMap::derivative(const Real& x) const {
  const Real one(1L, bits());
  if (family_ == Family::logistic) return a_ * (one - mul_2si(x, 1));
  // d/dx (1 - a|x|^ell) = -a ell |x|^(ell-1) sgn(x)
  Real mag = a_ * Real(ell_, bits()) * pow(abs(x), ell_ - 1);
  return x.sign() >= 0 ? -mag : mag;
}

double UnimodalMap::derivative(double x) const {
  if (family_ == Family::logistic) return a_d_ * (1 - 2 * x);
  double mag = a_d_ * ell_ * std::pow(std::fabs(x), ell_ - 1);
  return x >= 0 ? -mag : mag;
}

Real UnimodalMap::tolerance() const { return mul_2si(Real(1L, bits()), -bits() / 4); }

int UnimodalMap::side(const Real& x) const {
  Real d = x - critical();
  if (abs(d) <= tolerance()) return 0;
  return d.sign();
}

// ---------------------------------------------------------------- orbits

Orbit iterate(const UnimodalMap& f, const Real& x, long n, long stride) {
  if (n < 0 || stride < 1) throw InputError("orbit length must be >= 0 and stride >= 1");
  const Real lo = f.lo(), hi = f.hi();
  // One ulp of slack at the interval ends.
  const Real slack = mul_2si(Real(1L, f.bits()), -(f.bits() - 1));
  Orbit o;
  o.x0 = x.with_bits(f.bits());
  o.length = n;
  o.stride = stride;
  Real cur = o.x0;
  for (long j = 0; j < n; ++j) {
    if (cur < lo - slack || cur > hi + slack)
      throw RangeError("orbit left the interval at iterate " + std::to_string(j) + ": " + cur.to_string(20));
    if (cur < lo) cur = lo;
    if (cur > hi) cur = hi;
    if (j % stride == 0) o.points.push_back(cur);
    cur = f(cur);
  }
  return o;
}

std::vector<std::uint8_t> itinerary(const UnimodalMap& f, const Real& x, std::size_t n) {
  std::vector<std::uint8_t> out;
  out.reserve(n);
  Real cur = x.with_bits(f.bits());
  const Real c = f.critical();
  const Real tol = f.tolerance();
  for (std::size_t i = 0; i < n; ++i) {
    cur = f(cur);
    Real d = cur - c;
    if (abs(d) <= tol)
      out.push_back(2);
    else
      out.push_back(d.sign() > 0 ? 1 : 0);
  }
  return out;
}

int compare_itineraries(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  auto rank = [](std::uint8_t s) { return s == 0 ? 0 : (s == 2 ? 1 : 2); };
  int rs = 0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) {
      int cmp = rank(a[i]) < rank(b[i]) ? -1 : 1;
      return rs % 2 == 0 ? cmp : -cmp;
    }
    if (a[i] == 2) return 0;
    if (a[i] == 1) ++rs;
  }
  return 0;
}

// ---------------------------------------------------------------- critical orbit

CriticalScan scan_critical_orbit(const UnimodalMap& f, long n_max) {
  if (n_max < 1) throw InputError("level count must be >= 1");
  const Real c = f.critical();
  const Real tol = f.tolerance();
  CriticalScan s;
  s.orbit.reserve(static_cast<std::size_t>(n_max) + 1);
  s.orbit.push_back(c);
  s.boundary_image = f(f.lo());
  s.beta.assign(static_cast<std::size_t>(n_max) + 1, 0);
  s.cutting.assign(static_cast<std::size_t>(n_max) + 1, false);
  s.cutting[1] = true;
  s.cutting_times.push_back(1);
  s.orbit.push_back(f(c));
  for (long n = 2; n <= n_max; ++n) {
    s.orbit.push_back(f(s.orbit.back()));
    const Real& cn = s.orbit[static_cast<std::size_t>(n)];
    const Real& prev = s.orbit[static_cast<std::size_t>(n) - 1];
    if (within(cn, prev, tol))
      throw DegenerateError("critical orbit lands on (or converges to) a fixed point at n=" + std::to_string(n - 1) + " (c_" +
                            std::to_string(n - 1) + " = " + prev.to_string(20) + ")");
    // Convergence to a short cycle means the kneading map is finite.
    const double cd = cn.to_double();
    for (long p = 2; p <= 64 && p < n; ++p) {
      const Real& back = s.orbit[static_cast<std::size_t>(n - p)];
      if (std::fabs(cd - back.to_double()) < 1e-12 && within(cn, back, tol))
        throw RangeError("critical orbit converges to a cycle of period " + std::to_string(p) +
                         "; the kneading map is finite (" + std::to_string(s.cutting_times.size()) +
                         " cutting times found)");
    }
    const long b = s.cutting[static_cast<std::size_t>(n) - 1] ? 1 : s.beta[static_cast<std::size_t>(n) - 1] + 1;
    s.beta[static_cast<std::size_t>(n)] = b;
    const Real& cb = s.orbit[static_cast<std::size_t>(b)];
    Real d1 = cn - c, d2 = cb - c;
    if (abs(d1) <= tol || abs(d2) <= tol)
      throw PrecisionError("critical point within tolerance of an endpoint of D_" + std::to_string(n) +
                           "; increase bits (currently " + std::to_string(f.bits()) + ")");
    if (d1.sign() != d2.sign()) {
      s.cutting[static_cast<std::size_t>(n)] = true;
      s.cutting_times.push_back(n);
    }
  }
  return s;
}

EmpiricalKneading empirical_cutting_times(const UnimodalMap& f, int k_max, long n_limit) {
  if (k_max < 0) throw InputError("k_max must be >= 0");
  long n = 64;
  for (;;) {
    n = std::min(n, n_limit);
    CriticalScan scan = scan_critical_orbit(f, n);
    if (static_cast<int>(scan.cutting_times.size()) > k_max) {
      std::vector<BigInt> s;
      for (int k = 0; k <= k_max; ++k) s.emplace_back(scan.cutting_times[static_cast<std::size_t>(k)]);
      return EmpiricalKneading{KneadingData::from_cutting_times(std::move(s), "empirical"), std::move(scan)};
    }
    if (n >= n_limit)
      throw RangeError("only " + std::to_string(scan.cutting_times.size()) + " cutting times within " +
                       std::to_string(n_limit) + " iterates; need " + std::to_string(k_max + 1));
    n *= 2;
  }
}

// ---------------------------------------------------------------- tuning

TuneResult tune_parameter(Family family, double ell, const KneadingData& target, int depth, long bits) {
  if (depth < 1) throw InputError("tuning depth must be >= 1");
  const KneadingData kd = target.depth() >= depth + 1 ? target : target.extended(depth + 1);
  const long L = kd.S(depth + 1).convert_to<long>();
  const auto want = kneading_sequence(kd, static_cast<std::size_t>(L));

  Real lo = family == Family::logistic ? Real(2.5, bits) : Real(0.5, bits);
  Real hi = family == Family::logistic ? Real(4L, bits) : Real(2L, bits);
  auto cmp_at = [&](const Real& a) {
    UnimodalMap f(family, a, ell);
    return compare_itineraries(itinerary(f, f.critical(), static_cast<std::size_t>(L)), want);
  };
  if (cmp_at(lo) >= 0 || cmp_at(hi) <= 0)
    throw HypothesisError("target kneading '" + target.name() + "' is not realized within the family's range");

  TuneResult res;
  res.prefix_length = L;
  for (int step = 1; step <= bits + 16; ++step) {
    Real mid = mul_2si(lo + hi, -1);
    if (mid == lo || mid == hi) break;
    UnimodalMap f(family, mid, ell);
    auto it = itinerary(f, f.critical(), static_cast<std::size_t>(L));
    int c = compare_itineraries(it, want);
    if (c == 0) {
      auto emp = empirical_cutting_times(f, depth);
      for (int k = 0; k <= depth; ++k)
        if (emp.kneading.S(k) != kd.S(k))
          throw PrecisionError("itinerary matches but cutting time S_" + std::to_string(k) +
                               " differs; increase bits");
      // Re-check the bracket at doubled precision.
      UnimodalMap flo(family, lo.with_bits(2 * bits), ell), fhi(family, hi.with_bits(2 * bits), ell);
      if (compare_itineraries(itinerary(flo, flo.critical(), static_cast<std::size_t>(L)), want) > 0 ||
          compare_itineraries(itinerary(fhi, fhi.critical(), static_cast<std::size_t>(L)), want) < 0)
        throw PrecisionError("itinerary order is not monotone along the bracket; increase bits");
      res.lo = lo;
      res.hi = hi;
      res.mid = mid;
      res.steps = step;
      res.verified = emp.kneading;
      return res;
    }
    if (c < 0)
      lo = mid;
    else
      hi = mid;
  }
  throw PrecisionError("bisection bracket collapsed at " + std::to_string(bits) +
                       " bits before realizing the target prefix");
}

// ---------------------------------------------------------------- attractors

const char* to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::periodic:
      return "periodic";
    case AttractorKind::interval_cycle:
      return "interval-cycle";
    case AttractorKind::solenoidal:
      return "solenoidal";
    default:
      return "undetermined";
  }
}

std::string AttractorLabel::describe() const {
  if (kind == AttractorKind::undetermined) return "undetermined";
  return std::string(to_string(kind)) + "(" + std::to_string(period) + ")";
}

namespace {

// Number of k with k = Q(k+1) <= Q(k+j) for all j up to the depth.
int renormalization_witnesses(const UnimodalMap& f, int depth) {
  try {
    auto emp = empirical_cutting_times(f, depth, 1L << 16);
    int count = 0;
    for (int k = 1; k + 1 <= depth; ++k) {
      if (emp.kneading.Q(k + 1) != k) continue;
      bool ok = true;
      for (int j = 2; k + j <= depth; ++j) ok = ok && emp.kneading.Q(k + j) >= k;
      if (ok) ++count;
    }
    return count;
  } catch (const Error&) {
    return 0;
  }
}

std::optional<int> interval_cycle(const UnimodalMap& f, const std::vector<double>& pts, int bins, int p_max) {
  const double lo = f.lo_d(), w = f.diameter() / bins;
  std::vector<int> hist(static_cast<std::size_t>(bins), 0);
  for (double x : pts) {
    int b = std::clamp(static_cast<int>((x - lo) / w), 0, bins - 1);
    ++hist[static_cast<std::size_t>(b)];
  }
  // Components: runs of occupied bins, bridging single empty bins.
  std::vector<std::pair<int, int>> comps;
  for (int b = 0; b < bins;) {
    if (!hist[static_cast<std::size_t>(b)]) {
      ++b;
      continue;
    }
    int e = b;
    while (e + 1 < bins && (hist[static_cast<std::size_t>(e) + 1] ||
                            (e + 2 < bins && hist[static_cast<std::size_t>(e) + 2])))
      ++e;
    comps.push_back({b, e});
    b = e + 1;
  }
  if (comps.empty() || static_cast<int>(comps.size()) > p_max) return std::nullopt;
  int occupied = 0, span = 0;
  for (auto [b, e] : comps) {
    span += e - b + 1;
    for (int i = b; i <= e; ++i) occupied += hist[static_cast<std::size_t>(i)] > 0;
  }
  // Point-like clusters are cycles, not intervals.
  if (span < 4 * static_cast<int>(comps.size()) || occupied < 0.9 * span) return std::nullopt;
  auto in_union = [&](double y) {
    int b = std::clamp(static_cast<int>((y - lo) / w), 0, bins - 1);
    for (auto [s, e] : comps)
      if (b >= s - 1 && b <= e + 1) return true;
    return false;
  };
  for (auto [b, e] : comps)
    for (int i = b; i <= e; ++i)
      if (!in_union(f(lo + (i + 0.5) * w))) return std::nullopt;
  return static_cast<int>(comps.size());
}

}  // namespace

AttractorReport detect_attractor(const UnimodalMap& f, int sample_count, long transient, long horizon,
                                 const AttractorOptions& opt) {
  if (sample_count < 1 || transient < 0 || horizon < 2 * opt.p_max)
    throw InputError("detect_attractor needs samples >= 1, transient >= 0, horizon >= 2 p_max");
  const int witnesses = renormalization_witnesses(f, opt.cascade_depth);
  AttractorReport rep;
  for (int i = 0; i < sample_count; ++i) {
    std::seed_seq seq{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    double x = f.lo_d() + f.diameter() * uniform53(rng());
    for (long j = 0; j < transient; ++j) x = f(x);
    std::vector<double> pts(static_cast<std::size_t>(horizon));
    for (auto& p : pts) {
      p = x;
      x = f(x);
    }
    AttractorLabel lab;
    const long tail = std::min<long>(horizon, 8L * opt.p_max);
    for (int p = 1; p <= opt.p_max && lab.kind == AttractorKind::undetermined; ++p) {
      double worst = 0;
      for (long n = horizon - tail; n + p < horizon; ++n)
        worst = std::max(worst, std::fabs(pts[static_cast<std::size_t>(n + p)] - pts[static_cast<std::size_t>(n)]));
      if (worst < opt.eps) lab = {AttractorKind::periodic, p};
    }
    if (lab.kind == AttractorKind::undetermined && witnesses >= 3) lab = {AttractorKind::solenoidal, witnesses};
    if (lab.kind == AttractorKind::undetermined) {
      if (auto r = interval_cycle(f, pts, opt.bins, opt.p_max)) lab = {AttractorKind::interval_cycle, *r};
    }
    rep.samples.push_back(lab);
  }
  std::map<std::string, std::pair<int, AttractorLabel>> tally;
  for (const auto& l : rep.samples) {
    auto& slot = tally[l.describe()];
    slot.first++;
    slot.second = l;
  }
  for (const auto& [name, entry] : tally)
    if (entry.first > rep.majority_count) {
      rep.majority_count = entry.first;
      rep.majority = entry.second;
    }
  rep.note = "heuristic: finite-window labels at 53 bits, not a proof of attractor type";
  return rep;
}

}  // namespace lyk
