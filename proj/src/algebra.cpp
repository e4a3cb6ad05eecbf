#include "lyk/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lyk/errors.hpp"

namespace lyk {

namespace {

using cld = std::complex<long double>;
constexpr long double kEps = std::numeric_limits<long double>::epsilon();

int descartes_positive(const IntPoly& p) {
  int changes = 0;
  int last = 0;
  for (const auto& a : p.coeffs()) {
    int s = a > 0 ? 1 : (a < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// Cauchy bound: every root has modulus < 1 + max |a_i / a_n|.
long double cauchy_bound(const IntPoly& p) {
  long double lead = std::fabs(p.leading().convert_to<long double>());
  long double m = 0;
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, std::fabs(p.coeff(i).convert_to<long double>()) / lead);
  return 1 + m;
}

void require_single_positive_root(const IntPoly& p) {
  if (p.degree() < 1) throw InputError("polynomial must have degree >= 1");
  if (descartes_positive(p) != 1)
    throw InputError("polynomial " + p.to_string() + " must have exactly one positive root");
}

Real eval(const IntPoly& p, const Real& x) {
  Real acc(x.bits());
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
    acc *= x;
    acc += to_real(*it, x.bits());
  }
  return acc;
}

int euler_phi(int m) {
  int result = m;
  for (int q = 2; q * q <= m; ++q) {
    if (m % q != 0) continue;
    while (m % q == 0) m /= q;
    result -= result / q;
  }
  if (m > 1) result -= result / m;
  return result;
}

}  // namespace

Enclosure leading_root(int d, long double tol) {
  if (d < 2) throw InputError("leading_root needs d >= 2");
  return leading_root(cutting_time_polynomial(d), tol);
}

Enclosure leading_root(const IntPoly& p, long double tol) {
  if (!(tol > 0)) throw InputError("tolerance must be positive");
  require_single_positive_root(p);
  Enclosure e{0, cauchy_bound(p)};
  const int sign_hi = p.eval(e.hi) > 0 ? 1 : -1;
  while (e.width() > tol) {
    long double m = e.mid();
    if (m <= e.lo || m >= e.hi) break;
    long double v = p.eval(m);
    if ((v > 0 ? 1 : -1) == sign_hi)
      e.hi = m;
    else
      e.lo = m;
  }
  return e;
}

Real leading_root_high(const IntPoly& p, long bits) {
  require_single_positive_root(p);
  Real lo(0L, bits);
  Real hi(static_cast<double>(std::ceil(cauchy_bound(p))), bits);
  const int sign_hi = eval(p, hi).sign();
  for (long it = 0; it < bits + 64; ++it) {
    Real m = mul_2si(lo + hi, -1);
    if (m == lo || m == hi) break;
    if (eval(p, m).sign() == sign_hi)
      hi = m;
    else
      lo = m;
  }
  return mul_2si(lo + hi, -1);
}

long double RootDisc::modulus_lo() const { return std::max(0.0L, std::abs(center) - radius); }
long double RootDisc::modulus_hi() const { return std::abs(center) + radius; }

std::vector<RootDisc> isolate_roots(const IntPoly& p) {
  const int n = p.degree();
  if (n < 1) throw InputError("polynomial must have degree >= 1");
  const IntPoly dp = p.derivative();
  const long double lead = p.leading().convert_to<long double>();

  // Aberth-Ehrlich iteration from points spread on a circle.
  std::vector<cld> z(static_cast<std::size_t>(n));
  const long double r0 = cauchy_bound(p) / 2;
  for (int i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] = std::polar(r0, 2 * std::numbers::pi_v<long double> * (i + 0.25L) / n);
  for (int iter = 0; iter < 1000; ++iter) {
    long double worst = 0;
    for (int i = 0; i < n; ++i) {
      cld& zi = z[static_cast<std::size_t>(i)];
      cld pv = p.eval(zi);
      if (pv == cld(0)) continue;
      cld ratio = pv / dp.eval(zi);
      cld s = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0L / (zi - z[static_cast<std::size_t>(j)]);
      cld w = ratio / (1.0L - ratio * s);
      zi -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0L, std::abs(zi)));
    }
    if (worst < 16 * kEps) break;
  }

  // Weierstrass inclusion: the discs D(z_i, n |p(z_i)| / |a_n prod_{j != i}(z_i - z_j)|)
  // contain all roots, and a connected component of k discs contains k roots.
  std::vector<RootDisc> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const cld zi = z[static_cast<std::size_t>(i)];
    long double pv = std::abs(p.eval(zi)) + 4 * (n + 1) * kEps * p.abs_eval(std::abs(zi));
    cld prod = lead;
    for (int j = 0; j < n; ++j)
      if (j != i) prod *= zi - z[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = RootDisc{zi, n * pv / std::abs(prod)};
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto& a = out[static_cast<std::size_t>(i)];
      const auto& b = out[static_cast<std::size_t>(j)];
      if (std::abs(a.center - b.center) <= a.radius + b.radius)
        throw PrecisionError("root inclusion discs overlap for " + p.to_string());
    }
  return out;
}

PisotReport is_pisot_driven(const IntPoly& p, long double margin) {
  auto discs = isolate_roots(p);
  std::sort(discs.begin(), discs.end(),
            [](const RootDisc& a, const RootDisc& b) { return std::abs(a.center) > std::abs(b.center); });
  PisotReport rep;
  rep.leading = discs.front();
  rep.others.assign(discs.begin() + 1, discs.end());
  const auto& L = rep.leading;
  if (std::fabs(L.center.imag()) > L.radius || L.center.real() - L.radius <= 1)
    throw InputError(p.to_string() + " has no real leading root > 1");
  if (!rep.others.empty() && rep.others.front().modulus_hi() >= L.modulus_lo())
    throw PrecisionError("leading root of " + p.to_string() + " is not separated in modulus");

  bool all_inside = true;
  for (const auto& d : rep.others) {
    if (d.modulus_lo() <= 1 && d.modulus_hi() >= 1) ++rep.unit_modulus_roots;
    if (d.modulus_hi() < 1 - margin) continue;
    all_inside = false;
    if (d.modulus_lo() < 1 - margin)
      throw PrecisionError("root modulus enclosure straddles 1 - margin for " + p.to_string());
  }
  rep.pisot = all_inside;

  // Cyclotomic factors account for roots on the unit circle.
  rep.cofactor = p;
  const int deg = p.degree();
  for (int m = 1; m <= 2 * deg * deg + 2; ++m) {
    if (euler_phi(m) > rep.cofactor.degree()) continue;
    IntPoly phi = cyclotomic(m);
    while (rep.cofactor.degree() >= phi.degree() && rep.cofactor.divisible_by(phi)) {
      rep.cofactor = rep.cofactor.divmod_monic(phi).first;
      rep.cyclotomic_factors.push_back(phi);
    }
  }

  std::ostringstream os;
  if (rep.cyclotomic_factors.empty()) {
    os << p.to_string() << " has no cyclotomic factor";
  } else {
    os << p.to_string() << " = ";
    for (const auto& f : rep.cyclotomic_factors) os << "(" << f.to_string() << ")";
    os << "(" << rep.cofactor.to_string() << "); " << rep.unit_modulus_roots
       << " roots of modulus 1 come from the cyclotomic factors; the leading root is a root of "
       << rep.cofactor.to_string();
    if (is_pisot_driven(rep.cofactor, margin).pisot) os << ", whose other roots lie inside the unit disk";
  }
  rep.note = os.str();
  return rep;
}

double fp(double x) { return x - std::floor(x + 0.5); }

Real fp(const Real& x) {
  Real half(0.5, x.bits());
  return x - floor(x + half);
}

Real to_real(const BigInt& n, long bits) {
  Real r(bits);
  mpfr_set_str(r.get(), n.str().c_str(), 10, MPFR_RNDN);
  return r;
}

RhoSource rho_from_polynomial(IntPoly p) {
  require_single_positive_root(p);
  return [p = std::move(p)](long bits) { return leading_root_high(p, bits); };
}

RhoSource rho_from_decimal(std::string text) {
  Real::parse(text, 53);
  return [text = std::move(text)](long bits) { return Real::parse(text, bits); };
}

FpTable fp_table(const KneadingData& kd, const RhoSource& rho, int k_max) {
  if (k_max < 0 || k_max > kd.depth())
    throw RangeError("fp table up to k=" + std::to_string(k_max) + " needs kneading depth >= k_max");
  FpTable t;
  t.bits = 2 * static_cast<long>(boost::multiprecision::msb(kd.S(k_max)) + 1) + 64;
  const Real r1 = rho(t.bits);
  const Real r2 = rho(2 * t.bits);
  if (!r1.is_finite() || !r2.is_finite()) throw InputError("rho is not finite");
  t.values.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    double v1 = fp(r1 * to_real(kd.S(k), t.bits)).to_double();
    double v2 = fp(r2 * to_real(kd.S(k), 2 * t.bits)).to_double();
    if (std::fabs(v1 - v2) > std::ldexp(std::fabs(v2), -20)) {
      std::ostringstream os;
      os << "fp(rho S_" << k << ") unstable between " << t.bits << " and " << 2 * t.bits << " bits (" << v1
         << " vs " << v2 << "); rho needs more precision";
      throw PrecisionError(os.str());
    }
    t.values.push_back(v2);
  }
  return t;
}

const char* to_string(DecayVerdict v) {
  switch (v) {
    case DecayVerdict::summable_looking:
      return "summable-looking";
    case DecayVerdict::not_summable_looking:
      return "not-summable-looking";
    default:
      return "inconclusive";
  }
}

DecayReport decay_diagnostics(const KneadingData& kd, const RhoSource& rho, int B, int k_max, int test_lo,
                              int test_hi) {
  if (B < 0) throw InputError("B must be >= 0");
  if (k_max < 4) throw InputError("k_max must be >= 4");
  if (test_lo < 0 || test_hi < test_lo || test_hi > k_max)
    throw InputError("test window must satisfy 0 <= test_lo <= test_hi <= k_max");
  const FpTable table = fp_table(kd, rho, k_max);

  // suffix[i] = max_{i <= j <= k_max} |fp(rho S_j)|
  std::vector<double> suffix(static_cast<std::size_t>(k_max) + 2, 0.0);
  for (int i = k_max; i >= 0; --i)
    suffix[static_cast<std::size_t>(i)] =
        std::max(suffix[static_cast<std::size_t>(i) + 1], std::fabs(table.values[static_cast<std::size_t>(i)]));

  DecayReport rep;
  rep.bits = table.bits;
  rep.test_lo = test_lo;
  rep.test_hi = test_hi;
  double sum = 0;
  for (int k = 0; k <= k_max; ++k) {
    DecayRow row;
    row.k = k;
    row.window_max = suffix[static_cast<std::size_t>(std::max(0, k - B))];
    row.term = k * row.window_max;
    sum += row.term;
    row.partial_sum = sum;
    rep.rows.push_back(row);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int k = std::max(1, k_max / 2); k <= k_max; ++k) {
    double t = rep.rows[static_cast<std::size_t>(k)].term;
    if (!(t > 0)) continue;
    double y = std::log(t);
    sx += k;
    sy += y;
    sxx += double(k) * k;
    sxy += k * y;
    ++cnt;
  }
  if (cnt < 2) throw PrecisionError("too few nonzero terms to fit a decay rate");
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double icept = (sy - slope * sx) / cnt;
  double rss = 0;
  for (int k = std::max(1, k_max / 2); k <= k_max; ++k) {
    double t = rep.rows[static_cast<std::size_t>(k)].term;
    if (!(t > 0)) continue;
    double e = std::log(t) - (icept + slope * k);
    rss += e * e;
  }
  rep.rate = std::exp(slope);
  rep.fit_rms = std::sqrt(rss / cnt);

  rep.test_window_min = std::numeric_limits<double>::infinity();
  for (int k = test_lo; k <= test_hi; ++k)
    rep.test_window_min = std::min(rep.test_window_min, rep.rows[static_cast<std::size_t>(k)].window_max);

  if (rep.rate <= 0.95)
    rep.verdict = DecayVerdict::summable_looking;
  else if (rep.test_window_min >= 0.02)
    rep.verdict = DecayVerdict::not_summable_looking;
  else
    rep.verdict = DecayVerdict::inconclusive;
  return rep;
}

}  // namespace lyk
