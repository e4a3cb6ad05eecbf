#include "lyk/pairlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "lyk/errors.hpp"
#include "lyk/parallel.hpp"

namespace lyk {

namespace {

double circle_dist(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1 - d);
}

template <class T>
T absval(T v) {
  return v < 0 ? -v : v;
}

template <class T>
PairVerdict classify_as(const UnimodalMap& f, T x, T y, const ClassifyParams& p) {
  PairVerdict v;
  v.params = p;
  for (long n = 1; n <= p.burn_in; ++n) {
    x = f(x);
    y = f(y);
  }
  const long tail_from = p.window - (p.window - p.burn_in) / 4;
  double lo = HUGE_VAL, hi = 0, tail = 0;
  for (long n = p.burn_in + 1; n <= p.window; ++n) {
    x = f(x);
    y = f(y);
    const double g = static_cast<double>(absval(x - y));
    lo = std::min(lo, g);
    hi = std::max(hi, g);
    if (n > tail_from) tail = std::max(tail, g);
  }
  v.min_gap = lo;
  v.max_gap = hi;
  v.tail_max = tail;
  if (tail < p.delta_min)
    v.label = PairLabel::asymptotic_like;
  else if (lo > p.delta_min)
    v.label = PairLabel::distal_like;
  else if (hi >= p.eps)
    v.label = PairLabel::ly_like;
  else
    v.label = PairLabel::undecided;
  return v;
}

std::mt19937_64 stream(std::uint64_t seed, long i) {
  const auto u = static_cast<std::uint64_t>(i);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(u >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

const char* to_string(PairLabel l) {
  switch (l) {
    case PairLabel::asymptotic_like:
      return "asymptotic-like";
    case PairLabel::distal_like:
      return "distal-like";
    case PairLabel::ly_like:
      return "ly-like";
    default:
      return "undecided";
  }
}

std::string PairVerdict::describe() const {
  if (label != PairLabel::ly_like) return to_string(label);
  std::ostringstream os;
  os << "ly-like(" << params.eps << ")";
  return os.str();
}

PairVerdict classify_pair(const UnimodalMap& f, double x, double y, const ClassifyParams& p) {
  if (p.burn_in < 0 || p.window <= p.burn_in) throw InputError("classification needs window > burn_in >= 0");
  if (!(p.eps > 0) || !(p.delta_min > 0)) throw InputError("eps and delta_min must be positive");
  if (p.precision == 53) return classify_as<double>(f, x, y, p);
  if (p.precision == 113) return classify_as<__float128>(f, x, y, p);
  throw InputError("pair precision must be 53 or 113 bits");
}

std::pair<double, double> wilson_interval(long k, long n, double z) {
  if (n <= 0) return {0, 1};
  const double nn = static_cast<double>(n), ph = static_cast<double>(k) / nn, z2 = z * z;
  const double centre = (ph + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

double sample_point(const UnimodalMap& f, std::uint64_t seed, long i, int slot) {
  auto rng = stream(seed, i);
  std::uint64_t r = rng();
  for (int s = 0; s < slot; ++s) r = rng();
  return f.lo_d() + uniform53(r) * f.diameter();
}

MeasureEstimate measure_estimate(const UnimodalMap& f, long n_pairs, std::uint64_t seed, const ClassifyParams& p,
                                 int threads) {
  if (n_pairs < 1) throw InputError("n_pairs must be >= 1");
  MeasureEstimate est;
  est.pairs = n_pairs;
  est.seed = seed;
  est.records.resize(static_cast<std::size_t>(n_pairs));
  parallel_for(n_pairs, threads, [&](long i) {
    auto& r = est.records[static_cast<std::size_t>(i)];
    r.index = i;
    r.x = sample_point(f, seed, i, 0);
    r.y = sample_point(f, seed, i, 1);
    r.verdict = classify_pair(f, r.x, r.y, p);
  });
  for (PairLabel l : {PairLabel::asymptotic_like, PairLabel::distal_like, PairLabel::ly_like, PairLabel::undecided}) {
    LabelCount c{l};
    c.count = std::count_if(est.records.begin(), est.records.end(),
                            [&](const PairRecord& r) { return r.verdict.label == l; });
    c.fraction = static_cast<double>(c.count) / static_cast<double>(n_pairs);
    std::tie(c.wilson_lo, c.wilson_hi) = wilson_interval(c.count, n_pairs);
    est.labels.push_back(c);
  }
  return est;
}

// ---------------------------------------------------------------- approximate periodicity

ApproxPeriodicResult approx_periodic_test(const UnimodalMap& f, double x, double eps, int p_max, long window) {
  if (p_max < 1 || window < 1 || !(eps > 0)) throw InputError("approx_periodic_test needs p_max, window >= 1, eps > 0");
  for (long n = 0; n < window; ++n) x = f(x);
  std::vector<double> late(static_cast<std::size_t>(window));
  double y = x;
  for (auto& v : late) {
    v = y;
    y = f(y);
  }
  ApproxPeriodicResult res;
  for (int p = 1; p <= p_max; ++p) {
    double z = late[0];
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      double w = z, d = 1;
      for (int i = 0; i < p; ++i) {
        d *= f.derivative(w);
        w = f(w);
      }
      const double g = w - z, dg = d - 1;
      if (dg == 0 || !std::isfinite(dg)) break;
      double step = g / dg;
      z = std::clamp(z - step, f.lo_d(), f.hi_d());
      if (std::fabs(step) <= 1e-14 * (1 + std::fabs(z))) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      ++res.newton_failures;
      continue;
    }
    PeriodicWitness wit;
    wit.period = p;
    double w = z;
    for (int i = 0; i < p; ++i) {
      wit.cycle.push_back(w);
      w = f(w);
    }
    double sup = 0;
    for (std::size_t i = 0; i < late.size() && sup < eps; ++i)
      sup = std::max(sup, std::fabs(late[i] - wit.cycle[i % static_cast<std::size_t>(p)]));
    if (sup < eps) {
      wit.sup_distance = sup;
      res.witness = std::move(wit);
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------- factor separation

FactorSeparation factor_separation(const PiTildeReport& a, const PiTildeReport& b, double threshold) {
  if (!a.stabilized || !b.stabilized) throw InputError("factor separation needs stabilized pi~ estimates");
  FactorSeparation s;
  s.delta = circle_dist(a.estimate, b.estimate);
  s.margin = threshold + a.residual + b.residual;
  s.certificate = s.delta > s.margin;
  return s;
}

FactorSeparation factor_separation(const TowerTrace& a, const TowerTrace& b, double rho,
                                   const std::vector<long>& n_list, double threshold, double cauchy) {
  return factor_separation(pi_tilde(a, rho, n_list, cauchy), pi_tilde(b, rho, n_list, cauchy), threshold);
}

// ---------------------------------------------------------------- pushforward

namespace {

std::vector<Interval> merged(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

double measure(const std::vector<Interval>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0, [](double s, const Interval& i) { return s + (i.hi - i.lo); });
}

std::vector<Interval> push(const UnimodalMap& f, const std::vector<Interval>& v) {
  const double c = f.critical_d(), top = f(c);
  std::vector<Interval> out;
  out.reserve(v.size() + 1);
  for (const auto& iv : v) {
    const double a = f(iv.lo), b = f(iv.hi);
    if (iv.lo < c && c < iv.hi)
      out.push_back({std::min(a, b), top});
    else
      out.push_back({std::min(a, b), std::max(a, b)});
  }
  return merged(std::move(out));
}

void drop_smallest(std::vector<Interval>& v, std::size_t cap) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a].hi - v[a].lo > v[b].hi - v[b].lo; });
  order.resize(cap);
  std::sort(order.begin(), order.end());
  std::vector<Interval> kept;
  for (auto i : order) kept.push_back(v[i]);
  v = std::move(kept);
}

void fill_smallest_gaps(std::vector<Interval>& v, std::size_t cap) {
  const std::size_t fill = v.size() - cap;
  std::vector<std::size_t> gaps(v.size() - 1);
  std::iota(gaps.begin(), gaps.end(), 0);
  std::stable_sort(gaps.begin(), gaps.end(),
                   [&](std::size_t a, std::size_t b) { return v[a + 1].lo - v[a].hi < v[b + 1].lo - v[b].hi; });
  std::vector<bool> bridged(v.size(), false);
  for (std::size_t i = 0; i < fill; ++i) bridged[gaps[i]] = true;
  std::vector<Interval> out{v[0]};
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (bridged[i - 1])
      out.back().hi = v[i].hi;
    else
      out.push_back(v[i]);
  }
  v = std::move(out);
}

}  // namespace

std::vector<PushforwardRow> limsup_full_estimate(const UnimodalMap& f, const std::vector<Interval>& A, int n_max,
                                                 std::size_t cap) {
  if (n_max < 0 || cap < 1) throw InputError("pushforward needs n_max >= 0 and cap >= 1");
  for (const auto& iv : A)
    if (!(iv.lo <= iv.hi) || iv.lo < f.lo_d() || iv.hi > f.hi_d()) throw InputError("A must consist of intervals inside I");
  std::vector<Interval> lower = merged(A), upper = lower;
  std::vector<PushforwardRow> rows;
  double best = 0;
  for (int n = 0;; ++n) {
    PushforwardRow r;
    r.n = n;
    if (lower.size() > cap) {
      drop_smallest(lower, cap);
      r.capped = true;
    }
    if (upper.size() > cap) {
      fill_smallest_gaps(upper, cap);
      r.capped = true;
    }
    r.lower = measure(lower);
    r.upper = measure(upper);
    r.components = upper.size();
    best = std::max(best, r.lower);
    r.running_max = best;
    rows.push_back(r);
    if (n == n_max) break;
    lower = push(f, lower);
    upper = push(f, upper);
  }
  return rows;
}

}  // namespace lyk
