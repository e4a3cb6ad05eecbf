#include "lyk/tower.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "lyk/errors.hpp"
#include "lyk/parallel.hpp"

namespace lyk {

namespace {

std::size_t idx(long n) { return static_cast<std::size_t>(n); }

double circle_dist(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1 - d);
}

std::map<long, long> last_visits(const TowerTrace& t) {
  std::map<long, long> last;
  for (long j = 1; j <= t.N(); ++j) last[t.level[idx(j)]] = j;
  return last;
}

BValue b_from(const std::map<long, long>& last, long N, long n, double guard) {
  auto it = last.find(n);
  if (it == last.end()) throw RangeError("level " + std::to_string(n) + " was never visited");
  BValue b{it->second, true};
  auto up = std::next(it);
  if (up != last.end()) b.provisional = static_cast<double>(N - b.time) < guard * std::fabs(up->second - b.time);
  return b;
}

}  // namespace

// ---------------------------------------------------------------- levels

TowerLevels::TowerLevels(UnimodalMap map, CriticalScan scan) : map_(std::move(map)), scan_(std::move(scan)) {
  std::vector<BigInt> s(scan_.cutting_times.begin(), scan_.cutting_times.end());
  kneading_ = KneadingData::from_cutting_times(std::move(s), "empirical");
}

TowerLevels build_levels(const UnimodalMap& f, long n_max) { return TowerLevels(f, scan_critical_orbit(f, n_max)); }

bool TowerLevels::is_cutting(long n) const {
  if (n < 1 || n > n_max()) throw RangeError("level " + std::to_string(n) + " outside 1.." + std::to_string(n_max()));
  return scan_.cutting[idx(n)];
}

int TowerLevels::cutting_index(long n) const {
  const auto& s = scan_.cutting_times;
  auto it = std::lower_bound(s.begin(), s.end(), n);
  return it != s.end() && *it == n ? static_cast<int>(it - s.begin()) : -1;
}

const Real& TowerLevels::endpoint(long n) const {
  is_cutting(n);
  return scan_.orbit[idx(n)];
}

const Real& TowerLevels::other_endpoint(long n) const {
  is_cutting(n);
  return n == 1 ? scan_.boundary_image : scan_.orbit[idx(scan_.beta[idx(n)])];
}

long TowerLevels::beta(long n) const {
  if (n < 2 || n > n_max()) throw RangeError("beta(n) needs 2 <= n <= n_max");
  return scan_.beta[idx(n)];
}

int TowerLevels::contains(long n, const Real& x) const {
  const Real& a = endpoint(n);
  const Real& b = other_endpoint(n);
  const Real& lo = a < b ? a : b;
  const Real& hi = a < b ? b : a;
  const Real tol = map_.tolerance();
  if (x < lo - tol || x > hi + tol) return 0;
  if (x > lo + tol && x < hi - tol) return 1;
  return -1;
}

double TowerLevels::length(long n) const { return std::fabs((endpoint(n) - other_endpoint(n)).to_double()); }

// ---------------------------------------------------------------- lifting

const char* to_string(Branch b) {
  switch (b) {
    case Branch::climb:
      return "climb";
    case Branch::fall:
      return "fall";
    case Branch::restart:
      return "restart";
    case Branch::tie_climb:
      return "tie";
    default:
      return "-";
  }
}

TowerTrace lift(const TowerLevels& levels, const Real& x, long N) {
  if (N < 1) throw InputError("trace length must be >= 1");
  const UnimodalMap& f = levels.map();
  const Real c = f.critical();
  TowerTrace t;
  t.x = x;
  t.level.assign(idx(N) + 1, 0);
  t.branch.assign(idx(N) + 1, Branch::none);
  Real y = f(x.with_bits(f.bits()));
  long l = 1;
  for (long j = 1;; ++j) {
    t.level[idx(j)] = l;
    if (levels.contains(l, y) == 0) ++t.outside;
    if (j == N) break;
    long next = l + 1;
    Branch br = Branch::none;
    if (y == c) {
      next = 1;
      br = Branch::restart;
      ++t.restarts;
    } else if (levels.is_cutting(l)) {
      const int s = f.side(y);
      if (s == 0) {
        br = Branch::tie_climb;
        ++t.ties;
      } else if (s == f.side(levels.endpoint(l))) {
        br = Branch::climb;
      } else {
        br = Branch::fall;
        next = l == 1 ? 1 : 1 + levels.beta(l);
      }
    }
    if (next > levels.n_max())
      throw RangeError("lift climbed past level " + std::to_string(levels.n_max()) + " at time " + std::to_string(j));
    t.branch[idx(j)] = br;
    l = next;
    y = f(y);
  }
  return t;
}

TowerTrace trace_from_levels(std::vector<long> levels_1_based) {
  TowerTrace t;
  t.level.reserve(levels_1_based.size() + 1);
  t.level.push_back(0);
  for (long l : levels_1_based) {
    if (l < 1) throw InputError("levels are >= 1");
    t.level.push_back(l);
  }
  t.branch.assign(t.level.size(), Branch::none);
  return t;
}

std::optional<long> check_transitions(const TowerTrace& t, const KneadingData& kd, long known_through) {
  const BigInt top = std::max(kd.S(kd.depth()), BigInt(known_through));
  for (long j = 1; j < t.N(); ++j) {
    const long l = t.level[idx(j)], nl = t.level[idx(j) + 1];
    if (t.branch[idx(j)] == Branch::restart) {
      if (nl != 1) return j;
      continue;
    }
    if (BigInt(l) > top) throw RangeError("level " + std::to_string(l) + " beyond the computed cutting times");
    auto k = kd.index_of(BigInt(l));
    if (!k) {
      if (nl != l + 1) return j;
    } else if (*k == 0) {
      if (nl != 1 && nl != 2) return j;
    } else {
      const long up = l + 1;
      const long down = 1 + kd.S(kd.Q(*k)).convert_to<long>();
      if (nl != up && nl != down) return j;
    }
  }
  return std::nullopt;
}

BValue b_n(const TowerTrace& t, long n, double guard_factor) {
  return b_from(last_visits(t), t.N(), n, guard_factor);
}

ChiHat chi_hat(const TowerTrace& t, const KneadingData& kd, long known_through) {
  const BigInt top = std::max(kd.S(kd.depth()), BigInt(known_through));
  ChiHat chi;
  bool restarted = false;
  for (long j = 1; j <= t.N(); ++j) {
    const long l = t.level[idx(j)];
    if (l >= 2) {
      if (auto k = kd.index_of(BigInt(l - 1))) {
        chi.linked.push_back(!chi.time.empty() && !restarted);
        chi.time.push_back(j);
        chi.state.push_back(*k);
        restarted = false;
      } else if (BigInt(l - 1) > top) {
        throw RangeError("level " + std::to_string(l) + " beyond the computed cutting times");
      }
    }
    if (t.branch[idx(j)] == Branch::restart) restarted = true;
  }
  return chi;
}

bool chi_hat_is_markov(const ChiHat& chi, const KneadingData& kd) {
  for (std::size_t i = 1; i < chi.state.size(); ++i) {
    if (!chi.linked[i]) continue;
    const int from = chi.state[i - 1], to = chi.state[i];
    if (from + 1 > kd.depth()) {
      // Q(from+1) is unknown; a fall must still take S_to iterates.
      if (BigInt(chi.time[i] - chi.time[i - 1]) != kd.S(to)) return false;
      continue;
    }
    const int q = kd.Q(from + 1);
    if (to != from + 1 && to != q) return false;
    if (BigInt(chi.time[i] - chi.time[i - 1]) != kd.S(q)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- pi tilde

std::vector<long> cutting_successor_levels(const KneadingData& kd, int k_min, long n_max) {
  std::vector<long> out;
  for (int k = std::max(0, k_min); k <= kd.depth(); ++k) {
    if (kd.S(k) + 1 > n_max) break;
    out.push_back(kd.S(k).convert_to<long>() + 1);
  }
  return out;
}

PiTildeReport pi_tilde(const TowerTrace& t, double rho, const std::vector<long>& n_list, double cauchy,
                       const FpTable* fp, int B, const KneadingData* kd) {
  const auto last = last_visits(t);
  PiTildeReport rep;
  for (long n : n_list) {
    if (!last.count(n)) continue;
    BValue b = b_from(last, t.N(), n, 4);
    PiTildeValue v;
    v.n = n;
    v.b = b.time;
    v.provisional = b.provisional;
    long double w = -static_cast<long double>(rho) * static_cast<long double>(b.time - n);
    w -= std::floor(w);
    v.value = static_cast<double>(w);
    if (v.value >= 1) v.value = 0;
    if (fp && kd) {
      int k = 0;
      while (k + 1 <= kd->depth() && kd->S(k + 1) <= n) ++k;
      double m = 0;
      for (std::size_t i = static_cast<std::size_t>(std::max(0, k - B)); i < fp->values.size(); ++i)
        m = std::max(m, std::fabs(fp->values[i]));
      v.bound = k * m;
    }
    rep.values.push_back(v);
  }

  std::vector<const PiTildeValue*> final_vals;
  for (const auto& v : rep.values)
    if (!v.provisional) final_vals.push_back(&v);
  if (final_vals.empty()) {
    rep.estimate = rep.values.empty() ? 0 : rep.values.back().value;
    rep.residual = 0.5;
    return rep;
  }
  std::size_t start = final_vals.size() - 1;
  while (start > 0 && circle_dist(final_vals[start]->value, final_vals[start - 1]->value) < cauchy) --start;
  rep.estimate = final_vals.back()->value;
  for (std::size_t i = start; i < final_vals.size(); ++i)
    rep.residual = std::max(rep.residual, circle_dist(final_vals[i]->value, rep.estimate));
  rep.stabilized = final_vals.size() - start >= 3;
  if (!rep.stabilized) rep.residual = std::max(rep.residual, cauchy);
  return rep;
}

// ---------------------------------------------------------------- drift

const char* to_string(DriftVerdict v) {
  switch (v) {
    case DriftVerdict::positive:
      return "positive-drift-looking";
    case DriftVerdict::negative:
      return "negative-drift-looking";
    default:
      return "inconclusive";
  }
}

DriftTable drift_from_traces(const std::vector<TowerTrace>& traces, const KneadingData& kd, long known_through) {
  struct Tally {
    long n = 0;
    double sum = 0, sq = 0;
  };
  std::map<int, Tally> bins;
  std::set<int> seen;
  for (const auto& t : traces) {
    ChiHat chi = chi_hat(t, kd, known_through);
    for (std::size_t i = 1; i < chi.state.size(); ++i) {
      if (!chi.linked[i]) continue;
      const int inc = chi.state[i] - chi.state[i - 1];
      Tally& b = bins[chi.state[i - 1]];
      ++b.n;
      b.sum += inc;
      b.sq += static_cast<double>(inc) * inc;
      seen.insert(inc);
    }
  }
  DriftTable out;
  double sum = 0, sq = 0;
  for (const auto& [k, b] : bins) {
    out.bins.push_back({k, b.n, b.sum / static_cast<double>(b.n), b.sq / static_cast<double>(b.n)});
    out.transitions += b.n;
    sum += b.sum;
    sq += b.sq;
  }
  out.increments_seen.assign(seen.begin(), seen.end());
  if (out.transitions > 0) {
    const double n = static_cast<double>(out.transitions);
    out.mean = sum / n;
    const double var = std::max(0.0, sq / n - out.mean * out.mean);
    out.ci_half_width = 1.96 * std::sqrt(var / n);
    if (out.transitions >= 30) {
      if (out.mean - out.ci_half_width > 0)
        out.verdict = DriftVerdict::positive;
      else if (out.mean + out.ci_half_width < 0)
        out.verdict = DriftVerdict::negative;
    }
  }
  return out;
}

DriftTable drift(const TowerLevels& levels, int samples, long N, std::uint64_t seed, int threads) {
  if (samples < 1) throw InputError("drift needs at least one sample");
  std::vector<TowerTrace> traces(static_cast<std::size_t>(samples));
  const UnimodalMap& f = levels.map();
  parallel_for(samples, threads, [&](long i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    Real x(f.lo_d() + uniform53(rng()) * f.diameter(), f.bits());
    traces[idx(i)] = lift(levels, x, N);
  });
  return drift_from_traces(traces, levels.kneading(), levels.n_max());
}

// ---------------------------------------------------------------- omega(c) cover

CoverResult omega_cover_check(const TowerLevels& levels, int k, int B, long sample_len) {
  const KneadingData& kd = levels.kneading();
  if (k < 0 || B < 1 || sample_len < 1) throw InputError("omega cover needs k >= 0, B >= 1, sample_len >= 1");
  for (int j = 1; j <= kd.depth(); ++j)
    if (j - kd.Q(j) > B)
      throw HypothesisError("k - Q(k) = " + std::to_string(j - kd.Q(j)) + " at k=" + std::to_string(j) +
                            " exceeds B=" + std::to_string(B));
  if (k + B > kd.depth()) throw RangeError("S_{k+B} is beyond the scanned levels");
  const long lo = kd.S(k).convert_to<long>() + 1;
  const long hi = kd.S(k + B).convert_to<long>();
  const long first = levels.n_max() - sample_len + 1;
  if (first <= hi) throw InputError("sample window overlaps the cover levels; scan further or shorten the window");
  CoverResult r;
  for (long n = first; n <= levels.n_max(); ++n) {
    const Real& x = levels.scan().orbit[idx(n)];
    int best = 0;
    for (long m = lo; m <= hi && best != 1; ++m) {
      const int in = levels.contains(m, x);
      if (in == 1)
        best = 1;
      else if (in == -1)
        best = -1;
    }
    ++r.points;
    if (best == 1) ++r.inside;
    if (best == -1) ++r.ambiguous;
  }
  r.fraction = static_cast<double>(r.inside + r.ambiguous) / static_cast<double>(r.points);
  return r;
}

// ---------------------------------------------------------------- loops

namespace {

std::vector<LoopEdge> shortest_path(const KneadingData& kd, int from, int to, int limit) {
  std::vector<int> prev(static_cast<std::size_t>(limit), -1);
  std::vector<bool> seen(static_cast<std::size_t>(limit), false);
  std::deque<int> queue{from};
  seen[static_cast<std::size_t>(from)] = true;
  while (!queue.empty() && !seen[static_cast<std::size_t>(to)]) {
    const int l = queue.front();
    queue.pop_front();
    const int q = kd.Q(l + 1);
    for (int next : {q, l + 1}) {
      if (next >= limit || seen[static_cast<std::size_t>(next)]) continue;
      seen[static_cast<std::size_t>(next)] = true;
      prev[static_cast<std::size_t>(next)] = l;
      queue.push_back(next);
    }
  }
  if (!seen[static_cast<std::size_t>(to)])
    throw HypothesisError("no path from E_" + std::to_string(from) + " to E_" + std::to_string(to) +
                          " below level " + std::to_string(limit));
  std::vector<LoopEdge> path;
  for (int v = to; v != from; v = prev[static_cast<std::size_t>(v)]) {
    const int u = prev[static_cast<std::size_t>(v)];
    path.push_back({u, v, kd.S(kd.Q(u + 1))});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

BigInt total(const std::vector<LoopEdge>& edges) {
  BigInt s = 0;
  for (const auto& e : edges) s += e.cost;
  return s;
}

}  // namespace

LoopPair synthesize_loops(const KneadingData& kd, int kappa, int kappa_hat, int search_bound) {
  if (kappa < 0 || kappa_hat < 0 || search_bound < 1) throw InputError("loop endpoints must be >= 0");
  LoopPair out;
  out.length_a = out.length_b = 0;
  if (kappa == kappa_hat) return out;
  const int limit = std::min(std::max(kappa, kappa_hat) + search_bound, kd.depth());
  if (std::max(kappa, kappa_hat) >= limit) throw RangeError("kneading depth too small for the requested loop");
  auto there = shortest_path(kd, kappa, kappa_hat, limit);
  auto back = shortest_path(kd, kappa_hat, kappa, limit);
  out.loop_a = there;
  out.loop_a.insert(out.loop_a.end(), back.begin(), back.end());
  out.loop_b = back;
  out.loop_b.insert(out.loop_b.end(), there.begin(), there.end());
  out.length_a = total(out.loop_a);
  out.length_b = total(out.loop_b);
  return out;
}

// ---------------------------------------------------------------- first entry

EntryReport first_entry_map(const UnimodalMap& f, const std::vector<OpenInterval>& U, const std::vector<double>& xs,
                            long horizon) {
  if (horizon < 1) throw InputError("horizon must be >= 1");
  for (const auto& u : U)
    if (!(u.lo < u.hi) || u.lo < f.lo_d() || u.hi > f.hi_d()) throw InputError("U must be open intervals inside I");
  auto component = [&](double y) {
    for (std::size_t i = 0; i < U.size(); ++i)
      if (y > U[i].lo && y < U[i].hi) return static_cast<long>(i);
    return -1L;
  };
  const double c = f.critical_d();
  EntryReport rep;
  std::map<std::string, long> branch_of;
  std::vector<double> dmin, dmax;
  for (double x : xs) {
    EntryPoint p;
    p.x = x;
    std::string it;
    double y = x, d = 1;
    for (long r = 1; r <= horizon; ++r) {
      it.push_back(y < c ? 'L' : y > c ? 'R' : 'C');
      d *= f.derivative(y);
      y = f(y);
      const long comp = component(y);
      if (comp < 0) continue;
      p.r = r;
      p.image = y;
      p.derivative = d;
      const std::string key = it + ":" + std::to_string(comp);
      auto [pos, fresh] = branch_of.emplace(key, static_cast<long>(rep.branches.size()));
      if (fresh) {
        rep.branches.push_back({r, key, 0, 1});
        dmin.push_back(std::fabs(d));
        dmax.push_back(std::fabs(d));
      }
      p.branch = pos->second;
      auto& b = rep.branches[idx(p.branch)];
      ++b.samples;
      dmin[idx(p.branch)] = std::min(dmin[idx(p.branch)], std::fabs(d));
      dmax[idx(p.branch)] = std::max(dmax[idx(p.branch)], std::fabs(d));
      break;
    }
    if (!p.r) ++rep.no_entry;
    rep.points.push_back(p);
  }
  for (std::size_t i = 0; i < rep.branches.size(); ++i)
    rep.branches[i].distortion = dmin[i] > 0 ? dmax[i] / dmin[i] : HUGE_VAL;
  for (const auto& u : U)
    for (double e : {u.lo, u.hi}) {
      double y = e;
      for (long r = 1; r <= horizon; ++r) {
        y = f(y);
        if (component(y) >= 0) {
          ++rep.boundary_reentries;
          break;
        }
      }
    }
  return rep;
}

}  // namespace lyk
