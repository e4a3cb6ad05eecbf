#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lyk/errors.hpp"
#include "lyk/pairlab.hpp"

using namespace lyk;
using lyk::test::feigenbaum_map;
using lyk::test::fibonacci_flat_map;

namespace {

UnimodalMap logistic(const char* a) { return UnimodalMap::logistic(Real::parse(a, 256)); }

ClassifyParams short_window(long window = 20000) {
  ClassifyParams p;
  p.window = window;
  return p;
}

void check_invariants(const PairVerdict& v) {
  const auto& p = v.params;
  CHECK(v.min_gap <= v.max_gap);
  CHECK(v.tail_max <= v.max_gap);
  switch (v.label) {
    case PairLabel::ly_like:
      CHECK(v.min_gap <= p.delta_min);
      CHECK(v.max_gap >= p.eps);
      break;
    case PairLabel::distal_like:
      CHECK(v.min_gap > p.delta_min);
      break;
    case PairLabel::asymptotic_like:
      CHECK(v.tail_max < p.delta_min);
      break;
    default:
      CHECK(v.min_gap <= p.delta_min);
      CHECK(v.max_gap < p.eps);
  }
}

}  // namespace

TEST_CASE("classification of simple pairs") {
  auto f = logistic("4");
  auto p = short_window();
  // f(x) = f(1-x).
  auto fold = classify_pair(f, 0.375, 0.625, p);
  CHECK(fold.label == PairLabel::asymptotic_like);
  CHECK(fold.max_gap == 0.0);

  auto fixed = classify_pair(f, 0.0, 0.75, p);
  CHECK(fixed.label == PairLabel::distal_like);
  CHECK(fixed.min_gap == 0.75);
  CHECK(fixed.describe() == "distal-like");

  auto q = p;
  q.precision = 113;
  CHECK(classify_pair(f, 0.0, 0.75, q).min_gap == 0.75);
  CHECK(classify_pair(f, 0.375, 0.625, q).label == PairLabel::asymptotic_like);

  auto ly = classify_pair(f, 0.123, 0.456, p);
  CHECK(ly.label == PairLabel::ly_like);
  CHECK(ly.describe() == "ly-like(0.45)");

  q.precision = 64;
  CHECK_THROWS_AS(classify_pair(f, 0.1, 0.2, q), InputError);
  auto bad = p;
  bad.window = bad.burn_in;
  CHECK_THROWS_AS(classify_pair(f, 0.1, 0.2, bad), InputError);
}

TEST_CASE("verdict properties") {
  std::mt19937_64 rng(5);
  for (const char* a : {"4", "3.2", "3.83", "3.7"}) {
    auto f = logistic(a);
    for (int i = 0; i < 20; ++i) {
      double x = uniform53(rng()), y = uniform53(rng());
      auto p = short_window(5000);
      auto v = classify_pair(f, x, y, p);
      check_invariants(v);
      auto w = classify_pair(f, y, x, p);
      CHECK(v.label == w.label);
      CHECK(v.min_gap == w.min_gap);
      if (v.label == PairLabel::ly_like) {
        auto lower = p;
        lower.eps = 0.3;
        CHECK(classify_pair(f, x, y, lower).label == PairLabel::ly_like);
      }
    }
  }
}

TEST_CASE("Wilson intervals") {
  // Closed form for k = 0: upper end z^2 / (n + z^2).
  const double z = 1.959963984540054;
  auto [lo, hi] = wilson_interval(0, 10);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(z * z / (10 + z * z)));
  auto [lo2, hi2] = wilson_interval(50, 100);
  CHECK(lo2 == doctest::Approx(1 - hi2));
  CHECK(lo2 == doctest::Approx(0.4038).epsilon(1e-3));
}

TEST_CASE("Monte Carlo fractions") {
  SUBCASE("full shift") {
    auto f = logistic("4");
    auto e = measure_estimate(f, 200, 42, short_window(), 1);
    CHECK(e.of(PairLabel::ly_like).fraction >= 0.9);
    CHECK(e.of(PairLabel::ly_like).wilson_lo <= e.of(PairLabel::ly_like).fraction);
    auto again = measure_estimate(f, 200, 42, short_window(), 3);
    for (std::size_t i = 0; i < e.records.size(); ++i) {
      CHECK(e.records[i].x == again.records[i].x);
      CHECK(e.records[i].verdict.label == again.records[i].verdict.label);
      CHECK(e.records[i].verdict.min_gap == again.records[i].verdict.min_gap);
    }
    long total = 0;
    for (const auto& l : e.labels) total += l.count;
    CHECK(total == 200);
  }
  SUBCASE("stable two-cycle") {
    auto e = measure_estimate(logistic("3.2"), 200, 1, short_window(), 1);
    CHECK(e.of(PairLabel::asymptotic_like).fraction + e.of(PairLabel::distal_like).fraction >= 0.99);
  }
  SUBCASE("Feigenbaum-tuned") {
    auto e = measure_estimate(feigenbaum_map(), 200, 1, short_window(), 1);
    CHECK(e.of(PairLabel::ly_like).fraction <= 0.05);
  }
  CHECK_THROWS_AS(measure_estimate(logistic("4"), 0, 1, short_window()), InputError);
}

TEST_CASE("approximate periodicity") {
  auto fixed = approx_periodic_test(logistic("2.8"), 0.2, 0.05, 8, 2000);
  REQUIRE(fixed.witness);
  CHECK(fixed.witness->period == 1);
  CHECK(fixed.witness->cycle[0] == doctest::Approx(1 - 1 / 2.8));

  auto two = approx_periodic_test(logistic("3.2"), 0.2, 0.05, 8, 2000);
  REQUIRE(two.witness);
  CHECK(two.witness->period == 2);
  CHECK(two.witness->sup_distance < 1e-9);

  for (int i = 0; i < 20; ++i) {
    auto& g = feigenbaum_map();
    auto r = approx_periodic_test(g, sample_point(g, 8, i, 0), 0.05, 64, 10000);
    REQUIRE(r.witness);
    const int p = r.witness->period;
    CHECK((p & (p - 1)) == 0);
  }
  auto f4 = logistic("4");
  for (int i = 0; i < 10; ++i) CHECK_FALSE(approx_periodic_test(f4, sample_point(f4, 8, i, 0), 0.05, 64, 10000).witness);
}

TEST_CASE("factor separation") {
  const auto& f = fibonacci_flat_map();
  const auto lv = build_levels(f, 10001);
  const auto n_list = cutting_successor_levels(lv.kneading(), 0, lv.n_max());
  const double rho = (1 + std::sqrt(5.0)) / 2;
  Real x(0.37, f.bits());
  auto a = lift(lv, x, 10000);
  auto b = lift(lv, f(x), 9999);
  auto pa = pi_tilde(a, rho, n_list), pb = pi_tilde(b, rho, n_list);
  REQUIRE(pa.stabilized);
  REQUIRE(pb.stabilized);
  auto s = factor_separation(pa, pb, 0.1);
  CHECK(s.certificate);
  CHECK(s.delta == doctest::Approx(2 - rho).epsilon(1e-6));
  CHECK_FALSE(factor_separation(pa, pa, 0.0).certificate);
  PiTildeReport loose = pa;
  loose.stabilized = false;
  CHECK_THROWS_AS(factor_separation(loose, pb, 0.1), InputError);
  CHECK(factor_separation(a, b, rho, n_list, 0.1, 1e-3).certificate);
}

TEST_CASE("interval pushforward") {
  auto f4 = logistic("4");
  auto whole = limsup_full_estimate(f4, {{0, 1}}, 10);
  for (const auto& r : whole) CHECK(r.lower == 1.0);

  auto rows = limsup_full_estimate(f4, {{0.3, 0.31}}, 30);
  REQUIRE(rows.size() == 31);
  CHECK(rows[0].lower == doctest::Approx(0.01));
  CHECK(rows.back().running_max >= 0.99);
  for (const auto& r : rows) CHECK(r.lower <= r.upper);

  // One monotone branch against a dense grid.
  auto one = limsup_full_estimate(f4, {{0.1, 0.2}}, 1);
  double lo = 1, hi = 0;
  for (int i = 0; i <= 1000000; ++i) {
    double y = f4(0.1 + 0.1 * i / 1e6);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  CHECK(one[1].lower == doctest::Approx(hi - lo).epsilon(1e-9));

  // Across the critical point the image ends at f(c).
  auto fold = limsup_full_estimate(f4, {{0.4, 0.7}}, 1);
  CHECK(fold[1].lower == doctest::Approx(1 - f4(0.7)));

  auto f32 = logistic("3.2");
  auto shrink = limsup_full_estimate(f32, {{0.2, 0.21}}, 60);
  CHECK(shrink.back().lower < 1e-6);
  CHECK(shrink.back().running_max < 0.05);

  // Cap of one: lower keeps the largest piece, upper takes the hull.
  auto capped = limsup_full_estimate(f4, {{0.01, 0.02}, {0.05, 0.08}, {0.1, 0.12}}, 0, 1);
  CHECK(capped[0].capped);
  CHECK(capped[0].lower == doctest::Approx(0.03));
  CHECK(capped[0].upper == doctest::Approx(0.11));

  CHECK_THROWS_AS(limsup_full_estimate(f4, {{0.5, 1.5}}, 3), InputError);
}
