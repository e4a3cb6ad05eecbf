#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lyk/errors.hpp"
#include "lyk/tower.hpp"

using namespace lyk;
using lyk::test::feigenbaum_map;
using lyk::test::fibonacci_flat_map;
using lyk::test::fibonacci_map;

namespace {

const double kRho = (1 + std::sqrt(5.0)) / 2;

double circle(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1 - d);
}

const TowerLevels& fib_levels() {
  static const TowerLevels lv = build_levels(fibonacci_map(), 12000);
  return lv;
}

}  // namespace

TEST_CASE("levels of the Fibonacci-tuned map") {
  const auto& lv = fib_levels();
  std::vector<long> flagged;
  for (long n = 1; n <= 100; ++n)
    if (lv.is_cutting(n)) flagged.push_back(n);
  CHECK(flagged == std::vector<long>{1, 2, 3, 5, 8, 13, 21, 34, 55, 89});
  // Agrees with the independently computed cutting times.
  auto emp = empirical_cutting_times(fibonacci_map(), 18);
  for (int k = 0; k <= 18; ++k) CHECK(lv.is_cutting(emp.kneading.S(k).convert_to<long>()));

  // beta(1+S_k) = 1, so D_{1+S_k} has endpoint c_1.
  for (int k = 1; k <= 18; ++k) {
    long n = lv.kneading().S(k).convert_to<long>() + 1;
    CHECK(lv.beta(n) == 1);
    CHECK(lv.other_endpoint(n) == lv.scan().orbit[1]);
  }
  // c lies inside D_n exactly at the cutting levels.
  const Real c = fibonacci_map().critical();
  for (long n = 2; n <= 400; ++n) CHECK((lv.contains(n, c) == 1) == lv.is_cutting(n));
  // Nesting D_n inside D_{beta(n)}.
  for (long n = 2; n <= 400; ++n) {
    CHECK(lv.contains(lv.beta(n), lv.endpoint(n)) != 0);
    CHECK(lv.contains(lv.beta(n), lv.other_endpoint(n)) != 0);
  }
  CHECK_THROWS_AS(lv.is_cutting(0), RangeError);
  CHECK_THROWS_AS(lv.is_cutting(12001), RangeError);
}

TEST_CASE("Feigenbaum-tuned levels shrink along cutting times") {
  auto lv = build_levels(feigenbaum_map(), 1500);
  double prev = 10;
  for (int k = 1; k <= 10; ++k) {
    double len = lv.length(lv.kneading().S(k).convert_to<long>());
    CHECK(len < prev);
    prev = len;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("critical lift climbs one level per step") {
  const auto& lv = fib_levels();
  auto t = lift(lv, fibonacci_map().critical(), 1000);
  for (long j = 1; j <= 1000; ++j) CHECK(t.level[static_cast<std::size_t>(j)] == j);
  CHECK(t.outside == 0);
  CHECK_FALSE(check_transitions(t, lv.kneading()));
  for (long n : {1L, 2L, 77L, 1000L}) CHECK(b_n(t, n).time == n);
  auto pi = pi_tilde(t, kRho, cutting_successor_levels(lv.kneading(), 0, 1000));
  for (const auto& v : pi.values) CHECK(v.value == 0.0);
}

TEST_CASE("an exact hit of c restarts at the bottom") {
  const auto& f = fibonacci_map();
  const auto& lv = fib_levels();
  // Preimage of c, nudged by ulps until f(x) == c holds exactly.
  const Real c = f.critical();
  Real disc = sqrt(Real(1L, f.bits()) - Real(2L, f.bits()) / f.a());
  Real x = mul_2si(Real(1L, f.bits()) - disc, -1);
  bool exact = false;
  for (int step = 0; step < 64 && !exact; ++step) {
    Real probe = x;
    for (int s = 0; s < step / 2; ++s) (step % 2 ? mpfr_nextabove : mpfr_nextbelow)(probe.get());
    if (f(probe) == c) {
      x = probe;
      exact = true;
    }
  }
  REQUIRE(exact);
  // f(x) = c at time m = 1, so l_{1+j} = j.
  auto t = lift(lv, x, 50);
  CHECK(t.restarts == 1);
  CHECK(t.branch[1] == Branch::restart);
  for (long j = 1; j + 1 <= 50; ++j) CHECK(t.level[static_cast<std::size_t>(j + 1)] == j);
  CHECK_FALSE(check_transitions(t, lv.kneading()));
}

TEST_CASE("random lifts respect the tower transitions") {
  const auto& lv = fib_levels();
  const auto& kd = lv.kneading();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    Real x(uniform53(rng()), fibonacci_map().bits());
    auto t = lift(lv, x, 5000);
    CHECK(t.outside == 0);
    CHECK_FALSE(check_transitions(t, kd));
    auto chi = chi_hat(t, kd);
    CHECK(chi.state.size() > 1000);
    CHECK(chi_hat_is_markov(chi, kd));
    // Falls from E_l land at E_{Q(l+1)} = E_{l-1} (E_0 falls to itself).
    for (std::size_t m = 1; m < chi.state.size(); ++m) {
      const int l = chi.state[m - 1], to = chi.state[m];
      CHECK((to == l + 1 || to == std::max(l - 1, 0)));
    }
  }
  CHECK_THROWS_AS(lift(build_levels(fibonacci_map(), 50), fibonacci_map().critical(), 60), RangeError);
}

TEST_CASE("b_n on a synthetic trace with three falls") {
  // Fibonacci: S = 1,2,3,5,8,13. Climb to 8, fall to 1+S_3 = 4 (Q(4)=2 gives 1+S_2=4),
  // climb to 5, fall to 1+S_1 = 3, climb to 3, fall to 1+S_0 = 2, then climb to 9.
  std::vector<long> levels{1, 2, 3, 4, 5, 6, 7, 8, 4, 5, 3, 2, 3, 4, 5, 6, 7, 8, 9};
  auto t = trace_from_levels(levels);
  auto kd = KneadingData::build(QRule::fibonacci_like(2), 10);
  CHECK_FALSE(check_transitions(t, kd));
  CHECK(b_n(t, 8, 0).time == 18);
  CHECK(b_n(t, 9, 0).time == 19);
  CHECK(b_n(t, 1, 0).time == 1);
  CHECK(b_n(t, 2, 0).time == 12);
  CHECK(b_n(t, 3, 0).time == 13);
  CHECK(b_n(t, 5, 0).time == 15);
  // Guard window: N - b_5 = 4 >= 4 (b_6 - b_5); N - b_1 = 18 < 4 (b_2 - b_1).
  CHECK_FALSE(b_n(t, 5).provisional);
  CHECK_FALSE(b_n(t, 2).provisional);
  CHECK(b_n(t, 1).provisional);
  CHECK(b_n(t, 9).provisional);
  CHECK_THROWS_AS(b_n(t, 10), RangeError);

  auto bad = trace_from_levels({1, 2, 3, 5});
  CHECK(check_transitions(bad, kd) == 3);
  auto chi = chi_hat(t, kd);
  CHECK(chi.state == std::vector<int>{0, 1, 2, 3, 2, 1, 0, 1, 2, 3, 4});
  CHECK(chi_hat_is_markov(chi, kd));
}

TEST_CASE("pi tilde is equivariant") {
  const auto& f = fibonacci_flat_map();
  const auto lv = build_levels(f, 10001);
  const auto n_list = cutting_successor_levels(lv.kneading(), 0, lv.n_max());
  std::mt19937_64 rng(11);
  int stabilized = 0;
  for (int i = 0; i < 10; ++i) {
    Real x(2 * uniform53(rng()) - 1, f.bits());
    auto a = lift(lv, x, 10000);
    auto b = lift(lv, f(x), 9999);
    // The lift of f(x) merges with the shifted lift of x.
    long merge = 1;
    while (merge < b.N() && b.level[static_cast<std::size_t>(merge)] != a.level[static_cast<std::size_t>(merge) + 1])
      ++merge;
    REQUIRE(merge < 1000);
    auto pa = pi_tilde(a, kRho, n_list);
    auto pb = pi_tilde(b, kRho, n_list);
    REQUIRE(!pa.values.empty());
    int compared = 0;
    for (const auto& va : pa.values)
      for (const auto& vb : pb.values)
        if (va.n == vb.n && vb.b > merge) {
          CHECK(vb.b == va.b - 1);
          CHECK(circle(vb.value - va.value, kRho) < 1e-9);
          ++compared;
        }
    CHECK(compared >= 3);
    CHECK(circle(pb.estimate - pa.estimate, kRho) < pa.residual + 1e-4);
    stabilized += pa.stabilized;
    for (const auto& v : pa.values) {
      CHECK(v.value >= 0);
      CHECK(v.value < 1);
    }
  }
  CHECK(stabilized >= 8);
}

TEST_CASE("quadratic Fibonacci lifts stay low") {
  // No wild attractor for the quadratic map: levels keep being revisited.
  const auto& lv = fib_levels();
  auto t = lift(lv, Real(0.3, fibonacci_map().bits()), 10000);
  CHECK(*std::max_element(t.level.begin(), t.level.end()) < 1000);
  auto rep = pi_tilde(t, kRho, cutting_successor_levels(lv.kneading(), 0, lv.n_max()));
  CHECK_FALSE(rep.stabilized);
  CHECK(rep.residual >= 1e-3);
}

TEST_CASE("pi tilde bound diagnostic decays") {
  const auto& lv = fib_levels();
  auto kd = KneadingData::build(QRule::fibonacci_like(2), 40);
  auto table = fp_table(kd, rho_from_polynomial(cutting_time_polynomial(2)), 40);
  auto t = lift(lv, Real(0.3, fibonacci_map().bits()), 10000);
  auto rep = pi_tilde(t, kRho, cutting_successor_levels(lv.kneading(), 3, lv.n_max()), 1e-3, &table, 2, &kd);
  REQUIRE(rep.values.size() >= 3);
  for (std::size_t i = 1; i < rep.values.size(); ++i) CHECK(rep.values[i].bound < rep.values[i - 1].bound);
}

TEST_CASE("drift tables") {
  SUBCASE("always climbing") {
    std::vector<long> levels;
    for (long j = 1; j <= 200; ++j) levels.push_back(j);
    auto kd = KneadingData::build(QRule::fibonacci_like(2), 12);
    auto d = drift_from_traces({trace_from_levels(levels)}, kd);
    REQUIRE(!d.bins.empty());
    for (const auto& b : d.bins) {
      CHECK(b.mean == 1.0);
      CHECK(b.second_moment == 1.0);
    }
    CHECK(d.increments_seen == std::vector<int>{1});
  }
  SUBCASE("Feigenbaum increments") {
    auto lv = build_levels(feigenbaum_map(), 1500);
    auto d = drift(lv, 20, 1000, 5, 1);
    // Q(l+1) = l: a fall from E_l returns to E_l.
    CHECK(d.increments_seen == std::vector<int>{0, 1});
    CHECK(d.transitions > 0);
  }
  SUBCASE("Fibonacci report is deterministic") {
    const auto& lv = fib_levels();
    auto a = drift(lv, 8, 2000, 3, 1);
    auto b = drift(lv, 8, 2000, 3, 4);
    REQUIRE(a.bins.size() == b.bins.size());
    for (std::size_t i = 0; i < a.bins.size(); ++i) {
      CHECK(a.bins[i].k == b.bins[i].k);
      CHECK(a.bins[i].count == b.bins[i].count);
      CHECK(a.bins[i].mean == b.bins[i].mean);
    }
    CHECK(a.mean == b.mean);
    CHECK(a.increments_seen == std::vector<int>{-1, 0, 1});
  }
}

TEST_CASE("omega(c) covers") {
  const auto& lv = fib_levels();
  auto r = omega_cover_check(lv, 8, 2, 10000);
  CHECK(r.points == 10000);
  CHECK(r.fraction == 1.0);
  CHECK_THROWS_AS(omega_cover_check(lv, 8, 1, 10000), HypothesisError);
  CHECK_THROWS_AS(omega_cover_check(lv, 8, 2, 11950), InputError);

  auto fl = build_levels(feigenbaum_map(), 1500);
  auto g = omega_cover_check(fl, 4, 1, 1000);
  CHECK(g.fraction == 1.0);
}

TEST_CASE("loop synthesis") {
  auto fib = KneadingData::build(QRule::fibonacci_like(2), 60);
  auto lp = synthesize_loops(fib, 3, 4);
  CHECK(lp.length_a == 8);
  CHECK(lp.length_b == 8);
  CHECK(lp.length_a == fib.S(4));
  REQUIRE(lp.loop_a.size() == 2);
  CHECK(lp.loop_a[0].from == 3);
  CHECK(lp.loop_a[0].to == 4);
  CHECK(lp.loop_a[0].cost == 3);
  CHECK(lp.loop_a[1].to == 3);
  CHECK(lp.loop_a[1].cost == 5);
  CHECK(lp.loop_b.front().from == 4);

  auto same = synthesize_loops(fib, 5, 5);
  CHECK(same.loop_a.empty());
  CHECK(same.length_a == 0);

  // The two loops use the same edges in a rotated order.
  std::mt19937_64 rng(9);
  for (auto rule : {QRule::fibonacci_like(2), QRule::fibonacci_like(3), QRule::doubled_example()}) {
    auto kd = KneadingData::build(rule, 80);
    for (int i = 0; i < 20; ++i) {
      int a = 2 + static_cast<int>(rng() % 30), b = 2 + static_cast<int>(rng() % 30);
      auto p = synthesize_loops(kd, a, b);
      CHECK(p.length_a == p.length_b);
      CHECK(p.loop_a.size() == p.loop_b.size());
      for (const auto& e : p.loop_a) CHECK(e.cost == kd.S(kd.Q(e.from + 1)));
      if (!p.loop_a.empty()) {
        CHECK(p.loop_a.front().from == a);
        CHECK(p.loop_a.back().to == a);
        CHECK(p.loop_b.front().from == b);
      }
    }
  }
  // No way down when Q(l+1) = l.
  auto feig = KneadingData::build(QRule::feigenbaum(), 40);
  CHECK_THROWS_AS(synthesize_loops(feig, 3, 4), HypothesisError);
  CHECK(synthesize_loops(feig, 3, 3).length_a == 0);
}

TEST_CASE("first entry maps") {
  auto f4 = UnimodalMap::logistic(Real(4L, 256));
  std::vector<OpenInterval> U{{0.49, 0.51}};
  // f(x) = 0.5 at x = (2 - sqrt 2)/4.
  const double x1 = (2 - std::sqrt(2.0)) / 4;
  auto rep = first_entry_map(f4, U, {x1, 0.5}, 100);
  REQUIRE(rep.points[0].r);
  CHECK(*rep.points[0].r == 1);
  // 0.5 is in U; it maps to 1 and then 0 forever, so it never returns.
  CHECK_FALSE(rep.points[1].r);
  CHECK(rep.no_entry == 1);

  const auto& f = fibonacci_map();
  const auto& lv = fib_levels();
  // Central level D_{S_6} = D_21 around c.
  double a = lv.endpoint(21).to_double(), b = lv.other_endpoint(21).to_double();
  std::vector<OpenInterval> V{{std::min(a, b), std::max(a, b)}};
  auto sample = [&](int n) {
    std::vector<double> xs;
    for (int i = 1; i < n; ++i) xs.push_back(V[0].lo + (V[0].hi - V[0].lo) * i / n);
    return first_entry_map(f, V, xs, 5000);
  };
  auto coarse = sample(2000), fine = sample(4000);
  CHECK(fine.no_entry * 100 <= static_cast<long>(fine.points.size()));
  for (const auto& r : {coarse, fine})
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      if (!p.r) continue;
      CHECK(*p.r >= 1);
      CHECK(r.branches[static_cast<std::size_t>(p.branch)].r == *p.r);
    }
  // Largest branches: distortion finite and stable under doubling.
  auto top = [](const EntryReport& r) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.branches.size(); ++i)
      if (r.branches[i].samples > r.branches[best].samples) best = i;
    return r.branches[best];
  };
  auto bc = top(coarse), bf = top(fine);
  CHECK(bc.itinerary == bf.itinerary);
  CHECK(std::isfinite(bf.distortion));
  CHECK(bf.distortion >= bc.distortion);
  CHECK(bf.distortion < bc.distortion * 1.1);

  CHECK_THROWS_AS(first_entry_map(f4, {{0.6, 0.5}}, {0.1}, 10), InputError);
}
