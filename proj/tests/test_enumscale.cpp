#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "lyk/enumscale.hpp"
#include "lyk/errors.hpp"

using namespace lyk;

namespace {

std::shared_ptr<const KneadingData> make(const QRule& rule, int depth) {
  return std::make_shared<const KneadingData>(KneadingData::build(rule, depth));
}

std::vector<QRule> families() {
  return {QRule::fibonacci_like(2), QRule::fibonacci_like(3), QRule::fibonacci_like(5), QRule::feigenbaum(),
          QRule::doubled_example()};
}

}  // namespace

TEST_CASE("encode examples") {
  auto fib = make(QRule::fibonacci_like(2), 12);
  auto e = encode(0, fib);
  CHECK(std::all_of(e.bits().begin(), e.bits().end(), [](auto b) { return b == 0; }));
  auto four = encode(4, fib);
  CHECK(four[0] == 1);
  CHECK(four[2] == 1);
  CHECK(std::count(four.bits().begin(), four.bits().end(), 1) == 2);
  CHECK(decode(four) == 4);
  for (int k = 0; k < 12; ++k) CHECK(encode(fib->S(k), fib) == EnumSequence::unit(fib, k));
  CHECK_THROWS_AS(encode(fib->S(12), fib), RangeError);
}

TEST_CASE("admissible sequences enumerate 0..S_m - 1 exactly once") {
  // Brute force over all 0/1 words, independent of the greedy encoder.
  for (const auto& rule : families()) {
    auto kd = make(rule, 11);
    const int m = kd->depth();
    std::map<BigInt, int> seen;
    for (unsigned w = 0; w < (1u << m); ++w) {
      std::vector<std::uint8_t> bits(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) bits[static_cast<std::size_t>(i)] = (w >> i) & 1u;
      EnumSequence e(kd, bits);
      if (!e.is_admissible()) continue;
      CHECK(e.partial_sums_bounded());
      BigInt n = decode(e);
      ++seen[n];
      CHECK(encode(n, kd) == e);
    }
    CHECK(seen.size() == kd->S(m));
    CHECK(seen.rbegin()->first == kd->S(m) - 1);
    for (const auto& [n, c] : seen) CHECK(c == 1);
  }
}

TEST_CASE("odometer agrees with the codec") {
  for (const auto& rule : families()) {
    auto kd = make(rule, 14);
    auto e = EnumSequence::zero(kd);
    const auto top = kd->S(kd->depth()) - 1;
    for (BigInt n = 0; n < top; ++n) {
      auto next = add_one(e);
      CHECK(next.is_admissible());
      CHECK(next == add_one_by_codec(e));
      CHECK(decode(next) == n + 1);
      e = next;
    }
    CHECK_THROWS_AS(add_one(e), RangeError);
    CHECK_THROWS_AS(add_one_by_codec(e), RangeError);
  }
}

TEST_CASE("carry examples") {
  auto fib = make(QRule::fibonacci_like(2), 25);
  CHECK(add_one(EnumSequence::zero(fib)) == EnumSequence::unit(fib, 0));
  CHECK(add_one(encode(4, fib)) == EnumSequence::unit(fib, 3));
  for (int k = 1; k <= 20; ++k) CHECK(add_one(encode(fib->S(k) - 1, fib)) == EnumSequence::unit(fib, k));
}

TEST_CASE("inadmissible input") {
  auto fib = make(QRule::fibonacci_like(2), 6);
  EnumSequence bad(fib, {1, 1, 0, 0, 0, 0});
  CHECK_FALSE(bad.is_admissible());
  CHECK_THROWS_AS(decode(bad), InputError);
  CHECK_THROWS_AS(add_one(bad), InputError);
  CHECK_THROWS_AS(EnumSequence(fib, {0, 0, 0, 0, 0, 0, 0}), RangeError);
  CHECK_THROWS_AS(EnumSequence(fib, {2}), InputError);
}

TEST_CASE("string form") {
  auto fib = make(QRule::fibonacci_like(2), 6);
  auto e = encode(4, fib);
  CHECK(e.to_string() == "fib:101000");
  CHECK(parse_enum_sequence("fib:101000", fib) == e);
  CHECK_THROWS_AS(parse_enum_sequence("feigenbaum:101000", fib), InputError);
  CHECK_THROWS_AS(parse_enum_sequence("fib:110000", fib), InputError);
  CHECK_THROWS_AS(parse_enum_sequence("fib:10x", fib), InputError);
}

TEST_CASE("projection") {
  auto fib = make(QRule::fibonacci_like(2), 80);
  auto table = fp_table(*fib, rho_from_polynomial(cutting_time_polynomial(2)), 80);
  CHECK(project(EnumSequence::zero(fib), table, 60).point == 0.0);
  CHECK(project(EnumSequence::unit(fib, 0), table, 60).point == doctest::Approx(0.6180339887).epsilon(1e-10));
  auto p = project(EnumSequence::zero(fib), table, 60, DecayModel{1.0, 0.62});
  REQUIRE(p.tail_bound);
  CHECK(*p.tail_bound < 1e-11);
  CHECK_THROWS_AS(project(EnumSequence::zero(fib), table, 81), RangeError);
}

TEST_CASE("semiconjugacy on random admissible sequences") {
  auto fib = make(QRule::fibonacci_like(2), 80);
  auto table = fp_table(*fib, rho_from_polynomial(cutting_time_polynomial(2)), 80);
  const double rho = 1.6180339887498949;
  std::mt19937_64 rng(2024);
  int tested = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    BigInt n = 0;
    for (int w = 0; w < 2; ++w) n = (n << 64) + BigInt(rng());
    n %= fib->S(60) - 1;
    auto e = encode(n, fib);
    auto a = project(e, table, 60);
    auto b = project(add_one(e), table, 60);
    CHECK(circle_distance(b.point, a.point + rho) < 1e-12);
    ++tested;
  }
  CHECK(tested == 1000);
}

TEST_CASE("circle distance") {
  CHECK(circle_distance(0.1, 0.9) == doctest::Approx(0.2));
  CHECK(circle_distance(0.0, 3.0) == 0.0);
  CHECK(circle_distance(0.25, 0.75) == doctest::Approx(0.5));
}
