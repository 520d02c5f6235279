#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include <oevo/rng.hpp>

using oevo::Rng;

TEST_CASE("same seed reproduces the stream, different seed diverges") {
  Rng a(42);
  Rng b(42);
  Rng c(43);
  bool all_equal = true;
  bool any_diff_c = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    all_equal = all_equal && x == b.uniform();
    any_diff_c = any_diff_c || x != c.uniform();
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("uniform stays in [0,1) with a sane mean") {
  Rng r(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = r.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(std::fabs(sum / 100000.0 - 0.5) < 0.01);
}

TEST_CASE("below is bounded and roughly uniform") {
  Rng r(2);
  std::vector<int> buckets(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const std::uint64_t v = r.below(7);
    REQUIRE(v < 7);
    ++buckets[static_cast<int>(v)];
  }
  for (int n : buckets) {
    CHECK(n > 9000);
    CHECK(n < 11000);
  }
  for (int i = 0; i < 100; ++i) CHECK(r.below(1) == 0);
}

TEST_CASE("bernoulli edges are exact") {
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(r.bernoulli(0.0));
    CHECK(r.bernoulli(1.0));
  }
}

TEST_CASE("gaussian has requested spread") {
  Rng r(4);
  double sum = 0.0;
  double sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = r.gaussian(2.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sumsq / n - mean * mean);
  CHECK(std::fabs(mean) < 0.05);
  CHECK(std::fabs(sd - 2.0) < 0.05);
}

TEST_CASE("state text restores the exact stream position") {
  Rng r(99);
  for (int i = 0; i < 37; ++i) r.uniform();
  const std::string state = r.save_state();

  std::vector<double> expected;
  for (int i = 0; i < 50; ++i) expected.push_back(r.uniform());

  Rng s(0);
  s.load_state(state);
  for (int i = 0; i < 50; ++i) REQUIRE(s.uniform() == expected[i]);

  Rng t(0);
  t.load_state(state);
  Rng u(0);
  u.load_state(state);
  CHECK(t == u);
}
