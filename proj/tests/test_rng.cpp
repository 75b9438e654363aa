#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "idpdb/rng.hpp"

using namespace idpdb;

TEST_CASE("draws are a pure function of key and counter") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CounterRng c(42, 10);
  CounterRng d(42);
  for (int i = 0; i < 10; ++i) d.next_u64();
  CHECK(c.next_u64() == d.next_u64());
}

TEST_CASE("substreams differ by label and seed") {
  const auto a = CounterRng::substream(7, "init").key();
  const auto b = CounterRng::substream(7, "shuffle").key();
  const auto c = CounterRng::substream(8, "init").key();
  CHECK(a != b);
  CHECK(a != c);
  CHECK(CounterRng::substream(7, "init").key() == a);
}

TEST_CASE("uniform stays in [0,1) with mean near one half") {
  CounterRng rng(1);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("below covers its range evenly") {
  CounterRng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(7)];
  for (int c : counts) CHECK(std::abs(c - n / 7) < 400);
}

TEST_CASE("shuffle yields a permutation and is reproducible") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w(v);
  CounterRng r1(9), r2(9);
  shuffle(std::span<int>(v), r1);
  shuffle(std::span<int>(w), r2);
  CHECK(v == w);
  std::set<int> s(v.begin(), v.end());
  CHECK(s.size() == 50);
  CHECK_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST_CASE("fnv1a64 matches the published test vector") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
