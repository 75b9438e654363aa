#include <set>

#include "doctest.h"
#include "idpdb/errors.hpp"
#include "idpdb/rng.hpp"
#include "idpdb/kmeans.hpp"
#include "idpdb/rng.hpp"

using namespace idpdb;

namespace {

std::vector<Vector> planted(std::size_t per_cluster, std::size_t clusters, std::size_t dim, double spacing,
                            double noise, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Vector> pts;
  for (std::size_t c = 0; c < clusters; ++c) {
    for (std::size_t i = 0; i < per_cluster; ++i) {
      Vector p(dim);
      for (std::size_t j = 0; j < dim; ++j) p[j] = (j == 0 ? spacing * static_cast<double>(c) : 0.0) + rng.uniform(-noise, noise);
      pts.push_back(std::move(p));
    }
  }
  return pts;
}

}  // namespace

TEST_CASE("two planted clusters are recovered with k = 2") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pts = planted(6, 2, 8, 10.0, 0.01, seed);
    std::vector<std::size_t> keys(pts.size());
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = 100 + i;
    const auto groups = partition(keys, pts, {});
    REQUIRE(groups.size() == 2);
    CHECK(groups[0] == std::vector<std::size_t>{100, 101, 102, 103, 104, 105});
    CHECK(groups[1] == std::vector<std::size_t>{106, 107, 108, 109, 110, 111});
  }
}

TEST_CASE("three clusters on a triangle are recovered") {
  // Equilateral corners; equally spaced clusters on a line would put the
  // elbow at k = 2.
  const double corners[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {5.0, 8.660254}};
  CounterRng rng(3);
  std::vector<Vector> pts;
  std::vector<std::size_t> keys;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < 5; ++i) {
      pts.push_back({corners[c][0] + rng.uniform(-0.01, 0.01), corners[c][1] + rng.uniform(-0.01, 0.01)});
      keys.push_back(keys.size());
    }
  }
  const auto groups = partition(keys, pts, {});
  REQUIRE(groups.size() == 3);
  for (std::size_t c = 0; c < 3; ++c) CHECK(groups[c] == std::vector<std::size_t>{5 * c, 5 * c + 1, 5 * c + 2, 5 * c + 3, 5 * c + 4});
}

TEST_CASE("identical networks fall back to a balanced split") {
  const std::vector<Vector> pts(7, Vector{1.0, 2.0, 3.0});
  const std::vector<std::size_t> keys{0, 1, 2, 3, 4, 5, 6};
  const auto groups = partition(keys, pts, {});
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].size() + groups[1].size() == 7);
  CHECK(std::max(groups[0].size(), groups[1].size()) == 4);
}

TEST_CASE("two networks split into singletons") {
  const std::vector<Vector> pts{{0.0}, {0.0}};
  const std::vector<std::size_t> keys{4, 9};
  const auto groups = partition(keys, pts, {});
  CHECK(groups == std::vector<std::vector<std::size_t>>{{4}, {9}});
}

TEST_CASE("partition is a disjoint cover of the keys and deterministic") {
  CounterRng rng(1);
  for (std::size_t n = 3; n <= 15; ++n) {
    std::vector<Vector> pts;
    std::vector<std::size_t> keys;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
      keys.push_back(3 * i);
    }
    ClusterConfig cfg;
    cfg.seed = n;
    const auto groups = partition(keys, pts, cfg);
    CHECK(groups.size() >= 2);
    CHECK(groups.size() <= std::min<std::size_t>(10, n));
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& g : groups) {
      CHECK_FALSE(g.empty());
      total += g.size();
      seen.insert(g.begin(), g.end());
    }
    CHECK(total == n);
    CHECK(seen == std::set<std::size_t>(keys.begin(), keys.end()));
    CHECK(partition(keys, pts, cfg) == groups);
  }
}

TEST_CASE("partition argument checks") {
  const std::vector<Vector> pts{{0.0}};
  const std::vector<std::size_t> one{0}, two{0, 1};
  CHECK_THROWS_AS(partition(one, pts, {}), InvalidArgument);
  CHECK_THROWS_AS(partition(two, pts, {}), DimensionMismatch);
}

TEST_CASE("k-means SSE is zero when k equals the number of distinct points") {
  const std::vector<Vector> pts{{0.0}, {1.0}, {5.0}};
  const auto r = kmeans(pts, 3, 0);
  CHECK(r.sse == 0.0);
  CHECK(r.clusters == 3);
  const auto one = kmeans(pts, 1, 0);
  CHECK(one.sse == doctest::Approx(14.0));  // mean 2: 4 + 1 + 9
}

TEST_CASE("elbow rule picks the largest second difference") {
  // Curve with a sharp knee at k = 3.
  const std::vector<double> sse{100, 60, 10, 8, 7};
  CHECK(elbow_k(sse, 4, 10) == 3);
}
