#include "idpdb/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "idpdb/errors.hpp"
#include "idpdb/rng.hpp"

namespace idpdb {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Vector centroid(std::span<const Vector> points, std::span<const std::size_t> members) {
  Vector c(points.front().size(), 0.0);
  for (std::size_t i : members) {
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += points[i][j];
  }
  for (double& v : c) v /= static_cast<double>(members.size());
  return c;
}

KMeansResult lloyd(std::span<const Vector> points, std::size_t k, CounterRng& rng, std::size_t max_iterations) {
  const std::size_t n = points.size();
  // k-means++ seeding.
  std::vector<Vector> centers;
  centers.push_back(points[rng.below(n)]);
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(points[i], c));
      d2[i] = best;
      total += best;
    }
    if (!(total > 0.0)) break;  // every point coincides with a center
    double target = rng.uniform() * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      target -= d2[i];
      if (target < 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(points[pick]);
  }

  std::vector<std::size_t> assign(n, 0);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = (iter == 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(points[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) changed = true;
      assign[i] = best;
    }
    if (!changed) break;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] == c) members.push_back(i);
      }
      if (!members.empty()) centers[c] = centroid(points, members);
    }
  }

  // Compact ids in order of first appearance and compute the SSE.
  std::map<std::size_t, std::size_t> remap;
  KMeansResult r;
  r.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, inserted] = remap.emplace(assign[i], remap.size());
    r.assignment[i] = it->second;
    r.sse += sq_dist(points[i], centers[assign[i]]);
  }
  r.clusters = remap.size();
  return r;
}

}  // namespace

KMeansResult kmeans(std::span<const Vector> points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations, std::size_t restarts) {
  if (points.empty()) throw InvalidArgument("k-means needs at least one point");
  if (k == 0) throw InvalidArgument("k-means needs k >= 1");
  k = std::min(k, points.size());
  CounterRng rng(mix64(seed ^ (0x9e3779b97f4a7c15ULL * k)));
  KMeansResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    auto candidate = lloyd(points, k, rng, max_iterations);
    if (candidate.sse < best.sse) best = std::move(candidate);
  }
  return best;
}

std::size_t elbow_k(std::span<const double> sse, std::size_t k_max, std::size_t num_points) {
  auto at = [&](std::size_t k) -> double {
    if (k <= sse.size()) return sse[k - 1];
    return k > num_points ? 0.0 : sse.back();
  };
  std::size_t best_k = 2;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k <= k_max; ++k) {
    const double second = at(k - 1) - 2.0 * at(k) + at(k + 1);
    if (second > best) {
      best = second;
      best_k = k;
    }
  }
  return best_k;
}

std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> keys,
                                                std::span<const Vector> params,
                                                const ClusterConfig& config) {
  if (keys.size() != params.size()) throw DimensionMismatch("partition: keys and parameter vectors differ in count");
  if (keys.size() < 2) throw InvalidArgument("partition needs at least two networks");
  const std::size_t n = keys.size();
  if (n == 2) return {{keys[0]}, {keys[1]}};

  const std::size_t k_max = std::min<std::size_t>(std::max<std::size_t>(config.max_k, 2), n);
  const std::size_t k_eval = std::min(k_max + 1, n);
  std::vector<double> sse;
  std::vector<KMeansResult> runs;
  for (std::size_t k = 1; k <= k_eval; ++k) {
    runs.push_back(kmeans(params, k, config.seed, config.max_iterations, config.restarts));
    sse.push_back(runs.back().sse);
  }
  // Enforce a non-increasing curve so local-optimum noise cannot fake an elbow.
  for (std::size_t i = 1; i < sse.size(); ++i) sse[i] = std::min(sse[i], sse[i - 1]);
  const std::size_t k = elbow_k(sse, k_max, n);
  const KMeansResult& chosen = runs[k - 1];

  std::vector<std::vector<std::size_t>> groups(chosen.clusters);
  for (std::size_t i = 0; i < n; ++i) groups[chosen.assignment[i]].push_back(keys[i]);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });

  if (groups.size() < 2) {
    // Balanced split: the half farthest from the centroid versus the rest.
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Vector c = centroid(params, all);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = sq_dist(params[i], c);
    std::stable_sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    std::vector<bool> near(n, false);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) near[all[i]] = true;
    groups.assign(2, {});
    for (std::size_t i = 0; i < n; ++i) groups[near[i] ? 0 : 1].push_back(keys[i]);
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
  });
  return groups;
}

}  // namespace idpdb
