#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "idpdb/network.hpp"

namespace idpdb {

struct ClusterConfig {
  /// Upper end of the k range; the range is [2, min(max_k, |S|)].
  std::size_t max_k = 10;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 100;
  /// Lloyd restarts per k; the lowest SSE wins.
  std::size_t restarts = 3;
};

struct KMeansResult {
  std::vector<std::size_t> assignment;  // cluster id per point
  std::size_t clusters = 0;             // non-empty clusters
  double sse = 0.0;                     // within-cluster sum of squares
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a seed.
/// Empty clusters are dropped and ids are compacted.
KMeansResult kmeans(std::span<const Vector> points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations = 100, std::size_t restarts = 3);

/// Elbow rule: given sse[k-1] for k = 1..K, the k in [2, k_max] maximizing
/// sse(k-1) - 2 sse(k) + sse(k+1), with sse(K+1) taken as 0 once k reaches
/// the number of points and as sse(K) otherwise. Ties go to the smaller k.
std::size_t elbow_k(std::span<const double> sse, std::size_t k_max, std::size_t num_points);

/// Splits keys (|keys| >= 2) into disjoint non-empty groups by clustering
/// their parameter vectors. Falls back to a balanced two-way split by
/// distance to the centroid when clustering yields a single group.
/// Groups are ordered by their smallest key; keys keep their input order.
std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> keys,
                                                std::span<const Vector> params,
                                                const ClusterConfig& config);

}  // namespace idpdb
