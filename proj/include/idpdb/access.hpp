#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "idpdb/beta.hpp"
#include "idpdb/network.hpp"
#include "idpdb/rng.hpp"
#include "idpdb/trainer.hpp"

namespace idpdb {

/// Output distribution of the exponential mechanism with the 0/1 utility
/// marking `predicted` and sensitivity 1: weight e^{eps/2} for the
/// predicted class, 1 for the others.
Vector exponential_mechanism_probabilities(std::size_t predicted, std::size_t num_classes, double epsilon);

/// Inverse-CDF draw from that distribution using one uniform variate.
std::size_t exponential_mechanism(std::size_t predicted, std::size_t num_classes, double epsilon, double u);
std::size_t exponential_mechanism(std::size_t predicted, std::size_t num_classes, double epsilon, CounterRng& rng);

enum class QueryPath { Deterministic, Noised, Memo };
std::string_view to_string(QueryPath p);

struct QueryResult {
  std::size_t label = 0;
  QueryPath path = QueryPath::Deterministic;
};

inline constexpr std::size_t kDefaultMemoCapacity = 1'000'000;

/// Label-only access to a network. Inputs whose confidence exceeds their
/// class bound get the predicted label; the rest are answered by the
/// exponential mechanism once and then replayed from the memo.
///
/// query() is thread-safe. Two racing first queries of the same input may
/// both sample; the first to insert wins and later reads return it.
class AccessGuard {
 public:
  AccessGuard(Network net, std::vector<Beta> bounds, double epsilon, std::uint64_t seed,
              std::size_t memo_capacity = kDefaultMemoCapacity);

  QueryResult query(std::span<const double> x);

  const Network& network() const { return net_; }
  const std::vector<Beta>& bounds() const { return bounds_; }
  double epsilon() const { return epsilon_; }
  std::size_t memo_size() const;
  std::size_t memo_capacity() const { return capacity_; }
  /// Number of mechanism draws so far.
  std::uint64_t mechanism_calls() const { return draws_.load(); }

 private:
  Network net_;
  std::vector<Beta> bounds_;
  double epsilon_;
  std::uint64_t key_;
  std::size_t capacity_;
  std::atomic<std::uint64_t> draws_{0};

  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::size_t> memo_;
  std::deque<std::string> order_;  // oldest first
};

/// Noise on every query.
QueryResult naive_noise_query(const Network& net, std::span<const double> x, double epsilon, CounterRng& rng);

/// Deterministic when the full network and every omitted network agree,
/// otherwise noise on the full network's prediction.
QueryResult naive_idp_query(const LooFamily& family, std::span<const double> x, double epsilon, CounterRng& rng);

}  // namespace idpdb
