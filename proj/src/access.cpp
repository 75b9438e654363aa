#include "idpdb/access.hpp"

#include <cmath>
#include <cstring>

#include "idpdb/errors.hpp"

namespace idpdb {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || std::isinf(epsilon)) {
    throw InvalidArgument("epsilon must be finite and >= 0, got " + std::to_string(epsilon));
  }
}

void check_input(const Network& net, std::span<const double> x) {
  if (x.size() != net.architecture().input_size()) {
    throw DimensionMismatch("query has " + std::to_string(x.size()) + " features, network expects " +
                            std::to_string(net.architecture().input_size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
      throw InvalidArgument("query feature " + std::to_string(i) + " outside [0,1]");
    }
  }
}

std::string fingerprint(std::span<const double> x) {
  std::string key(x.size() * sizeof(double), '\0');
  std::memcpy(key.data(), x.data(), key.size());
  return key;
}

}  // namespace

Vector exponential_mechanism_probabilities(std::size_t predicted, std::size_t num_classes, double epsilon) {
  check_epsilon(epsilon);
  if (num_classes < 2) throw InvalidArgument("exponential mechanism needs at least two classes");
  if (predicted >= num_classes) throw InvalidArgument("predicted class out of range");
  // Dividing through by e^{eps/2} keeps large budgets finite.
  const double other = std::exp(-epsilon / 2.0);
  const double z = 1.0 + static_cast<double>(num_classes - 1) * other;
  Vector p(num_classes, other / z);
  p[predicted] = 1.0 / z;
  return p;
}

std::size_t exponential_mechanism(std::size_t predicted, std::size_t num_classes, double epsilon, double u) {
  const Vector p = exponential_mechanism_probabilities(predicted, num_classes, epsilon);
  double cdf = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    cdf += p[c];
    if (u < cdf) return c;
  }
  return num_classes - 1;
}

std::size_t exponential_mechanism(std::size_t predicted, std::size_t num_classes, double epsilon, CounterRng& rng) {
  return exponential_mechanism(predicted, num_classes, epsilon, rng.uniform());
}

std::string_view to_string(QueryPath p) {
  switch (p) {
    case QueryPath::Deterministic:
      return "deterministic";
    case QueryPath::Noised:
      return "noised";
    case QueryPath::Memo:
      return "memo";
  }
  return "unknown";
}

AccessGuard::AccessGuard(Network net, std::vector<Beta> bounds, double epsilon, std::uint64_t seed,
                         std::size_t memo_capacity)
    : net_(std::move(net)),
      bounds_(std::move(bounds)),
      epsilon_(epsilon),
      key_(CounterRng::substream(seed, "mechanism").key()),
      capacity_(memo_capacity) {
  check_epsilon(epsilon);
  if (bounds_.size() != net_.architecture().output_size()) {
    throw DimensionMismatch("guard has " + std::to_string(bounds_.size()) + " class bounds, network has " +
                            std::to_string(net_.architecture().output_size()) + " classes");
  }
  if (capacity_ == 0) throw InvalidArgument("memo capacity must be positive");
}

std::size_t AccessGuard::memo_size() const {
  std::lock_guard lock(mutex_);
  return memo_.size();
}

QueryResult AccessGuard::query(std::span<const double> x) {
  check_input(net_, x);
  std::string key = fingerprint(x);
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return {it->second, QueryPath::Memo};
  }

  const Vector scores = net_.forward(x);
  const std::size_t c = argmax(scores);
  if (bounds_[c].exceeded_by(confidence(scores, c))) return {c, QueryPath::Deterministic};

  // Draw i uses counter i of the guard's stream, so a fixed query order
  // reproduces the same labels.
  CounterRng rng(key_, draws_.fetch_add(1));
  const std::size_t label = exponential_mechanism(c, scores.size(), epsilon_, rng);

  std::lock_guard lock(mutex_);
  const auto [it, inserted] = memo_.emplace(key, label);
  if (!inserted) return {it->second, QueryPath::Memo};
  order_.push_back(std::move(key));
  if (order_.size() > capacity_) {
    memo_.erase(order_.front());
    order_.pop_front();
  }
  return {label, QueryPath::Noised};
}

QueryResult naive_noise_query(const Network& net, std::span<const double> x, double epsilon, CounterRng& rng) {
  check_input(net, x);
  const std::size_t c = predict(net, x);
  return {exponential_mechanism(c, net.architecture().output_size(), epsilon, rng), QueryPath::Noised};
}

QueryResult naive_idp_query(const LooFamily& family, std::span<const double> x, double epsilon, CounterRng& rng) {
  check_input(family.full, x);
  const std::size_t c = predict(family.full, x);
  for (const auto& [_, member] : family.omitted) {
    if (predict(member, x) != c) {
      return {exponential_mechanism(c, family.full.architecture().output_size(), epsilon, rng),
              QueryPath::Noised};
    }
  }
  return {c, QueryPath::Deterministic};
}

}  // namespace idpdb
