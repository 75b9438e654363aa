#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "idpdb/interval.hpp"
#include "idpdb/network.hpp"

namespace idpdb {

struct IntervalLayer {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Interval> weights;  // row-major, rows x cols
  std::vector<Interval> bias;

  Interval weight(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }
};

/// A network whose parameters are intervals. It abstracts every concrete
/// network of the same architecture whose parameters lie in the intervals.
class IntervalNetwork {
 public:
  IntervalNetwork() = default;
  IntervalNetwork(Architecture arch, std::vector<IntervalLayer> layers);

  /// Degenerate intervals [p, p] around every parameter of net.
  static IntervalNetwork from(const Network& net);

  const Architecture& architecture() const { return arch_; }
  std::size_t num_layers() const { return layers_.size(); }
  const IntervalLayer& layer(std::size_t m) const { return layers_[m]; }

  /// True when every parameter of net lies inside its interval.
  bool contains(const Network& net) const;

 private:
  Architecture arch_;
  std::vector<IntervalLayer> layers_;
};

/// Entrywise [min, max] over the members. Throws DimensionMismatch when
/// architectures differ and InvalidArgument when members is empty.
IntervalNetwork build_hyper(std::span<const Network* const> members);
IntervalNetwork build_hyper(std::span<const Network> members);

/// Pre-activation bounds [l, u] for every neuron of layers 1..L, valid for
/// all inputs in the box (default [0,1]^d).
struct PreActivationBounds {
  std::vector<std::vector<Interval>> layers;

  const Interval& at(std::size_t m, std::size_t k) const { return layers[m][k]; }
};

PreActivationBounds propagate_bounds(const Network& net);
PreActivationBounds propagate_bounds(const IntervalNetwork& hyper);
PreActivationBounds propagate_bounds(const IntervalNetwork& hyper, std::span<const Interval> input_box);

/// Bounds on z#_{m,k} - z_{m,k} between a hyper-network and a concrete
/// network under the same input. pre holds the weighted-sum differences;
/// post holds the differences after ReLU (identical to pre on the output
/// layer, which has no ReLU).
struct DifferenceIntervals {
  std::vector<std::vector<Interval>> pre;
  std::vector<std::vector<Interval>> post;
};

DifferenceIntervals compute_difference_intervals(const Network& net, const IntervalNetwork& hyper,
                                                 const PreActivationBounds& net_bounds);

nlohmann::json to_json(const PreActivationBounds& bounds);
nlohmann::json to_json(const DifferenceIntervals& diffs);

}  // namespace idpdb
