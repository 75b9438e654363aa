#include "idpdb/hyper.hpp"

#include <string>

#include "idpdb/errors.hpp"

namespace idpdb {

IntervalNetwork::IntervalNetwork(Architecture arch, std::vector<IntervalLayer> layers)
    : arch_(std::move(arch)), layers_(std::move(layers)) {
  arch_.validate();
  if (layers_.size() != arch_.num_layers()) {
    throw DimensionMismatch("interval network layer count does not match architecture");
  }
  for (std::size_t m = 0; m < layers_.size(); ++m) {
    const auto& l = layers_[m];
    if (l.rows != arch_.layer_sizes[m + 1] || l.cols != arch_.layer_sizes[m] ||
        l.weights.size() != l.rows * l.cols || l.bias.size() != l.rows) {
      throw DimensionMismatch("interval layer " + std::to_string(m + 1) + " has the wrong shape");
    }
    for (const auto& iv : l.weights) {
      if (!iv.valid()) throw InvalidArgument("interval layer " + std::to_string(m + 1) + " has an invalid weight interval");
    }
    for (const auto& iv : l.bias) {
      if (!iv.valid()) throw InvalidArgument("interval layer " + std::to_string(m + 1) + " has an invalid bias interval");
    }
  }
}

IntervalNetwork IntervalNetwork::from(const Network& net) {
  const Network* members[] = {&net};
  return build_hyper(std::span<const Network* const>(members));
}

bool IntervalNetwork::contains(const Network& net) const {
  if (!(net.architecture() == arch_)) return false;
  for (std::size_t m = 0; m < layers_.size(); ++m) {
    const auto& il = layers_[m];
    const auto& l = net.layer(m);
    const auto w = l.weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!il.weights[i].contains(w[i])) return false;
    }
    for (std::size_t k = 0; k < l.bias.size(); ++k) {
      if (!il.bias[k].contains(l.bias[k])) return false;
    }
  }
  return true;
}

IntervalNetwork build_hyper(std::span<const Network* const> members) {
  if (members.empty()) throw InvalidArgument("hyper-network needs at least one member");
  const Architecture& arch = members.front()->architecture();
  for (const Network* n : members) {
    if (!(n->architecture() == arch)) {
      throw DimensionMismatch("hyper-network members have different architectures");
    }
  }
  std::vector<IntervalLayer> layers;
  for (std::size_t m = 0; m < arch.num_layers(); ++m) {
    const auto& first = members.front()->layer(m);
    IntervalLayer il;
    il.rows = first.weights.rows();
    il.cols = first.weights.cols();
    for (double w : first.weights.data()) il.weights.push_back(Interval::point(w));
    for (double b : first.bias) il.bias.push_back(Interval::point(b));
    for (const Network* n : members.subspan(1)) {
      const auto& l = n->layer(m);
      const auto w = l.weights.data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        il.weights[i].lo = std::min(il.weights[i].lo, w[i]);
        il.weights[i].hi = std::max(il.weights[i].hi, w[i]);
      }
      for (std::size_t k = 0; k < l.bias.size(); ++k) {
        il.bias[k].lo = std::min(il.bias[k].lo, l.bias[k]);
        il.bias[k].hi = std::max(il.bias[k].hi, l.bias[k]);
      }
    }
    layers.push_back(std::move(il));
  }
  return IntervalNetwork(arch, std::move(layers));
}

IntervalNetwork build_hyper(std::span<const Network> members) {
  std::vector<const Network*> ptrs;
  ptrs.reserve(members.size());
  for (const auto& n : members) ptrs.push_back(&n);
  return build_hyper(std::span<const Network* const>(ptrs));
}

PreActivationBounds propagate_bounds(const IntervalNetwork& hyper, std::span<const Interval> input_box) {
  if (input_box.size() != hyper.architecture().input_size()) {
    throw DimensionMismatch("input box has " + std::to_string(input_box.size()) +
                            " entries, expected " + std::to_string(hyper.architecture().input_size()));
  }
  PreActivationBounds out;
  std::vector<Interval> prev(input_box.begin(), input_box.end());
  for (std::size_t m = 0; m < hyper.num_layers(); ++m) {
    const auto& l = hyper.layer(m);
    std::vector<Interval> pre(l.rows);
    for (std::size_t k = 0; k < l.rows; ++k) {
      Interval s = l.bias[k];
      for (std::size_t j = 0; j < l.cols; ++j) s = s + l.weight(k, j) * prev[j];
      pre[k] = s;
    }
    prev.resize(pre.size());
    for (std::size_t k = 0; k < pre.size(); ++k) prev[k] = relu(pre[k]);
    out.layers.push_back(std::move(pre));
  }
  return out;
}

PreActivationBounds propagate_bounds(const IntervalNetwork& hyper) {
  const std::vector<Interval> box(hyper.architecture().input_size(), Interval{0.0, 1.0});
  return propagate_bounds(hyper, box);
}

PreActivationBounds propagate_bounds(const Network& net) {
  return propagate_bounds(IntervalNetwork::from(net));
}

DifferenceIntervals compute_difference_intervals(const Network& net, const IntervalNetwork& hyper,
                                                 const PreActivationBounds& net_bounds) {
  if (!(net.architecture() == hyper.architecture())) {
    throw DimensionMismatch("network and hyper-network architectures differ");
  }
  if (net_bounds.layers.size() != net.num_layers()) {
    throw DimensionMismatch("pre-activation bounds do not match the network");
  }
  DifferenceIntervals out;
  const std::size_t d = net.architecture().input_size();
  // Layer 0: identical inputs, z ranges over [0,1].
  std::vector<Interval> prev_diff(d, Interval{0.0, 0.0});
  std::vector<Interval> prev_range(d, Interval{0.0, 1.0});
  for (std::size_t m = 0; m < net.num_layers(); ++m) {
    const auto& l = net.layer(m);
    const auto& hl = hyper.layer(m);
    const bool output_layer = (m + 1 == net.num_layers());
    std::vector<Interval> pre(hl.rows);
    std::vector<Interval> post(hl.rows);
    for (std::size_t k = 0; k < hl.rows; ++k) {
      Interval s = hl.bias[k] - Interval::point(l.bias[k]);
      for (std::size_t j = 0; j < hl.cols; ++j) {
        const double w = l.weights(k, j);
        const Interval dw = hl.weight(k, j) - Interval::point(w);
        s = s + w * prev_diff[j] + dw * (prev_range[j] + prev_diff[j]);
      }
      pre[k] = s;
      post[k] = output_layer ? s : Interval{-std::max(0.0, -s.lo), std::max(0.0, s.hi)};
    }
    prev_range.resize(hl.rows);
    for (std::size_t k = 0; k < hl.rows; ++k) prev_range[k] = relu(net_bounds.at(m, k));
    prev_diff = post;
    out.pre.push_back(std::move(pre));
    out.post.push_back(std::move(post));
  }
  return out;
}

namespace {

nlohmann::json intervals_json(const std::vector<std::vector<Interval>>& layers) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& layer : layers) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& iv : layer) row.push_back({iv.lo, iv.hi});
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const PreActivationBounds& bounds) {
  return {{"pre_activation", intervals_json(bounds.layers)}};
}

nlohmann::json to_json(const DifferenceIntervals& diffs) {
  return {{"pre", intervals_json(diffs.pre)}, {"post", intervals_json(diffs.post)}};
}

}  // namespace idpdb
