#pragma once

// Small fixtures shared by the test binaries.

#include <cstdint>
#include <vector>

#include "idpdb/network.hpp"
#include "idpdb/rng.hpp"

namespace idpdb::testing {

inline Network random_network(const Architecture& arch, std::uint64_t seed, double scale = 1.0) {
  CounterRng rng = CounterRng::substream(seed, "test-net");
  std::vector<Layer> layers;
  for (std::size_t m = 0; m < arch.num_layers(); ++m) {
    Layer l{Matrix(arch.layer_sizes[m + 1], arch.layer_sizes[m]), Vector(arch.layer_sizes[m + 1])};
    for (double& w : l.weights.data()) w = rng.uniform(-scale, scale);
    for (double& b : l.bias) b = rng.uniform(-scale, scale);
    layers.push_back(std::move(l));
  }
  return Network(arch, std::move(layers));
}

/// base with every parameter moved by a uniform offset in [-radius, radius].
inline Network perturb(const Network& base, double radius, std::uint64_t seed) {
  CounterRng rng = CounterRng::substream(seed, "test-perturb");
  std::vector<Layer> layers(base.layers().begin(), base.layers().end());
  for (auto& l : layers) {
    for (double& w : l.weights.data()) w += rng.uniform(-radius, radius);
    for (double& b : l.bias) b += rng.uniform(-radius, radius);
  }
  return Network(base.architecture(), std::move(layers));
}

/// Point drawn uniformly from [0,1]^d.
inline Vector random_input(std::size_t d, CounterRng& rng) {
  Vector x(d);
  for (double& v : x) v = rng.uniform();
  return x;
}

/// Forward pass written independently of Network::forward: explicit loops
/// over the layers with no shared helpers.
inline Vector reference_forward(const Network& net, const Vector& x) {
  Vector cur = x;
  for (std::size_t m = 0; m < net.num_layers(); ++m) {
    const Layer& l = net.layer(m);
    Vector next(l.bias.size());
    for (std::size_t r = 0; r < next.size(); ++r) {
      double s = l.bias[r];
      for (std::size_t c = 0; c < cur.size(); ++c) s += l.weights(r, c) * cur[c];
      next[r] = (m + 1 < net.num_layers() && s < 0.0) ? 0.0 : s;
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace idpdb::testing
