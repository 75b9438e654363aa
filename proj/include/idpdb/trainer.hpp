#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "idpdb/dataset.hpp"
#include "idpdb/network.hpp"

namespace idpdb {

/// Mini-batch SGD on mean softmax cross-entropy.
struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 100;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& doc);

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias,
/// drawn from the "init" substream of the seed.
Network initialize_network(const Architecture& arch, std::uint64_t seed);

/// Mean cross-entropy of the batch.
double batch_loss(const Network& net, const Dataset& data, std::span<const std::size_t> batch);

/// Gradient of batch_loss, shaped like the network's layers.
std::vector<Layer> batch_gradient(const Network& net, const Dataset& data,
                                  std::span<const std::size_t> batch, double* loss = nullptr);

Network train(const Dataset& data, const Architecture& arch, const TrainConfig& cfg);

/// Fraction of points whose predicted label matches.
double accuracy(const Network& net, const Dataset& data);

/// Trains on D \ {omitted}. Batches follow the full dataset's per-epoch
/// permutation with the omitted index removed, so the run shares its
/// initialization and shuffle stream with train(data, ...).
Network train_excluding(const Dataset& data, std::size_t omitted, const Architecture& arch,
                        const TrainConfig& cfg);

/// The full network and one network per omitted dataset index.
struct LooFamily {
  Network full;
  std::map<std::size_t, Network> omitted;

  std::vector<std::size_t> indices() const;
  const Network& member(std::size_t index) const;
};

/// Trains 1 + |D| networks. workers > 1 trains members concurrently; the
/// result does not depend on the worker count.
LooFamily train_loo_family(const Dataset& data, const Architecture& arch, const TrainConfig& cfg,
                           std::size_t workers = 1);

struct FamilyManifest {
  Architecture architecture;
  TrainConfig config;
  std::uint64_t dataset_hash = 0;
  std::size_t dataset_size = 0;
};

/// Directory layout: manifest.json, full.json, omitted/<index>.json.
void save_family(const LooFamily& family, const FamilyManifest& manifest,
                 const std::filesystem::path& dir);
LooFamily load_family(const std::filesystem::path& dir, FamilyManifest* manifest = nullptr);

}  // namespace idpdb
