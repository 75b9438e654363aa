#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "idpdb/network.hpp"

namespace idpdb {

struct DataPoint {
  Vector features;
  std::size_t label = 0;

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

/// Labeled points in [0,1]^d. A point's position is its identity: the
/// leave-one-out family is keyed by index, not by content.
class Dataset {
 public:
  Dataset() = default;
  /// Validates feature range, dimensions and labels.
  Dataset(std::size_t dim, std::size_t num_classes, std::vector<DataPoint> points);

  std::size_t dim() const { return dim_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const DataPoint& operator[](std::size_t i) const { return points_[i]; }
  std::span<const DataPoint> points() const { return points_; }

  /// Stable 64-bit digest of dimensions, features and labels.
  std::uint64_t content_hash() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::size_t num_classes_ = 2;
  std::vector<DataPoint> points_;
};

/// CSV with a header row: d feature columns followed by a "label" column.
/// num_classes defaults to max(2, max label + 1).
Dataset load_dataset_csv(const std::filesystem::path& path, std::size_t num_classes = 0);
void save_dataset_csv(const Dataset& data, const std::filesystem::path& path);

/// Inputs only (no label column); used for query batches.
std::vector<Vector> load_inputs_csv(const std::filesystem::path& path);

}  // namespace idpdb
