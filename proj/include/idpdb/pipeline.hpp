#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idpdb/bab.hpp"
#include "idpdb/dataset.hpp"
#include "idpdb/trainer.hpp"

namespace idpdb {

/// Two-class points in [0,1]^2 separated by x2 = 0.5 + 0.25 sin(2 pi x1).
/// Labels alternate 0,1,0,... and each point is rejection-sampled until it
/// lands on its side, so the classes differ in size by at most one.
Dataset generate_synthetic_2d(std::size_t n, std::uint64_t seed);

/// The synthetic decision rule.
std::size_t synthetic_label(double x1, double x2);

/// Per-class bounds as written by the `bound` command.
using BoundsFile = std::map<std::size_t, BoundResult>;

nlohmann::json bounds_to_json(const BoundsFile& bounds, bool include_timing = true);
BoundsFile bounds_from_json(const nlohmann::json& doc);
void save_bounds(const BoundsFile& bounds, const std::filesystem::path& path, bool include_timing = true);
BoundsFile load_bounds(const std::filesystem::path& path);

/// One bound per class; throws if a class is missing from the file.
std::vector<Beta> class_bounds(const BoundsFile& bounds, std::size_t num_classes);

struct GridRow {
  double x1 = 0.0;
  double x2 = 0.0;
  double confidence = 0.0;  // of the predicted class
  std::size_t predicted = 0;
  bool above_bound = false;  // confidence > beta of the predicted class
  std::optional<bool> agreement;  // every family member predicts the same
};

/// resolution^2 points x = i / (resolution - 1) per axis (a single point at
/// 0.5 when resolution is 1). family may be null, which leaves the
/// agreement column empty.
std::vector<GridRow> compute_boundary_grid(const Network& net, const std::vector<Beta>& bounds,
                                           const LooFamily* family, std::size_t resolution);
void write_grid_csv(const std::vector<GridRow>& rows, const std::filesystem::path& path);

/// Settings shared by the command-line tools. Defaults follow the usual
/// experiment setup: tau 0.01, 40 minutes per MILP, 8 hours per class.
struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path output_dir = "run";
  Architecture architecture{{2, 16, 2}};
  TrainConfig train;
  std::vector<std::size_t> classes;  // empty: every class
  double tau = kDefaultTau;
  double milp_time_limit_seconds = 2400.0;
  double total_time_limit_seconds = 8.0 * 3600.0;
  std::size_t workers = 4;
  bool deterministic = true;
  double epsilon = 1.0;
  std::string backend = "highs";
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on non-positive limits or workers, negative
  /// tau or epsilon; IoError when the dataset path is set but missing.
  void validate() const;

  BoundOptions bound_options() const;
};

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace idpdb
