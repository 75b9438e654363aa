#include "idpdb/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include "idpdb/errors.hpp"
#include "idpdb/rng.hpp"

namespace idpdb {

std::size_t synthetic_label(double x1, double x2) {
  return x2 > 0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * x1) ? 1 : 0;
}

Dataset generate_synthetic_2d(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("synthetic dataset needs n >= 2");
  CounterRng rng = CounterRng::substream(seed, "data");
  std::vector<DataPoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t want = i % 2;
    while (true) {
      const double x1 = rng.uniform();
      const double x2 = rng.uniform();
      if (synthetic_label(x1, x2) == want) {
        points.push_back({{x1, x2}, want});
        break;
      }
    }
  }
  return Dataset(2, 2, std::move(points));
}

nlohmann::json bounds_to_json(const BoundsFile& bounds, bool include_timing) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [c, r] : bounds) doc[std::to_string(c)] = to_json(r, include_timing);
  return doc;
}

BoundsFile bounds_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw IoError("bounds file must be an object keyed by class");
  BoundsFile out;
  for (const auto& [key, value] : doc.items()) {
    std::size_t c = 0;
    const auto res = std::from_chars(key.data(), key.data() + key.size(), c);
    if (res.ec != std::errc() || res.ptr != key.data() + key.size()) {
      throw IoError("bounds file key \"" + key + "\" is not a class index");
    }
    out.emplace(c, bound_result_from_json(value));
  }
  return out;
}

void save_bounds(const BoundsFile& bounds, const std::filesystem::path& path, bool include_timing) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << bounds_to_json(bounds, include_timing).dump(1) << '\n';
}

BoundsFile load_bounds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read bounds " + path.string() + " (run `bound` first)");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return bounds_from_json(doc);
}

std::vector<Beta> class_bounds(const BoundsFile& bounds, std::size_t num_classes) {
  std::vector<Beta> out;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto it = bounds.find(c);
    if (it == bounds.end()) {
      throw IoError("bounds file has no entry for class " + std::to_string(c) + " (run `bound --class " +
                    std::to_string(c) + "`)");
    }
    out.push_back(it->second.beta);
  }
  return out;
}

std::vector<GridRow> compute_boundary_grid(const Network& net, const std::vector<Beta>& bounds,
                                           const LooFamily* family, std::size_t resolution) {
  if (net.architecture().input_size() != 2) {
    throw DimensionMismatch("boundary grid needs a 2D input, network has " +
                            std::to_string(net.architecture().input_size()) + " features");
  }
  if (resolution == 0) throw InvalidArgument("grid resolution must be positive");
  if (bounds.size() != net.architecture().output_size()) {
    throw DimensionMismatch("one bound per class is required");
  }
  auto coord = [&](std::size_t i) {
    return resolution == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(resolution - 1);
  };
  std::vector<GridRow> rows;
  rows.reserve(resolution * resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const double x[2] = {coord(i), coord(j)};
      const Vector scores = net.forward(x);
      GridRow row{x[0], x[1], 0.0, argmax(scores), false, std::nullopt};
      row.confidence = confidence(scores, row.predicted);
      row.above_bound = bounds[row.predicted].exceeded_by(row.confidence);
      if (family) {
        bool agree = predict(family->full, x) == row.predicted;
        for (const auto& [_, member] : family->omitted) {
          if (!agree) break;
          agree = predict(member, x) == row.predicted;
        }
        row.agreement = agree;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_grid_csv(const std::vector<GridRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "x1,x2,confidence,predicted,above_bound,agreement\n";
  char buf[32];
  auto num = [&](double v) {
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  for (const auto& r : rows) {
    out << num(r.x1) << ',' << num(r.x2) << ',' << num(r.confidence) << ',' << r.predicted << ','
        << (r.above_bound ? "true" : "false") << ',';
    if (r.agreement) out << (*r.agreement ? "true" : "false");
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void RunConfig::validate() const {
  architecture.validate();
  train.validate();
  if (!(tau >= 0.0)) throw InvalidArgument("tau must be >= 0");
  if (!(milp_time_limit_seconds > 0.0)) throw InvalidArgument("per-MILP time limit must be positive");
  if (!(total_time_limit_seconds > 0.0)) throw InvalidArgument("total time limit must be positive");
  if (workers == 0) throw InvalidArgument("workers must be positive");
  if (!(epsilon >= 0.0) || std::isinf(epsilon)) throw InvalidArgument("epsilon must be finite and >= 0");
  if (!dataset.empty() && !std::filesystem::exists(dataset)) {
    throw IoError("dataset " + dataset.string() + " does not exist");
  }
}

BoundOptions RunConfig::bound_options() const {
  BoundOptions o;
  o.encode.tau = tau;
  o.limits.time_limit_seconds = milp_time_limit_seconds;
  o.bab.workers = workers;
  o.bab.deterministic = deterministic;
  o.bab.total_time_limit_seconds = total_time_limit_seconds;
  o.bab.cluster.seed = CounterRng::substream(seed, "cluster").key();
  o.backend = backend;
  return o;
}

nlohmann::json to_json(const RunConfig& cfg) {
  return {{"dataset", cfg.dataset.string()},
          {"output_dir", cfg.output_dir.string()},
          {"architecture", cfg.architecture.layer_sizes},
          {"train", to_json(cfg.train)},
          {"classes", cfg.classes},
          {"tau", cfg.tau},
          {"milp_time_limit_seconds", cfg.milp_time_limit_seconds},
          {"total_time_limit_seconds", cfg.total_time_limit_seconds},
          {"workers", cfg.workers},
          {"deterministic", cfg.deterministic},
          {"epsilon", cfg.epsilon},
          {"backend", cfg.backend},
          {"seed", cfg.seed}};
}

}  // namespace idpdb
