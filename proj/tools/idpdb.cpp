// Command-line front end: synth, train, bound, eval, baseline, grid.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "idpdb/access.hpp"
#include "idpdb/bab.hpp"
#include "idpdb/dataset.hpp"
#include "idpdb/errors.hpp"
#include "idpdb/pipeline.hpp"
#include "idpdb/trainer.hpp"

namespace fs = std::filesystem;
using namespace idpdb;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kSolverFailure = 3,
  kTimeout = 4,
};

struct Paths {
  fs::path family = "run/family";
  fs::path bounds = "run/bounds.json";
  fs::path inputs;
  fs::path out;
};

std::vector<std::size_t> resolve_classes(const RunConfig& cfg, std::size_t num_classes) {
  if (cfg.classes.empty()) {
    std::vector<std::size_t> all(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) all[c] = c;
    return all;
  }
  for (std::size_t c : cfg.classes) {
    if (c >= num_classes) throw InvalidArgument("class " + std::to_string(c) + " out of range");
  }
  return cfg.classes;
}

int run_synth(std::size_t n, std::uint64_t seed, const fs::path& out) {
  if (out.empty()) throw InvalidArgument("--out is required");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_dataset_csv(generate_synthetic_2d(n, seed), out);
  std::cerr << "wrote " << n << " points to " << out.string() << '\n';
  return kOk;
}

int run_train(RunConfig cfg, const Paths& paths) {
  if (cfg.dataset.empty()) throw InvalidArgument("--data is required");
  cfg.validate();
  const Dataset data = load_dataset_csv(cfg.dataset);
  cfg.train.seed = cfg.seed;
  const auto start = std::chrono::steady_clock::now();
  const LooFamily family = train_loo_family(data, cfg.architecture, cfg.train, cfg.workers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_family(family, {cfg.architecture, cfg.train, data.content_hash(), data.size()}, paths.family);
  std::fprintf(stderr, "trained %zu networks in %.1fs; full-network training accuracy %.4f\n",
               family.omitted.size() + 1, secs, accuracy(family.full, data));
  return kOk;
}

int run_bound(const RunConfig& cfg, const Paths& paths, bool force) {
  cfg.validate();
  const LooFamily family = load_family(paths.family);
  const auto classes = resolve_classes(cfg, family.full.architecture().output_size());

  BoundsFile bounds;
  if (!force && fs::exists(paths.bounds)) bounds = load_bounds(paths.bounds);
  if (paths.bounds.has_parent_path()) fs::create_directories(paths.bounds.parent_path());
  const bool timing = !cfg.deterministic;

  int code = kOk;
  for (std::size_t c : classes) {
    if (auto it = bounds.find(c); it != bounds.end() && !it->second.timed_out) {
      std::cerr << "class " << c << ": kept bound " << it->second.beta.to_string() << " from "
                << paths.bounds.string() << '\n';
      continue;
    }
    BoundOptions options = cfg.bound_options();
    options.bab.on_pop = [c](const TraceEvent& pop, std::size_t queued) {
      std::fprintf(stderr, "class %zu: pop |S|=%zu anytime=%s exact=%d queued=%zu t=%.2fs\n", c, pop.subset.size(),
                   pop.bound.to_string().c_str(), pop.exact ? 1 : 0, queued, pop.seconds);
    };
    try {
      bounds[c] = compute_bound(family, c, options);
    } catch (const BabAborted& e) {
      BoundResult partial = e.partial();
      partial.exact = false;
      partial.timed_out = true;
      bounds[c] = std::move(partial);
      save_bounds(bounds, paths.bounds, timing);
      throw;
    }
    const BoundResult& r = bounds[c];
    std::cerr << "class " << c << ": beta=" << r.beta.to_string() << " exact=" << r.exact
              << " milps=" << r.milp_count << (r.timed_out ? " (total time limit reached)" : "") << '\n';
    save_bounds(bounds, paths.bounds, timing);
    if (r.timed_out) code = kTimeout;
  }
  return code;
}

void write_query_rows(const fs::path& out, const std::vector<Vector>& inputs,
                      const std::vector<std::size_t>& predicted, const std::vector<QueryResult>& results) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out.empty()) {
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    file.open(out);
    if (!file) throw IoError("cannot write " + out.string());
    os = &file;
  }
  *os << "index,predicted,label,path\n";
  std::size_t agree = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    *os << i << ',' << predicted[i] << ',' << results[i].label << ',' << to_string(results[i].path) << '\n';
    agree += predicted[i] == results[i].label;
  }
  std::fprintf(stderr, "%zu queries; agreement with un-noised prediction %.4f\n", inputs.size(),
               inputs.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(inputs.size()));
}

int run_eval(const RunConfig& cfg, const Paths& paths, const fs::path& network_path) {
  cfg.validate();
  if (paths.inputs.empty()) throw InvalidArgument("--inputs is required");
  const Network net = network_path.empty() ? load_family(paths.family).full : load_network(network_path);
  const auto bounds = class_bounds(load_bounds(paths.bounds), net.architecture().output_size());
  AccessGuard guard(net, bounds, cfg.epsilon, cfg.seed);
  const auto inputs = load_inputs_csv(paths.inputs);
  std::vector<std::size_t> predicted;
  std::vector<QueryResult> results;
  for (const auto& x : inputs) {
    predicted.push_back(predict(net, x));
    results.push_back(guard.query(x));
  }
  write_query_rows(paths.out, inputs, predicted, results);
  return kOk;
}

int run_baseline(const RunConfig& cfg, const Paths& paths, const std::string& mode) {
  cfg.validate();
  if (paths.inputs.empty()) throw InvalidArgument("--inputs is required");
  const LooFamily family = load_family(paths.family);
  const auto inputs = load_inputs_csv(paths.inputs);
  CounterRng rng = CounterRng::substream(cfg.seed, "mechanism");
  std::vector<std::size_t> predicted;
  std::vector<QueryResult> results;
  for (const auto& x : inputs) {
    predicted.push_back(predict(family.full, x));
    results.push_back(mode == "noise" ? naive_noise_query(family.full, x, cfg.epsilon, rng)
                                      : naive_idp_query(family, x, cfg.epsilon, rng));
  }
  write_query_rows(paths.out, inputs, predicted, results);
  return kOk;
}

int run_grid(const Paths& paths, std::size_t resolution) {
  if (paths.out.empty()) throw InvalidArgument("--out is required");
  const LooFamily family = load_family(paths.family);
  const auto bounds = class_bounds(load_bounds(paths.bounds), family.full.architecture().output_size());
  const auto rows = compute_boundary_grid(family.full, bounds, &family, resolution);
  if (paths.out.has_parent_path()) fs::create_directories(paths.out.parent_path());
  write_grid_csv(rows, paths.out);
  std::size_t above = 0, disagree = 0;
  for (const auto& r : rows) {
    above += r.above_bound;
    disagree += !r.agreement.value_or(true);
  }
  std::fprintf(stderr, "%zu grid points: %zu above bound, %zu with member disagreement\n", rows.size(), above,
               disagree);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Individual differential privacy bounds and label-only access for ReLU classifiers"};
  app.set_config("--config", "", "TOML or INI file with option values");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  Paths paths;
  std::size_t n = 100;
  std::size_t resolution = 300;
  std::string mode = "noise";
  fs::path network_path;
  bool force = false;
  std::vector<std::size_t> arch = cfg.architecture.layer_sizes;

  app.add_option("--seed", cfg.seed, "Top-level seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads for training and bounding")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate the 2D synthetic dataset");
  synth->add_option("-n,--count", n, "Number of points")->capture_default_str();
  synth->add_option("-o,--out", paths.out, "Output CSV")->required();

  auto* train = app.add_subcommand("train", "Train the full network and its leave-one-out family");
  train->add_option("--data", cfg.dataset, "Training CSV (features..., label)")->required();
  train->add_option("--arch", arch, "Layer sizes, e.g. 2,16,2")->delimiter(',')->capture_default_str();
  train->add_option("--epochs", cfg.train.epochs)->capture_default_str();
  train->add_option("--batch-size", cfg.train.batch_size)->capture_default_str();
  train->add_option("--lr", cfg.train.learning_rate)->capture_default_str();
  train->add_option("--family", paths.family, "Output family directory")->capture_default_str();

  auto* bound = app.add_subcommand("bound", "Compute per-class bounds by branch-and-bound");
  bound->add_option("--family", paths.family, "Family directory written by `train`")->capture_default_str();
  bound->add_option("--class", cfg.classes, "Classes to bound (default: all)");
  bound->add_option("--tau", cfg.tau, "Relax-if-similar threshold")->capture_default_str();
  bound->add_option("--milp-time-limit", cfg.milp_time_limit_seconds, "Seconds per MILP")->capture_default_str();
  bound->add_option("--total-time-limit", cfg.total_time_limit_seconds, "Seconds per class")->capture_default_str();
  bound->add_option("--deterministic", cfg.deterministic, "Order-independent trace and output")
      ->capture_default_str();
  bound->add_option("--backend", cfg.backend)->capture_default_str();
  bound->add_option("-o,--out", paths.bounds, "Bounds JSON")->capture_default_str();
  bound->add_flag("--force", force, "Recompute classes already present in the bounds file");

  auto* eval = app.add_subcommand("eval", "Answer queries through the guarded access layer");
  eval->add_option("--family", paths.family, "Family directory (its full network is queried)")
      ->capture_default_str();
  eval->add_option("--network", network_path, "Network JSON to use instead of the family's");
  eval->add_option("--bounds", paths.bounds)->capture_default_str();
  eval->add_option("--epsilon", cfg.epsilon)->capture_default_str();
  eval->add_option("--inputs", paths.inputs, "CSV of inputs; a trailing label column is ignored")->required();
  eval->add_option("-o,--out", paths.out, "Output CSV (default: stdout)");

  auto* baseline = app.add_subcommand("baseline", "Answer queries with a naive mechanism");
  baseline->add_option("--mode", mode, "noise or idp")->check(CLI::IsMember({"noise", "idp"}))->capture_default_str();
  baseline->add_option("--family", paths.family)->capture_default_str();
  baseline->add_option("--epsilon", cfg.epsilon)->capture_default_str();
  baseline->add_option("--inputs", paths.inputs)->required();
  baseline->add_option("-o,--out", paths.out, "Output CSV (default: stdout)");

  auto* grid = app.add_subcommand("grid", "Export confidence, bound and agreement over a 2D grid");
  grid->add_option("--family", paths.family)->capture_default_str();
  grid->add_option("--bounds", paths.bounds)->capture_default_str();
  grid->add_option("--resolution", resolution)->capture_default_str();
  grid->add_option("-o,--out", paths.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    cfg.architecture.layer_sizes = arch;
    if (*synth) return run_synth(n, cfg.seed, paths.out);
    if (*train) return run_train(cfg, paths);
    if (*bound) return run_bound(cfg, paths, force);
    if (*eval) return run_eval(cfg, paths, network_path);
    if (*baseline) return run_baseline(cfg, paths, mode);
    if (*grid) return run_grid(paths, resolution);
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
