#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idpdb/beta.hpp"
#include "idpdb/encoder.hpp"
#include "idpdb/errors.hpp"
#include "idpdb/kmeans.hpp"
#include "idpdb/solver.hpp"
#include "idpdb/trainer.hpp"

namespace idpdb {

/// Bound of one subset S of dataset indices.
struct SubsetBound {
  Beta bound;
  SolveStatus status = SolveStatus::Optimal;
  bool exact = true;
  double seconds = 0.0;
};

/// Computes subset bounds. Each worker owns one analyzer, so
/// implementations need not be thread-safe.
class SubsetAnalyzer {
 public:
  virtual ~SubsetAnalyzer() = default;
  virtual SubsetBound analyze(std::span<const std::size_t> subset) = 0;
};

using AnalyzerFactory = std::function<std::unique_ptr<SubsetAnalyzer>()>;

enum class TraceKind { Solve, Pop };

struct TraceEvent {
  TraceKind kind = TraceKind::Solve;
  std::vector<std::size_t> subset;
  Beta bound;
  SolveStatus status = SolveStatus::Optimal;
  bool exact = true;
  double seconds = 0.0;
};

struct QueuedTask {
  std::vector<std::size_t> subset;
  Beta bound;
  bool exact = true;
};

struct BoundResult {
  Beta beta;
  /// False when the returned bound is an overapproximation: the singleton
  /// it came from hit a solver time limit, or the run hit its total limit.
  bool exact = true;
  bool timed_out = false;
  std::size_t milp_count = 0;
  std::vector<TraceEvent> trace;
  /// Tasks still queued at termination.
  std::vector<QueuedTask> remaining;
};

struct BabConfig {
  std::size_t workers = 4;
  /// Pushes each batch's results in list order so the trace and result do
  /// not depend on solve completion order.
  bool deterministic = true;
  double total_time_limit_seconds = 8.0 * 3600.0;
  ClusterConfig cluster;
  /// Called after every pop with the popped task and the anytime bound.
  std::function<void(const TraceEvent& pop, std::size_t queued)> on_pop;
};

/// Raised when a subset analysis fails; carries the trace so far and the
/// last anytime bound.
class BabAborted : public SolverFailure {
 public:
  BabAborted(const std::string& what, BoundResult partial)
      : SolverFailure(what), partial_(std::move(partial)) {}
  const BoundResult& partial() const { return partial_; }

 private:
  BoundResult partial_;
};

/// Lazy best-first branch-and-bound over subsets of the indices. params
/// maps each index to the flattened parameters of its network (used for
/// clustering).
BoundResult branch_and_bound(std::span<const std::size_t> indices,
                             const std::map<std::size_t, Vector>& params,
                             const AnalyzerFactory& make_analyzer, const BabConfig& config);

struct BoundOptions {
  EncodeOptions encode;
  SolveLimits limits;
  BabConfig bab;
  std::string backend = "highs";
};

/// Analyzer that bounds a subset with the hyper-network MILP of the
/// family's omitted networks against the full network.
class MilpSubsetAnalyzer final : public SubsetAnalyzer {
 public:
  MilpSubsetAnalyzer(const LooFamily& family, std::size_t c, EncodeOptions encode, SolveLimits limits,
                     std::unique_ptr<SolverBackend> backend);
  SubsetBound analyze(std::span<const std::size_t> subset) override;

 private:
  const LooFamily& family_;
  std::size_t class_;
  EncodeOptions encode_;
  SolveLimits limits_;
  std::unique_ptr<SolverBackend> backend_;
};

/// The deterministic bound of class c over the whole family.
BoundResult compute_bound(const LooFamily& family, std::size_t c, const BoundOptions& options);

/// One MILP per omitted network; the bound is their maximum.
struct NaiveBound {
  Beta beta;
  std::map<std::size_t, SubsetBound> per_point;
};
NaiveBound naive_bound(const LooFamily& family, std::size_t c, const BoundOptions& options);

nlohmann::json to_json(const BoundResult& result, bool include_timing = true);
BoundResult bound_result_from_json(const nlohmann::json& doc);

}  // namespace idpdb
