#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idpdb/milp_model.hpp"

namespace idpdb {

enum class SolveStatus { Optimal, Infeasible, TimeLimit };

std::string_view to_string(SolveStatus status);
SolveStatus solve_status_from_string(std::string_view s);

struct SolveLimits {
  double time_limit_seconds = 40.0 * 60.0;
  double mip_abs_gap = 1e-6;
  double feasibility_tolerance = 1e-7;
  bool deterministic = true;
};

/// Outcome of one maximization. On Optimal, incumbent is within mip_abs_gap
/// of dual_bound. On TimeLimit, dual_bound is still a valid upper bound.
struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<double> incumbent;
  double dual_bound = kInf;
  double solve_seconds = 0.0;
  std::vector<double> solution;  // empty when no incumbent
};

/// A MILP solver. One in-flight solve per instance; use separate instances
/// for concurrent solves.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string_view name() const = 0;
  /// Throws SolverFailure (with model statistics in the message) for
  /// errors, unbounded models and other unexpected outcomes.
  virtual SolveResult solve(const MilpModel& model, const SolveLimits& limits) = 0;
};

/// Known names: "highs".
std::unique_ptr<SolverBackend> make_backend(std::string_view name);
std::vector<std::string> available_backends();

}  // namespace idpdb
