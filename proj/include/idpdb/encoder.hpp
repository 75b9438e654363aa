#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "idpdb/beta.hpp"
#include "idpdb/hyper.hpp"
#include "idpdb/milp_model.hpp"
#include "idpdb/network.hpp"
#include "idpdb/solver.hpp"

namespace idpdb {

inline constexpr double kDefaultTau = 0.01;

struct EncodeOptions {
  /// Hidden hyper-network neurons whose post-activation difference interval
  /// is at most tau wide get the triangle relaxation instead of a binary.
  double tau = kDefaultTau;
  bool relax_if_similar = true;
  bool matching_dependencies = true;
  /// Added to the output-range estimate when sizing the class-disjunction M.
  double big_m_margin = 1.0;
};

struct EncodingStats {
  std::size_t net_binaries = 0;
  std::size_t hyper_binaries = 0;
  std::size_t class_binaries = 0;
  std::size_t stable_net = 0;
  std::size_t stable_hyper = 0;
  std::size_t relaxed_hyper = 0;
  std::size_t matching_rows = 0;
};

/// MILP maximizing beta such that N classifies some x with confidence at
/// least beta while the hyper-network's confidence for the same class is
/// at most zero.
struct BoundProblem {
  MilpModel model;
  std::size_t beta = 0;
  std::vector<std::size_t> inputs;
  std::vector<std::size_t> net_outputs;
  std::vector<std::size_t> hyper_outputs;
  double big_m = 0.0;
  EncodingStats stats;
};

/// Throws InvalidArgument for tau < 0, an invalid class or inconsistent
/// bounds, and DimensionMismatch for mismatched shapes.
BoundProblem encode(const Network& net, const IntervalNetwork& hyper, std::size_t c,
                    const PreActivationBounds& net_bounds, const PreActivationBounds& hyper_bounds,
                    const DifferenceIntervals& diffs, const EncodeOptions& options = {});

struct BoundOutcome {
  Beta beta;
  SolveStatus status = SolveStatus::Optimal;
  /// False when beta is a dual bound from a solve that hit its time limit.
  bool exact = true;
  double seconds = 0.0;
  /// An input attaining the incumbent, when the solver found one.
  std::optional<Vector> witness;
};

/// Solves the problem. Infeasible maps to NoLeakingInputs; a time limit
/// yields the solver's dual bound, marked inexact.
BoundOutcome solve_bound(const BoundProblem& problem, SolverBackend& backend, const SolveLimits& limits);

/// Builds the hyper-network of members, its bounds and difference
/// intervals against net, then encodes and solves.
BoundOutcome bound_for_members(const Network& net, std::span<const Network* const> members,
                               std::size_t c, const EncodeOptions& options, SolverBackend& backend,
                               const SolveLimits& limits);

/// Exhaustive activation-pattern enumeration over both copies (no stable
/// neuron elimination, no relaxation, no matching dependencies), one LP per
/// pattern and class disjunct. Test oracle; throws InvalidArgument when the
/// two copies together have more than 16 ReLUs.
Beta exact_oracle(const Network& net, const IntervalNetwork& hyper, std::size_t c,
                  SolverBackend& backend, const SolveLimits& limits = {});

}  // namespace idpdb
