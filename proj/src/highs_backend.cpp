#include <chrono>
#include <string>

#include "Highs.h"
#include "idpdb/errors.hpp"
#include "idpdb/solver.hpp"

namespace idpdb {

namespace {

class HighsBackend final : public SolverBackend {
 public:
  std::string_view name() const override { return "highs"; }

  SolveResult solve(const MilpModel& model, const SolveLimits& limits) override {
    Highs highs;
    highs.setOptionValue("output_flag", false);
    highs.setOptionValue("time_limit", limits.time_limit_seconds);
    highs.setOptionValue("mip_abs_gap", limits.mip_abs_gap);
    highs.setOptionValue("mip_rel_gap", 0.0);
    highs.setOptionValue("primal_feasibility_tolerance", limits.feasibility_tolerance);
    highs.setOptionValue("mip_feasibility_tolerance", limits.feasibility_tolerance);
    if (limits.deterministic) highs.setOptionValue("random_seed", 0);

    HighsLp lp;
    const auto& vars = model.variables();
    const auto& rows = model.constraints();
    lp.num_col_ = static_cast<HighsInt>(vars.size());
    lp.num_row_ = static_cast<HighsInt>(rows.size());
    lp.sense_ = ObjSense::kMaximize;
    lp.col_cost_.assign(vars.size(), 0.0);
    for (const auto& t : model.objective()) lp.col_cost_[t.var] += t.coef;
    bool has_integer = false;
    lp.integrality_.assign(vars.size(), HighsVarType::kContinuous);
    for (std::size_t j = 0; j < vars.size(); ++j) {
      lp.col_lower_.push_back(vars[j].lower);
      lp.col_upper_.push_back(vars[j].upper);
      if (vars[j].type == VarType::Binary) {
        lp.integrality_[j] = HighsVarType::kInteger;
        has_integer = true;
      }
    }
    if (!has_integer) lp.integrality_.clear();
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = lp.num_col_;
    lp.a_matrix_.num_row_ = lp.num_row_;
    lp.a_matrix_.start_.assign(1, 0);
    lp.a_matrix_.index_.clear();
    lp.a_matrix_.value_.clear();
    for (const auto& r : rows) {
      lp.row_lower_.push_back(r.lower);
      lp.row_upper_.push_back(r.upper);
      for (const auto& t : r.terms) {
        lp.a_matrix_.index_.push_back(static_cast<HighsInt>(t.var));
        lp.a_matrix_.value_.push_back(t.coef);
      }
      lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
    }

    if (highs.passModel(std::move(lp)) == HighsStatus::kError) {
      throw SolverFailure("highs rejected the model: " + model.statistics());
    }

    const auto start = std::chrono::steady_clock::now();
    const HighsStatus run_status = highs.run();
    SolveResult result;
    result.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (run_status == HighsStatus::kError) {
      throw SolverFailure("highs run failed: " + model.statistics());
    }

    auto status = highs.getModelStatus();
    if (status == HighsModelStatus::kUnboundedOrInfeasible) {
      // Presolve cannot always tell the two apart; the simplex can.
      highs.setOptionValue("presolve", "off");
      if (highs.run() == HighsStatus::kError) {
        throw SolverFailure("highs run failed: " + model.statistics());
      }
      status = highs.getModelStatus();
    }
    const auto& info = highs.getInfo();
    const bool mip = has_integer;
    auto take_solution = [&] {
      if (info.primal_solution_status == kSolutionStatusFeasible) {
        result.incumbent = info.objective_function_value;
        result.solution = highs.getSolution().col_value;
      }
    };
    switch (status) {
      case HighsModelStatus::kOptimal:
        result.status = SolveStatus::Optimal;
        take_solution();
        result.dual_bound = mip ? info.mip_dual_bound : info.objective_function_value;
        if (!result.incumbent) {
          throw SolverFailure("highs reported optimal without a feasible solution: " + model.statistics());
        }
        break;
      case HighsModelStatus::kInfeasible:
        result.status = SolveStatus::Infeasible;
        result.dual_bound = -kInf;
        break;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kSolutionLimit:
      case HighsModelStatus::kInterrupt:
        result.status = SolveStatus::TimeLimit;
        take_solution();
        result.dual_bound = mip ? info.mip_dual_bound : kInf;
        if (!(result.dual_bound < kInf)) result.dual_bound = kInf;
        break;
      default:
        throw SolverFailure("highs returned status '" + highs.modelStatusToString(status) +
                            "': " + model.statistics());
    }
    return result;
  }
};

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

SolveStatus solve_status_from_string(std::string_view s) {
  if (s == "optimal") return SolveStatus::Optimal;
  if (s == "infeasible") return SolveStatus::Infeasible;
  if (s == "time_limit") return SolveStatus::TimeLimit;
  throw InvalidArgument("unknown solve status '" + std::string(s) + "'");
}

std::unique_ptr<SolverBackend> make_backend(std::string_view name) {
  if (name == "highs") return std::make_unique<HighsBackend>();
  throw InvalidArgument("unknown MILP backend '" + std::string(name) + "' (available: highs)");
}

std::vector<std::string> available_backends() { return {"highs"}; }

}  // namespace idpdb
