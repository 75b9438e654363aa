#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace idpdb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Binary };

struct Variable {
  std::string name;
  double lower = -kInf;
  double upper = kInf;
  VarType type = VarType::Continuous;
};

struct Term {
  std::size_t var;
  double coef;
};

/// lower <= sum(coef * var) <= upper
struct Constraint {
  std::string name;
  std::vector<Term> terms;
  double lower = -kInf;
  double upper = kInf;
};

/// Backend-neutral mixed-integer linear program with a maximization
/// objective.
class MilpModel {
 public:
  std::size_t add_variable(std::string name, double lower, double upper,
                           VarType type = VarType::Continuous);
  std::size_t add_binary(std::string name) { return add_variable(std::move(name), 0.0, 1.0, VarType::Binary); }
  /// Throws InvalidArgument for unknown variables or an empty range.
  void add_constraint(std::string name, std::vector<Term> terms, double lower, double upper);
  void add_le(std::string name, std::vector<Term> terms, double rhs) { add_constraint(std::move(name), std::move(terms), -kInf, rhs); }
  void add_ge(std::string name, std::vector<Term> terms, double rhs) { add_constraint(std::move(name), std::move(terms), rhs, kInf); }
  void add_eq(std::string name, std::vector<Term> terms, double rhs) { add_constraint(std::move(name), std::move(terms), rhs, rhs); }

  /// Maximize sum(coef * var).
  void set_objective(std::vector<Term> terms);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<Term>& objective() const { return objective_; }

  std::size_t num_binaries() const;
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }

  /// One-line summary used in diagnostics.
  std::string statistics() const;

  /// CPLEX LP text format.
  std::string to_lp_string() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<Term> objective_;
};

}  // namespace idpdb
