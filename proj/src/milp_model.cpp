#include "idpdb/milp_model.hpp"

#include <cmath>
#include <sstream>

#include "idpdb/errors.hpp"

namespace idpdb {

std::size_t MilpModel::add_variable(std::string name, double lower, double upper, VarType type) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw InvalidArgument("variable " + name + " has an empty or NaN domain");
  }
  vars_.push_back(Variable{std::move(name), lower, upper, type});
  return vars_.size() - 1;
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, double lower, double upper) {
  for (const auto& t : terms) {
    if (t.var >= vars_.size()) {
      throw InvalidArgument("constraint " + name + " references undeclared variable " + std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) throw InvalidArgument("constraint " + name + " has a non-finite coefficient");
  }
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw InvalidArgument("constraint " + name + " has an empty or NaN range");
  }
  rows_.push_back(Constraint{std::move(name), std::move(terms), lower, upper});
}

void MilpModel::set_objective(std::vector<Term> terms) {
  for (const auto& t : terms) {
    if (t.var >= vars_.size()) throw InvalidArgument("objective references an undeclared variable");
  }
  objective_ = std::move(terms);
}

std::size_t MilpModel::num_binaries() const {
  std::size_t n = 0;
  for (const auto& v : vars_) n += (v.type == VarType::Binary) ? 1 : 0;
  return n;
}

std::string MilpModel::statistics() const {
  std::ostringstream os;
  os << num_variables() << " variables (" << num_binaries() << " binary), " << num_constraints()
     << " constraints";
  return os.str();
}

namespace {

void write_terms(std::ostream& os, const std::vector<Variable>& vars, const std::vector<Term>& terms) {
  if (terms.empty()) {
    os << " 0 " << vars.front().name;
    return;
  }
  for (const auto& t : terms) {
    os << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << " " << vars[t.var].name;
  }
}

}  // namespace

std::string MilpModel::to_lp_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "Maximize\n obj:";
  write_terms(os, vars_, objective_);
  os << "\nSubject To\n";
  for (const auto& r : rows_) {
    if (r.lower == r.upper) {
      os << " " << r.name << ":";
      write_terms(os, vars_, r.terms);
      os << " = " << r.upper << "\n";
      continue;
    }
    if (std::isfinite(r.lower)) {
      os << " " << r.name << (std::isfinite(r.upper) ? "_lo" : "") << ":";
      write_terms(os, vars_, r.terms);
      os << " >= " << r.lower << "\n";
    }
    if (std::isfinite(r.upper)) {
      os << " " << r.name << (std::isfinite(r.lower) ? "_hi" : "") << ":";
      write_terms(os, vars_, r.terms);
      os << " <= " << r.upper << "\n";
    }
  }
  os << "Bounds\n";
  for (const auto& v : vars_) {
    if (v.type == VarType::Binary) continue;
    if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
      os << " " << v.name << " free\n";
    } else {
      os << " ";
      if (std::isfinite(v.lower)) os << v.lower; else os << "-inf";
      os << " <= " << v.name << " <= ";
      if (std::isfinite(v.upper)) os << v.upper; else os << "+inf";
      os << "\n";
    }
  }
  bool any_binary = false;
  for (const auto& v : vars_) {
    if (v.type != VarType::Binary) continue;
    if (!any_binary) os << "Binaries\n";
    any_binary = true;
    os << " " << v.name << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace idpdb
