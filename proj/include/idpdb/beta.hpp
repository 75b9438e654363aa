#pragma once

#include <compare>
#include <optional>
#include <string>

#include "json.hpp"

namespace idpdb {

/// A confidence bound, or the NoLeakingInputs sentinel that orders below
/// every real value (the bound problem was infeasible: no input can leak).
class Beta {
 public:
  constexpr Beta() = default;
  constexpr explicit Beta(double v) : value_(v) {}

  static constexpr Beta no_leaking_inputs() { return Beta(); }

  constexpr bool is_no_leaking_inputs() const { return !value_.has_value(); }
  constexpr bool has_value() const { return value_.has_value(); }
  double value() const { return value_.value(); }

  /// Confidence strictly above the bound; always true for NoLeakingInputs.
  constexpr bool exceeded_by(double confidence) const { return !value_ || confidence > *value_; }

  friend constexpr std::partial_ordering operator<=>(const Beta& a, const Beta& b) {
    if (!a.value_ || !b.value_) return a.value_.has_value() <=> b.value_.has_value();
    return *a.value_ <=> *b.value_;
  }
  friend constexpr bool operator==(const Beta& a, const Beta& b) = default;

  std::string to_string() const;

 private:
  std::optional<double> value_;
};

inline constexpr const char* kNoLeakingInputs = "no_leaking_inputs";

nlohmann::json to_json(const Beta& b);
Beta beta_from_json(const nlohmann::json& doc);

}  // namespace idpdb
