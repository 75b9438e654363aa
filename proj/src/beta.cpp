#include "idpdb/beta.hpp"

#include <charconv>
#include <cmath>

#include "idpdb/errors.hpp"

namespace idpdb {

std::string Beta::to_string() const {
  if (!value_) return kNoLeakingInputs;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, *value_);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const Beta& b) {
  if (b.is_no_leaking_inputs()) return kNoLeakingInputs;
  return b.value();
}

Beta beta_from_json(const nlohmann::json& doc) {
  if (doc.is_string()) {
    if (doc.get<std::string>() == kNoLeakingInputs) return Beta::no_leaking_inputs();
    throw IoError("bound must be a number or \"" + std::string(kNoLeakingInputs) + "\", got \"" +
                  doc.get<std::string>() + "\"");
  }
  if (!doc.is_number()) throw IoError("bound must be a number or \"" + std::string(kNoLeakingInputs) + "\"");
  const double v = doc.get<double>();
  if (std::isnan(v)) throw IoError("bound is NaN");
  return Beta(v);
}

}  // namespace idpdb
