#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "teleportsim/quantum.hpp"
#include "teleportsim/rng.hpp"

namespace tsim::test {

inline PureState random_pure_state(Rng& rng, int dim) {
  std::vector<cplx> amps(static_cast<std::size_t>(dim));
  for (auto& a : amps) a = cplx(rng.normal(), rng.normal());
  return PureState(dim, std::move(amps), /*renormalize=*/true);
}

// Mixture of dim+1 random pure states; full rank with probability 1.
inline DensityMatrix random_density(Rng& rng, int dim) {
  ComplexMatrix m(dim);
  double total = 0;
  std::vector<double> w(static_cast<std::size_t>(dim) + 1);
  for (auto& x : w) {
    x = rng.uniform() + 1e-3;
    total += x;
  }
  for (auto& x : w) x /= total;
  for (double weight : w) m = m + random_pure_state(rng, dim).outer() * cplx(weight);
  return DensityMatrix::from_matrix(m);
}

// Minimal JSON-schema subset validator: type, properties, required, items,
// enum, additionalProperties. Enough to pin the shipped report schemas.
inline bool validate_schema(const nlohmann::json& schema, const nlohmann::json& value,
                            std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (schema.contains("type")) {
    const auto matches = [&](const std::string& t) {
      if (t == "object") return value.is_object();
      if (t == "array") return value.is_array();
      if (t == "string") return value.is_string();
      if (t == "number") return value.is_number();
      if (t == "integer") return value.is_number_integer();
      if (t == "boolean") return value.is_boolean();
      if (t == "null") return value.is_null();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_array()) {
      for (const auto& t : schema["type"]) ok = ok || matches(t.get<std::string>());
    } else {
      ok = matches(schema["type"].get<std::string>());
    }
    if (!ok) return fail("type mismatch: " + schema["type"].dump() + " vs " + value.dump().substr(0, 80));
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& e : schema["enum"]) ok = ok || (e == value);
    if (!ok) return fail("enum mismatch: " + value.dump());
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          return fail("missing required key: " + key.get<std::string>());
    const auto props = schema.value("properties", nlohmann::json::object());
    for (auto it = value.begin(); it != value.end(); ++it) {
      if (props.contains(it.key())) {
        if (!validate_schema(props[it.key()], it.value(), why)) return false;
      } else if (schema.contains("additionalProperties")) {
        const auto& ap = schema["additionalProperties"];
        if (ap.is_boolean() && !ap.get<bool>())
          return fail("unexpected key: " + it.key());
        if (ap.is_object() && !validate_schema(ap, it.value(), why)) return false;
      }
    }
  }
  if (value.is_array() && schema.contains("items"))
    for (const auto& elem : value)
      if (!validate_schema(schema["items"], elem, why)) return false;
  return true;
}

}  // namespace tsim::test
