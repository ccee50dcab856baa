// Internal JSON helpers shared by problem_io.cpp and experiment.cpp.
#ifndef FLEXKRYLOV_SRC_JSON_UTIL_HPP
#define FLEXKRYLOV_SRC_JSON_UTIL_HPP

#include "flexkrylov/problems.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace flexkrylov::detail {

using nlohmann::json;

/// Reads an optional member, throwing ConfigError on a type mismatch.
template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where);

ProblemSpec problem_spec_from_json(const json& j);
json problem_spec_to_json(const ProblemSpec& spec);

}  // namespace flexkrylov::detail

#endif  // FLEXKRYLOV_SRC_JSON_UTIL_HPP
