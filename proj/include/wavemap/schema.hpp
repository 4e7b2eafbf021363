#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace wavemap {

/// Invalid configuration (exit code 2 at the command line).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The scenario schema published in config/scenario.schema.json.
const nlohmann::json& scenario_schema();

/// Validates `doc` against the JSON Schema subset used by the published
/// schema: type, enum, properties, required, additionalProperties (boolean),
/// items, minItems, minLength, minimum, maximum, exclusiveMinimum and
/// exclusiveMaximum. Throws ConfigError naming the offending JSON pointer.
void validate_against(const nlohmann::json& doc, const nlohmann::json& schema);

} // namespace wavemap
