#include <wavemap/schema.hpp>
#include <wavemap/schema_text.hpp>

#include <algorithm>

namespace wavemap {

namespace {

bool has_type(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer();
  throw std::logic_error("schema: unsupported type " + type);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config " + (where.empty() ? std::string("/") : where) + ": " + what);
}

void check(const nlohmann::json& v, const nlohmann::json& s, const std::string& where) {
  if (const auto it = s.find("type"); it != s.end()) {
    const bool ok = it->is_array() ? std::any_of(it->begin(), it->end(), [&](const auto& t) { return has_type(v, t); })
                                   : has_type(v, *it);
    if (!ok) fail(where, "expected type " + it->dump());
  }
  if (const auto it = s.find("enum"); it != s.end())
    if (std::find(it->begin(), it->end(), v) == it->end()) fail(where, "value " + v.dump() + " not in " + it->dump());
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) fail(where, "below minimum " + s["minimum"].dump());
    if (s.contains("maximum") && x > s["maximum"].get<double>()) fail(where, "above maximum " + s["maximum"].dump());
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
      fail(where, "must exceed " + s["exclusiveMinimum"].dump());
    if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
      fail(where, "must be below " + s["exclusiveMaximum"].dump());
  }
  if (v.is_string() && s.contains("minLength") && v.get<std::string>().size() < s["minLength"].get<std::size_t>())
    fail(where, "string too short");
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) fail(where, "too few items");
    if (const auto it = s.find("items"); it != s.end())
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], *it, where + "/" + std::to_string(i));
  }
  if (v.is_object()) {
    if (const auto it = s.find("required"); it != s.end())
      for (const auto& key : *it)
        if (!v.contains(key.get<std::string>())) fail(where, "missing required key '" + key.get<std::string>() + "'");
    const auto props = s.find("properties");
    const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
    for (const auto& [key, value] : v.items()) {
      if (props != s.end() && props->contains(key)) check(value, (*props)[key], where + "/" + key);
      else if (closed) fail(where, "unknown key '" + key + "'");
    }
  }
}

} // namespace

const nlohmann::json& scenario_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(scenario_schema_text);
  return schema;
}

void validate_against(const nlohmann::json& doc, const nlohmann::json& schema) { check(doc, schema, ""); }

} // namespace wavemap
