#include "skymission/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace skymission {

namespace {

using nlohmann::json;

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ScenarioError(std::string(what) + " must be a number");
  return j.get<double>();
}

Point point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError(std::string(what) + " must be [x, y, z]");
  return Point{number(j[0], what), number(j[1], what), number(j[2], what)};
}

Rect rect(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 4) throw ScenarioError(std::string(what) + " must be [x0, y0, x1, y1]");
  return Rect{number(j[0], what), number(j[1], what), number(j[2], what), number(j[3], what)};
}

}  // namespace

void validate(const Scenario& s) {
  if (!(s.tick_s > 0.0) || !std::isfinite(s.tick_s)) throw ScenarioError("tick_s must be positive");
  if (!(s.reserve > 0.0 && s.reserve < 1.0)) throw ScenarioError("reserve must lie in (0, 1)");
  if (!(s.battery_capacity_s > 0.0)) throw ScenarioError("battery_capacity_s must be positive");
  for (const auto& o : s.obstacles) {
    if (!(o.radius > 0.0)) throw ScenarioError("obstacle radius must be positive");
  }
  for (const auto& r : s.script) {
    if (r.action.empty()) throw ScenarioError("script rule needs an action name");
    if (r.nth && *r.nth < 1) throw ScenarioError("script rule 'nth' counts from 1");
  }
}

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("malformed scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");

  static const char* kKeys[] = {"home", "obstacles", "battery_capacity_s", "reserve", "tick_s", "script"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      throw ScenarioError("unknown scenario field '" + key + "'");
  }

  Scenario s;
  if (doc.contains("home")) s.home = point(doc["home"], "home");
  if (doc.contains("battery_capacity_s")) s.battery_capacity_s = number(doc["battery_capacity_s"], "battery_capacity_s");
  if (doc.contains("reserve")) s.reserve = number(doc["reserve"], "reserve");
  if (doc.contains("tick_s")) s.tick_s = number(doc["tick_s"], "tick_s");
  if (doc.contains("obstacles")) {
    if (!doc["obstacles"].is_array()) throw ScenarioError("obstacles must be an array");
    for (const auto& o : doc["obstacles"]) {
      if (!o.is_object() || !o.contains("center") || !o.contains("radius"))
        throw ScenarioError("obstacle needs 'center' and 'radius'");
      s.obstacles.push_back(Sphere{point(o["center"], "obstacle center"), number(o["radius"], "obstacle radius")});
    }
  }
  if (doc.contains("script")) {
    if (!doc["script"].is_array()) throw ScenarioError("script must be an array");
    for (const auto& r : doc["script"]) {
      if (!r.is_object() || !r.contains("action") || !r.contains("output"))
        throw ScenarioError("script rule needs 'action' and 'output'");
      ScriptRule rule;
      if (!r["action"].is_string()) throw ScenarioError("script rule 'action' must be a string");
      rule.action = r["action"].get<std::string>();
      if (r.contains("nth")) {
        if (!r["nth"].is_number_integer()) throw ScenarioError("script rule 'nth' must be an integer");
        rule.nth = r["nth"].get<int>();
      }
      if (r.contains("region")) rule.region = rect(r["region"], "script rule region");
      const auto& out = r["output"];
      if (out.is_boolean()) {
        rule.output = out.get<bool>();
      } else if (out.is_number()) {
        rule.output = out.get<double>();
      } else if (out.is_string()) {
        rule.output = out.get<std::string>();
      } else {
        throw ScenarioError("script rule 'output' must be a boolean, number or string");
      }
      s.script.push_back(std::move(rule));
    }
  }
  validate(s);
  return s;
}

}  // namespace skymission
