#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "skymission/value.hpp"

namespace skymission {

struct Sphere {
  Point center;
  double radius = 1.0;
};

/// Fixed output for an action or processing invocation. `nth` is the
/// 1-based invocation count of that action name; `region` guards on the
/// ground position (capture position for pictures/scans fed to processing
/// actions, vehicle position otherwise). First matching rule wins.
struct ScriptRule {
  std::string action;
  std::optional<int> nth;
  std::optional<Rect> region;
  std::variant<bool, double, std::string> output;
};

/// Deterministic world description a mission is simulated against.
struct Scenario {
  Point home;
  std::vector<Sphere> obstacles;
  double battery_capacity_s = 1200.0;
  double reserve = 0.15;
  double tick_s = 0.1;
  std::vector<ScriptRule> script;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads the JSON scenario format (docs/scenario.md). Throws ScenarioError.
Scenario parse_scenario(std::string_view json_text);

/// Throws ScenarioError when a field is out of range.
void validate(const Scenario& s);

}  // namespace skymission
