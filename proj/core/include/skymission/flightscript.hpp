#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skymission/mission.hpp"
#include "skymission/registry.hpp"
#include "skymission/simulator.hpp"

namespace skymission {

/// Neutral line-based command program (docs/flightscript.md).
struct FlightScript {
  std::vector<std::string> lines;

  /// Lines joined with '\n', trailing newline included.
  std::string text() const;
};

/// Translates a validated mission. Embedded action parameters are written
/// with registry defaults filled in. Precondition: analyze(m) is clean.
FlightScript gen_flightscript(const Mission& m, const Registry& reg);

class FlightScriptError : public std::runtime_error {
 public:
  FlightScriptError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}
  int line() const { return line_; }
  /// The message without the line prefix.
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

/// A parsed flight script: declarations plus a flat list of steps the
/// interpreter walks with a program counter.
struct ScriptProgram {
  struct Step {
    std::string id;
    bool branch = false;
    RoutingElement element;          // routing steps
    std::string cond;                // branch steps
    std::string if_true, if_false;   // branch steps: labels
    std::optional<std::string> jump; // routing steps: explicit JMP
    int line = 0;
    int jump_line = 0;
  };

  std::string name;
  std::vector<FilterDecl> filters;
  std::vector<ParallelDecl> parallels;
  std::map<std::string, Condition> conditions;
  std::vector<Step> steps;
  std::map<std::string, std::size_t> labels;  // id -> step index
};

/// Reads a flight script. Throws FlightScriptError on malformed input,
/// undefined labels or conditions.
ScriptProgram parse_flightscript(std::string_view text);

/// Control flow of a flight script, for the simulator's script mode.
class ScriptFlowSource : public FlowSource {
 public:
  explicit ScriptFlowSource(const ScriptProgram& p) : p_(p) {}

  RoutingElement entry() const override;
  RoutingElement element(std::string_view id) const override;
  std::optional<RoutingElement> after(std::string_view completed, const BranchDecider& decide) const override;
  const FilterDecl* filter(std::string_view name) const override;
  const ParallelDecl* parallel(std::string_view name) const override;

 private:
  const ScriptProgram& p_;
};

/// Simulates a flight script (script-interpreter mode).
Trace run_script(const ScriptProgram& p, const Scenario& s, const Registry& reg, const SimConfig& cfg = {});

}  // namespace skymission
