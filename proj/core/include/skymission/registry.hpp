#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skymission/diagnostic.hpp"
#include "skymission/mission.hpp"
#include "skymission/value.hpp"

namespace skymission {

enum class ActionCategory { Regular, Processing, Filter };

std::string_view to_string(ActionCategory category);
std::optional<ActionCategory> action_category_from(std::string_view name);

enum class ParamConstraint { None, Positive, NonNegative };

struct ParamSpec {
  std::string name;
  LiteralKind kind = LiteralKind::Number;
  bool required = false;
  std::optional<Literal> default_value;
  ParamConstraint constraint = ParamConstraint::None;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

/// A user-visible capability. Definitions are plain data: `behavior` names
/// a hook the simulator resolves at run time.
struct ActionDefinition {
  std::string name;
  ActionCategory category = ActionCategory::Regular;
  std::optional<ValueType> input_type;  // Processing only
  ValueType output_type = ValueType::Unit;
  std::vector<ParamSpec> params;
  std::string behavior = "scripted";

  const ParamSpec* param(std::string_view name) const;

  friend bool operator==(const ActionDefinition&, const ActionDefinition&) = default;
};

class RegistryError : public std::invalid_argument {
 public:
  enum class Kind { DuplicateName, InvalidDefinition };

  RegistryError(Kind kind, const std::string& message) : std::invalid_argument(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Motion hooks a Filter definition may bind to, with the Number parameter
/// each one reads.
struct MotionHook {
  std::string_view behavior;
  std::string_view param;
};
const std::vector<MotionHook>& motion_hooks();

class Registry {
 public:
  /// Adds a definition. Throws RegistryError on a taken name or when the
  /// definition breaks a category rule (Regular/Filter take no input,
  /// Processing needs one, Filter outputs Unit and binds a motion hook).
  void add(ActionDefinition def);

  const ActionDefinition* lookup(std::string_view name) const;
  bool contains(std::string_view name) const { return lookup(name) != nullptr; }
  std::vector<std::string> names() const;
  std::size_t size() const { return defs_.size(); }

 private:
  std::map<std::string, ActionDefinition, std::less<>> defs_;
};

/// Registry preloaded with the built-in actions (docs/actions.md).
Registry builtin_catalog();

/// Checks an instance's parameters against `def`: unknown names (T005),
/// missing required values (T006), literal kinds (T004) and value ranges
/// (T007).
std::vector<Diagnostic> validate_instance(const ActionInstance& inst, const ActionDefinition& def);

/// Same checks against a bare schema; used for routing parameters too.
std::vector<Diagnostic> validate_params(const ParamMap& params, const std::vector<ParamSpec>& schema,
                                        const std::string& owner, const SourceSpan& at);

/// Instance parameters completed with schema defaults.
ParamMap resolve_params(const ParamMap& params, const std::vector<ParamSpec>& schema);

/// Parses the registry extension format (docs/actions.md) and adds every
/// definition to `reg`. Throws RegistryError with a line number on bad input.
void load_extensions(Registry& reg, std::string_view text);

}  // namespace skymission
