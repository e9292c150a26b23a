#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "skymission/diagnostic.hpp"
#include "skymission/mission.hpp"
#include "skymission/registry.hpp"

namespace skymission {

struct AnalysisReport {
  std::vector<Diagnostic> diagnostics;
  std::map<std::string, ValueType> resolved_types;

  bool accepted() const { return !has_errors(diagnostics); }
};

/// Runs every structural (S), reference (R) and type (T) check and reports
/// all findings, ordered by position then code.
AnalysisReport analyze(const Mission& m, const Registry& reg);

using TypedScope = std::vector<std::pair<std::string, ValueType>>;

/// visible_results() with types looked up in `reg`; results of unknown
/// actions are left out.
TypedScope visible_result_types(const Mission& m, std::string_view at, const Registry& reg);

/// Folds the processing chain innermost-out starting from the type of the
/// referenced result. Fails with R002 (label not in scope), R001 (unknown
/// action), R007 (not a processing action) or T001 (input type mismatch;
/// message names the 1-based chain position).
std::variant<ValueType, Diagnostic> condition_type(const Condition& c, const Registry& reg, const TypedScope& scope);

/// Parameter schema of a routing element kind.
const std::vector<ParamSpec>& routing_schema(NodeKind kind);

}  // namespace skymission
