#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skymission/diagnostic.hpp"
#include "skymission/mission.hpp"

namespace skymission {

struct ParseResult {
  std::optional<Mission> mission;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return mission.has_value(); }
};

/// Parses `.msn` source. Never throws on malformed input: syntax problems
/// come back as P-series diagnostics (see docs/diagnostics.md).
///
/// Unlabeled steps get generated ids `<keyword>_<index>` (index = position
/// in the flow), suffixed with `_` until they do not clash with a label.
ParseResult parse(std::string_view source);

/// Canonical source text: two-space indentation, one statement per line,
/// numbers in shortest form with a fraction. Comments are not preserved.
std::string format(const Mission& m);

/// A condition in source syntax, e.g. `recognize_image(shot) == "disease found"`.
std::string to_source(const Condition& c);

}  // namespace skymission
