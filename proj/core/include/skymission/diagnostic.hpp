#pragma once

#include <string>
#include <vector>

namespace skymission {

/// 1-based source range. Missions assembled in code carry the default 1:1.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int end_line = 1;
  int end_column = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { Error, Warning };

/// A positioned finding. Codes are stable; see docs/diagnostics.md.
struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  std::string message;
  int line = 1;
  int column = 1;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

Diagnostic make_error(std::string code, std::string message, const SourceSpan& at);
Diagnostic make_warning(std::string code, std::string message, const SourceSpan& at);

const char* to_string(Severity severity);

bool has_errors(const std::vector<Diagnostic>& diagnostics);
std::size_t count(const std::vector<Diagnostic>& diagnostics, Severity severity);

/// Stable ordering: by position, then code, then message.
void sort_diagnostics(std::vector<Diagnostic>& diagnostics);

/// `file:line:col: CODE severity: message`
std::string render(const Diagnostic& d, const std::string& file);

}  // namespace skymission
