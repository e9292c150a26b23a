#include "skymission/diagnostic.hpp"

#include <algorithm>
#include <tuple>

namespace skymission {

Diagnostic make_error(std::string code, std::string message, const SourceSpan& at) {
  return Diagnostic{std::move(code), Severity::Error, std::move(message), at.line, at.column};
}

Diagnostic make_warning(std::string code, std::string message, const SourceSpan& at) {
  return Diagnostic{std::move(code), Severity::Warning, std::move(message), at.line, at.column};
}

const char* to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return count(diagnostics, Severity::Error) > 0;
}

std::size_t count(const std::vector<Diagnostic>& diagnostics, Severity severity) {
  return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                [&](const Diagnostic& d) { return d.severity == severity; }));
}

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
  std::stable_sort(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.line, a.column, a.code, a.message) < std::tie(b.line, b.column, b.code, b.message);
  });
}

std::string render(const Diagnostic& d, const std::string& file) {
  return file + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.code + " " +
         to_string(d.severity) + ": " + d.message;
}

}  // namespace skymission
