// Reader for the action extension file (docs/actions.md).
#include <optional>

#include "skymission/registry.hpp"
#include "syntax.hpp"

namespace skymission {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

[[noreturn]] void bad(int line, const std::string& why) {
  throw RegistryError(RegistryError::Kind::InvalidDefinition, "line " + std::to_string(line) + ": " + why);
}

ParamSpec parse_param(const std::string& text, int line) {
  using syntax::Tok;
  try {
    syntax::TokenStream ts(syntax::tokenize(text));
    ParamSpec spec;
    spec.name = ts.expect(Tok::Ident, "a parameter name").text;
    auto kind = literal_kind_from(ts.expect(Tok::Ident, "a parameter kind").text);
    if (!kind) bad(line, "parameter kind must be one of bool, number, text, point, rect");
    spec.kind = *kind;
    while (!ts.at(Tok::End)) {
      if (ts.accept_word("required")) {
        spec.required = true;
      } else if (ts.accept_word("default")) {
        spec.default_value = syntax::parse_literal(ts);
      } else if (ts.accept_word("positive")) {
        spec.constraint = ParamConstraint::Positive;
      } else if (ts.accept_word("nonnegative")) {
        spec.constraint = ParamConstraint::NonNegative;
      } else {
        ts.unexpected("'required', 'default <literal>', 'positive' or 'nonnegative'");
      }
    }
    return spec;
  } catch (const syntax::SyntaxError& e) {
    bad(line, e.what());
  }
}

}  // namespace

void load_extensions(Registry& reg, std::string_view text) {
  std::optional<ActionDefinition> current;
  int current_line = 0;
  auto flush = [&] {
    if (!current) return;
    try {
      reg.add(std::move(*current));
    } catch (const RegistryError& e) {
      throw RegistryError(e.kind(), "line " + std::to_string(current_line) + ": " + e.what());
    }
    current.reset();
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos && line.find('"') == std::string::npos)
      line = trim(line.substr(0, hash));
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') bad(line_no, "section header must end with ']'");
      flush();
      current.emplace();
      current->name = trim(line.substr(1, line.size() - 2));
      current_line = line_no;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) bad(line_no, "expected 'key = value'");
    if (!current) bad(line_no, "entry outside an [action] section");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key != "param") value = unquote(value);

    if (key == "category") {
      auto c = action_category_from(value);
      if (!c) bad(line_no, "category must be regular, processing or filter");
      current->category = *c;
    } else if (key == "input" || key == "output") {
      auto t = value_type_from(value);
      if (!t) bad(line_no, "unknown value type '" + value + "'");
      if (key == "input") {
        current->input_type = *t;
      } else {
        current->output_type = *t;
      }
    } else if (key == "behavior") {
      current->behavior = value;
    } else if (key == "param") {
      current->params.push_back(parse_param(value, line_no));
    } else {
      bad(line_no, "unknown key '" + key + "'");
    }
  }
  flush();
}

}  // namespace skymission
