#include <sstream>

#include "skymission/parser.hpp"

namespace skymission {

namespace {

std::string args_text(const ParamMap& params) {
  std::string out;
  for (const auto& [k, v] : params.entries()) {
    if (!out.empty()) out += ", ";
    out += k + " = " + to_source(v);
  }
  return out;
}

std::string action_text(const ActionInstance& a) {
  std::string out;
  if (a.result_label) out += *a.result_label + ": ";
  out += a.action_name + "(" + args_text(a.params) + ")";
  return out;
}

std::string chain_text(const Condition& c) {
  std::string out = c.result_ref;
  for (const auto& step : c.processing_chain) {
    std::string inner = step.action_name + "(" + out;
    if (!step.params.empty()) inner += ", " + args_text(step.params);
    out = inner + ")";
  }
  return out;
}

void action_block(std::ostream& os, const std::vector<ActionInstance>& actions, const std::string& indent) {
  os << " {\n";
  for (const auto& a : actions) os << indent << "  " << action_text(a) << "\n";
  os << indent << "}";
}

std::string target_of(const Mission& m, const Node& n, EdgeLabel label) {
  for (const auto& [l, to] : successors(m, n.id)) {
    if (l == label) return to;
  }
  return {};
}

void step_text(std::ostream& os, const Mission& m, const Node& n) {
  const std::string indent = "    ";
  std::string prefix = n.explicit_label ? n.id + ": " : "";
  os << indent << prefix;
  if (n.kind == NodeKind::Branch) {
    os << "if " << to_source(*n.condition) << " -> " << target_of(m, n, EdgeLabel::True) << " else -> "
       << target_of(m, n, EdgeLabel::False) << "\n";
    return;
  }
  os << keyword(n.kind) << "(" << args_text(n.params) << ")";
  if (!n.embedded_actions.empty()) action_block(os, n.embedded_actions, indent);

  std::string clauses;
  if (n.filter_ref) clauses += "with filter " + *n.filter_ref;
  if (!n.parallel_refs.empty()) {
    if (!clauses.empty()) clauses += " ";
    clauses += "parallel ";
    for (std::size_t i = 0; i < n.parallel_refs.size(); ++i) {
      if (i) clauses += ", ";
      clauses += n.parallel_refs[i];
    }
  }
  if (!clauses.empty()) {
    if (!n.embedded_actions.empty()) {
      os << " " << clauses;
    } else {
      // Continuation lines line up with the routing call.
      std::size_t hang = prefix.empty() ? 2 : prefix.size();
      os << "\n" << indent << std::string(hang, ' ') << clauses;
    }
  }
  os << "\n";
}

}  // namespace

std::string to_source(const Condition& c) {
  return chain_text(c) + " " + std::string(symbol(c.comparator)) + " " + to_source(c.reference_value);
}

std::string format(const Mission& m) {
  std::ostringstream os;
  os << "mission " << quote(m.name()) << " {\n";
  for (const auto& f : m.filters()) {
    os << "  filter " << f.name;
    action_block(os, f.actions, "  ");
    os << "\n";
  }
  for (const auto& p : m.parallels()) {
    os << "  parallel " << p.name;
    if (p.period_s) os << " every " << format_number(*p.period_s) << "s";
    action_block(os, p.actions, "  ");
    if (p.until) os << " until " << to_source(p.until->condition) << " -> " << p.until->target;
    os << "\n";
  }
  os << "  flow {\n";
  for (const auto& n : m.nodes()) step_text(os, m, n);
  os << "  }\n}\n";
  return os.str();
}

}  // namespace skymission
