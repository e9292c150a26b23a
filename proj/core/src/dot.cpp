#include "skymission/dot.hpp"

#include <set>

#include "skymission/parser.hpp"

namespace skymission {

namespace {

std::string id(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string params_text(const ParamMap& params) {
  std::string out;
  for (const auto& [k, v] : params.entries()) {
    if (!out.empty()) out += ", ";
    out += k + " = " + to_source(v);
  }
  return out;
}

std::string action_text(const ActionInstance& a) {
  std::string out = a.result_label ? *a.result_label + ": " : "";
  return out + a.action_name + "(" + params_text(a.params) + ")";
}

std::string node_label(const Node& n) {
  if (n.kind == NodeKind::Branch) return to_source(*n.condition);
  std::string out = n.explicit_label ? n.id + ": " : "";
  out += std::string(keyword(n.kind)) + "(" + params_text(n.params) + ")";
  for (const auto& a : n.embedded_actions) out += "\n" + action_text(a);
  return out;
}

}  // namespace

std::string gen_dot(const Mission& m) {
  std::string out = "digraph " + id(m.name()) + " {\n";
  out += "  node [fontname=\"Helvetica\"];\n";
  for (const auto& n : m.nodes()) {
    out += "  " + id(n.id) + " [shape=" + (n.kind == NodeKind::Branch ? "diamond" : "box") +
           ", label=" + id(node_label(n)) + "];\n";
  }

  std::set<std::string> filters;
  std::set<std::string> parallels;
  for (const auto& n : m.nodes()) {
    if (n.filter_ref) filters.insert(*n.filter_ref);
    parallels.insert(n.parallel_refs.begin(), n.parallel_refs.end());
  }
  for (const auto& f : m.filters()) {
    if (!filters.count(f.name)) continue;
    std::string label = "filter " + f.name;
    for (const auto& a : f.actions) label += "\n" + action_text(a);
    out += "  " + id("filter:" + f.name) + " [shape=note, label=" + id(label) + "];\n";
  }
  for (const auto& p : m.parallels()) {
    if (!parallels.count(p.name)) continue;
    std::string label = "parallel " + p.name;
    if (p.period_s) label += " every " + format_number(*p.period_s) + "s";
    for (const auto& a : p.actions) label += "\n" + action_text(a);
    if (p.until) label += "\nuntil " + to_source(p.until->condition);
    out += "  " + id("parallel:" + p.name) + " [shape=box, style=\"rounded,dashed\", label=" + id(label) + "];\n";
  }

  for (const auto& e : m.edges()) {
    out += "  " + id(e.from) + " -> " + id(e.to);
    if (e.label == EdgeLabel::True) out += " [color=green, label=\"true\"]";
    if (e.label == EdgeLabel::False) out += " [color=red, label=\"false\"]";
    out += ";\n";
  }
  for (const auto& n : m.nodes()) {
    if (n.filter_ref && m.find_filter(*n.filter_ref))
      out += "  " + id(n.id) + " -> " + id("filter:" + *n.filter_ref) + " [style=dotted, arrowhead=none];\n";
    for (const auto& ref : n.parallel_refs) {
      if (m.find_parallel(ref))
        out += "  " + id(n.id) + " -> " + id("parallel:" + ref) + " [style=dotted, arrowhead=none];\n";
    }
  }
  for (const auto& p : m.parallels()) {
    if (p.until && parallels.count(p.name) && m.find_node(p.until->target))
      out += "  " + id("parallel:" + p.name) + " -> " + id(p.until->target) + " [style=dashed, label=\"until\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace skymission
