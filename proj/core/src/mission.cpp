#include "skymission/mission.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>

namespace skymission {

ParamMap::ParamMap(std::initializer_list<Entry> entries) {
  for (const auto& [k, v] : entries) insert(k, v);
}

bool ParamMap::insert(std::string key, Literal value) {
  if (contains(key)) return false;
  entries_.emplace_back(std::move(key), std::move(value));
  return true;
}

const Literal* ParamMap::find(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool is_routing(NodeKind kind) { return kind != NodeKind::Branch; }

std::string_view keyword(NodeKind kind) {
  switch (kind) {
    case NodeKind::TakeOff: return "takeoff";
    case NodeKind::TouchDown: return "touchdown";
    case NodeKind::FlyTo: return "fly_to";
    case NodeKind::FlyInArea: return "fly_in_area";
    case NodeKind::FlyHome: return "fly_home";
    case NodeKind::Hover: return "hover";
    case NodeKind::Branch: return "if";
  }
  return "?";
}

std::optional<NodeKind> routing_kind_from(std::string_view word) {
  for (auto k : {NodeKind::TakeOff, NodeKind::TouchDown, NodeKind::FlyTo, NodeKind::FlyInArea,
                 NodeKind::FlyHome, NodeKind::Hover}) {
    if (keyword(k) == word) return k;
  }
  return std::nullopt;
}

std::string_view symbol(Comparator cmp) {
  switch (cmp) {
    case Comparator::EQ: return "==";
    case Comparator::NE: return "!=";
    case Comparator::LT: return "<";
    case Comparator::LE: return "<=";
    case Comparator::GT: return ">";
    case Comparator::GE: return ">=";
  }
  return "?";
}

bool is_ordering(Comparator cmp) { return cmp != Comparator::EQ && cmp != Comparator::NE; }

std::string_view to_string(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::Next: return "next";
    case EdgeLabel::True: return "true";
    case EdgeLabel::False: return "false";
  }
  return "?";
}

std::string_view to_string(StructuralError error) {
  switch (error) {
    case StructuralError::DuplicateId: return "DuplicateId";
    case StructuralError::DanglingEdge: return "DanglingEdge";
    case StructuralError::MissingTakeOff: return "MissingTakeOff";
    case StructuralError::MissingTouchDown: return "MissingTouchDown";
    case StructuralError::MalformedNode: return "MalformedNode";
    case StructuralError::MalformedEdges: return "MalformedEdges";
  }
  return "?";
}

const Node* Mission::find_node(std::string_view id) const {
  auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.id == id; });
  return it == nodes_.end() ? nullptr : &*it;
}

const FilterDecl* Mission::find_filter(std::string_view name) const {
  auto it = std::find_if(filters_.begin(), filters_.end(), [&](const FilterDecl& f) { return f.name == name; });
  return it == filters_.end() ? nullptr : &*it;
}

const ParallelDecl* Mission::find_parallel(std::string_view name) const {
  auto it = std::find_if(parallels_.begin(), parallels_.end(),
                         [&](const ParallelDecl& p) { return p.name == name; });
  return it == parallels_.end() ? nullptr : &*it;
}

const Node& Mission::takeoff() const {
  return *std::find_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == NodeKind::TakeOff; });
}

const Node& Mission::touchdown() const {
  return *std::find_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == NodeKind::TouchDown; });
}

namespace {

[[noreturn]] void fail(StructuralError code, const std::string& subject, const std::string& message) {
  throw MissionError(code, subject, message);
}

void collect_labels(const std::vector<ActionInstance>& actions, std::set<std::string>& seen) {
  for (const auto& a : actions) {
    if (!a.result_label) continue;
    if (!seen.insert(*a.result_label).second)
      fail(StructuralError::DuplicateId, *a.result_label, "result label '" + *a.result_label + "' defined twice");
  }
}

int edge_rank(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::True: return 0;
    case EdgeLabel::False: return 1;
    case EdgeLabel::Next: return 2;
  }
  return 3;
}

}  // namespace

Mission build_mission(std::string name, MissionDecls decls, MissionFlow flow) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < flow.nodes.size(); ++i) {
    const auto& n = flow.nodes[i];
    if (!index.emplace(n.id, i).second) fail(StructuralError::DuplicateId, n.id, "node id '" + n.id + "' used twice");
  }
  std::set<std::string> decl_names;
  for (const auto& f : decls.filters) {
    if (!decl_names.insert("filter:" + f.name).second)
      fail(StructuralError::DuplicateId, f.name, "filter '" + f.name + "' declared twice");
  }
  for (const auto& p : decls.parallels) {
    if (!decl_names.insert("parallel:" + p.name).second)
      fail(StructuralError::DuplicateId, p.name, "parallel block '" + p.name + "' declared twice");
  }

  std::set<std::string> labels;
  for (const auto& n : flow.nodes) collect_labels(n.embedded_actions, labels);
  for (const auto& p : decls.parallels) collect_labels(p.actions, labels);
  for (const auto& f : decls.filters) collect_labels(f.actions, labels);

  auto count_kind = [&](NodeKind k) {
    return std::count_if(flow.nodes.begin(), flow.nodes.end(), [k](const Node& n) { return n.kind == k; });
  };
  if (count_kind(NodeKind::TakeOff) != 1)
    fail(StructuralError::MissingTakeOff, name, "a mission needs exactly one takeoff");
  if (count_kind(NodeKind::TouchDown) != 1)
    fail(StructuralError::MissingTouchDown, name, "a mission needs exactly one touchdown");

  for (const auto& n : flow.nodes) {
    bool branch = n.kind == NodeKind::Branch;
    if (branch != n.condition.has_value())
      fail(StructuralError::MalformedNode, n.id, "node '" + n.id + "': a condition belongs on branch nodes only");
    if (branch && (!n.embedded_actions.empty() || n.filter_ref || !n.parallel_refs.empty()))
      fail(StructuralError::MalformedNode, n.id, "branch '" + n.id + "' cannot carry actions, filters or parallels");
  }

  std::map<std::string, std::array<int, 3>> out;  // per node: next/true/false counts
  for (const auto& e : flow.edges) {
    if (!index.count(e.from) || !index.count(e.to))
      fail(StructuralError::DanglingEdge, index.count(e.from) ? e.to : e.from,
           "edge " + e.from + " -> " + e.to + " references an unknown node");
    out[e.from][static_cast<std::size_t>(e.label)]++;
    if (flow.nodes[index[e.to]].kind == NodeKind::TakeOff)
      fail(StructuralError::MalformedEdges, e.to, "takeoff cannot have incoming edges");
  }
  for (const auto& n : flow.nodes) {
    auto counts = out[n.id];
    bool ok = true;
    if (n.kind == NodeKind::Branch) {
      ok = counts[0] == 0 && counts[1] == 1 && counts[2] == 1;
    } else if (n.kind == NodeKind::TouchDown) {
      ok = counts[0] == 0 && counts[1] == 0 && counts[2] == 0;
    } else {
      ok = counts[0] == 1 && counts[1] == 0 && counts[2] == 0;
    }
    if (!ok) fail(StructuralError::MalformedEdges, n.id, "node '" + n.id + "' has the wrong set of outgoing edges");
  }

  std::stable_sort(flow.edges.begin(), flow.edges.end(), [&](const Edge& a, const Edge& b) {
    auto ia = index[a.from];
    auto ib = index[b.from];
    if (ia != ib) return ia < ib;
    return edge_rank(a.label) < edge_rank(b.label);
  });

  Mission m;
  m.name_ = std::move(name);
  m.nodes_ = std::move(flow.nodes);
  m.edges_ = std::move(flow.edges);
  m.filters_ = std::move(decls.filters);
  m.parallels_ = std::move(decls.parallels);
  return m;
}

std::vector<std::pair<EdgeLabel, std::string>> successors(const Mission& m, std::string_view id) {
  if (!m.find_node(id)) throw UnknownNode(std::string(id));
  std::vector<std::pair<EdgeLabel, std::string>> result;
  for (const auto& e : m.edges()) {
    if (e.from == id) result.emplace_back(e.label, e.to);
  }
  return result;
}

std::vector<std::pair<EdgeLabel, std::string>> predecessors(const Mission& m, std::string_view id) {
  if (!m.find_node(id)) throw UnknownNode(std::string(id));
  std::vector<std::pair<EdgeLabel, std::string>> result;
  for (const auto& e : m.edges()) {
    if (e.to == id) result.emplace_back(e.label, e.from);
  }
  return result;
}

namespace {

std::vector<ScopedResult> results_of(const Mission& m, const Node& routing) {
  std::vector<ScopedResult> scope;
  for (const auto& a : routing.embedded_actions) {
    if (a.result_label) scope.push_back({*a.result_label, a.action_name});
  }
  for (const auto& ref : routing.parallel_refs) {
    const ParallelDecl* p = m.find_parallel(ref);
    if (!p) continue;
    for (const auto& a : p->actions) {
      if (a.result_label) scope.push_back({*a.result_label, a.action_name});
    }
  }
  return scope;
}

}  // namespace

std::vector<ScopedResult> visible_results(const Mission& m, std::string_view at) {
  if (!m.find_node(at)) throw UnknownNode(std::string(at));

  // Walk back over branch nodes to the routing elements that precede `at`.
  std::vector<const Node*> routing_preds;
  std::set<std::string> visited{std::string(at)};
  std::deque<std::string> frontier{std::string(at)};
  while (!frontier.empty()) {
    auto id = frontier.front();
    frontier.pop_front();
    for (const auto& [label, from] : predecessors(m, id)) {
      if (!visited.insert(from).second) continue;
      const Node* n = m.find_node(from);
      if (n->kind == NodeKind::Branch) {
        frontier.push_back(from);
      } else {
        routing_preds.push_back(n);
      }
    }
  }
  if (routing_preds.empty()) return {};

  auto scope = results_of(m, *routing_preds.front());
  for (std::size_t i = 1; i < routing_preds.size(); ++i) {
    auto other = results_of(m, *routing_preds[i]);
    std::erase_if(scope, [&](const ScopedResult& r) {
      return std::find(other.begin(), other.end(), r) == other.end();
    });
  }
  return scope;
}

std::set<std::string> reachable(const Mission& m) {
  std::set<std::string> seen;
  std::deque<std::string> frontier{m.takeoff().id};
  seen.insert(m.takeoff().id);
  auto visit = [&](const std::string& id) {
    if (m.find_node(id) && seen.insert(id).second) frontier.push_back(id);
  };
  while (!frontier.empty()) {
    auto id = frontier.front();
    frontier.pop_front();
    for (const auto& [label, to] : successors(m, id)) visit(to);
    const Node* n = m.find_node(id);
    for (const auto& ref : n->parallel_refs) {
      const ParallelDecl* p = m.find_parallel(ref);
      if (p && p->until) visit(p->until->target);
    }
  }
  return seen;
}

}  // namespace skymission
