#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skymission/diagnostic.hpp"
#include "skymission/value.hpp"

namespace skymission {

/// Ordered name -> literal map. Keeps source order so printing is stable.
class ParamMap {
 public:
  using Entry = std::pair<std::string, Literal>;

  ParamMap() = default;
  ParamMap(std::initializer_list<Entry> entries);

  /// Returns false (and leaves the map unchanged) if `key` is already set.
  bool insert(std::string key, Literal value);
  const Literal* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const ParamMap&, const ParamMap&) = default;

 private:
  std::vector<Entry> entries_;
};

enum class NodeKind { TakeOff, TouchDown, FlyTo, FlyInArea, FlyHome, Hover, Branch };

bool is_routing(NodeKind kind);
/// Source keyword: takeoff, touchdown, fly_to, fly_in_area, fly_home, hover, if.
std::string_view keyword(NodeKind kind);
std::optional<NodeKind> routing_kind_from(std::string_view keyword);

struct ActionInstance {
  std::optional<std::string> result_label;
  std::string action_name;
  ParamMap params;
  SourceSpan span;

  friend bool operator==(const ActionInstance& a, const ActionInstance& b) {
    return a.result_label == b.result_label && a.action_name == b.action_name && a.params == b.params;
  }
};

enum class Comparator { EQ, NE, LT, LE, GT, GE };

std::string_view symbol(Comparator cmp);
bool is_ordering(Comparator cmp);

/// Reads one earlier result, runs it through processing actions (innermost
/// first) and compares the outcome with a literal.
struct Condition {
  std::string result_ref;
  std::vector<ActionInstance> processing_chain;
  Comparator comparator = Comparator::EQ;
  Literal reference_value = false;
  SourceSpan span;

  friend bool operator==(const Condition& a, const Condition& b) {
    return a.result_ref == b.result_ref && a.processing_chain == b.processing_chain &&
           a.comparator == b.comparator && a.reference_value == b.reference_value;
  }
};

struct Node {
  std::string id;
  /// False when the id was generated for an unlabeled step.
  bool explicit_label = false;
  NodeKind kind = NodeKind::Hover;
  ParamMap params;
  std::vector<ActionInstance> embedded_actions;
  std::optional<std::string> filter_ref;
  std::vector<std::string> parallel_refs;
  std::optional<Condition> condition;
  SourceSpan span;

  friend bool operator==(const Node& a, const Node& b) {
    return a.id == b.id && a.explicit_label == b.explicit_label && a.kind == b.kind &&
           a.params == b.params && a.embedded_actions == b.embedded_actions &&
           a.filter_ref == b.filter_ref && a.parallel_refs == b.parallel_refs &&
           a.condition == b.condition;
  }
};

enum class EdgeLabel { Next, True, False };

std::string_view to_string(EdgeLabel label);

struct Edge {
  std::string from;
  std::string to;
  EdgeLabel label = EdgeLabel::Next;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Priority-ordered motion constraints; actions.front() has top priority.
struct FilterDecl {
  std::string name;
  std::vector<ActionInstance> actions;
  SourceSpan span;

  friend bool operator==(const FilterDecl& a, const FilterDecl& b) {
    return a.name == b.name && a.actions == b.actions;
  }
};

struct UntilClause {
  Condition condition;
  std::string target;
  SourceSpan span;

  friend bool operator==(const UntilClause& a, const UntilClause& b) {
    return a.condition == b.condition && a.target == b.target;
  }
};

struct ParallelDecl {
  std::string name;
  std::optional<double> period_s;
  std::vector<ActionInstance> actions;
  std::optional<UntilClause> until;
  SourceSpan span;

  friend bool operator==(const ParallelDecl& a, const ParallelDecl& b) {
    return a.name == b.name && a.period_s == b.period_s && a.actions == b.actions && a.until == b.until;
  }
};

struct MissionDecls {
  std::vector<FilterDecl> filters;
  std::vector<ParallelDecl> parallels;
};

struct MissionFlow {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

enum class StructuralError {
  DuplicateId,
  DanglingEdge,
  MissingTakeOff,
  MissingTouchDown,
  MalformedNode,
  MalformedEdges,
};

std::string_view to_string(StructuralError error);

class MissionError : public std::runtime_error {
 public:
  MissionError(StructuralError code, std::string subject, const std::string& message)
      : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

  StructuralError code() const { return code_; }
  /// Offending node/declaration id.
  const std::string& subject() const { return subject_; }

 private:
  StructuralError code_;
  std::string subject_;
};

class UnknownNode : public std::out_of_range {
 public:
  explicit UnknownNode(const std::string& id) : std::out_of_range("unknown node '" + id + "'") {}
};

/// Immutable mission graph. Only build_mission creates one, so every
/// instance satisfies the structural invariants.
class Mission {
 public:
  const std::string& name() const { return name_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<FilterDecl>& filters() const { return filters_; }
  const std::vector<ParallelDecl>& parallels() const { return parallels_; }

  const Node* find_node(std::string_view id) const;
  const FilterDecl* find_filter(std::string_view name) const;
  const ParallelDecl* find_parallel(std::string_view name) const;

  const Node& takeoff() const;
  const Node& touchdown() const;

  friend bool operator==(const Mission&, const Mission&) = default;

 private:
  friend Mission build_mission(std::string name, MissionDecls decls, MissionFlow flow);

  Mission() = default;

  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<FilterDecl> filters_;
  std::vector<ParallelDecl> parallels_;
};

/// Validates structure and freezes the graph. Node order is kept; the two
/// edges of a branch are reordered True-then-False. Throws MissionError.
/// Filter/parallel references are resolved later by the analyzer.
Mission build_mission(std::string name, MissionDecls decls, MissionFlow flow);

/// Outgoing edges of `id` in declaration order. Throws UnknownNode.
std::vector<std::pair<EdgeLabel, std::string>> successors(const Mission& m, std::string_view id);

/// Incoming edges of `id`. Throws UnknownNode.
std::vector<std::pair<EdgeLabel, std::string>> predecessors(const Mission& m, std::string_view id);

struct ScopedResult {
  std::string label;
  std::string action_name;

  friend bool operator==(const ScopedResult&, const ScopedResult&) = default;
};

/// Results a condition at `at` may read: actions embedded in the routing
/// element one main-flow step back, plus the actions of parallel blocks
/// attached to it. Branches on the way back are skipped; with several
/// predecessors only results common to all of them are visible.
/// Throws UnknownNode.
std::vector<ScopedResult> visible_results(const Mission& m, std::string_view at);

/// Nodes reachable from TakeOff over any edge and over the `until` jumps of
/// parallel blocks attached to reached nodes.
std::set<std::string> reachable(const Mission& m);

}  // namespace skymission
