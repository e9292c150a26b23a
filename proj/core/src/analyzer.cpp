#include "skymission/analyzer.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace skymission {

const std::vector<ParamSpec>& routing_schema(NodeKind kind) {
  using LK = LiteralKind;
  static const std::vector<ParamSpec> kNone;
  static const std::vector<ParamSpec> kTakeOff = {
      {"altitude", LK::Number, true, std::nullopt, ParamConstraint::Positive}};
  static const std::vector<ParamSpec> kFlyTo = {{"target", LK::Point, true, std::nullopt, ParamConstraint::None}};
  static const std::vector<ParamSpec> kFlyInArea = {
      {"area", LK::Rect, true, std::nullopt, ParamConstraint::None},
      {"spacing", LK::Number, true, std::nullopt, ParamConstraint::Positive}};
  static const std::vector<ParamSpec> kHover = {
      {"duration_s", LK::Number, true, std::nullopt, ParamConstraint::NonNegative}};
  switch (kind) {
    case NodeKind::TakeOff: return kTakeOff;
    case NodeKind::FlyTo: return kFlyTo;
    case NodeKind::FlyInArea: return kFlyInArea;
    case NodeKind::Hover: return kHover;
    default: return kNone;
  }
}

TypedScope visible_result_types(const Mission& m, std::string_view at, const Registry& reg) {
  TypedScope scope;
  for (const auto& r : visible_results(m, at)) {
    if (const auto* def = reg.lookup(r.action_name)) scope.emplace_back(r.label, def->output_type);
  }
  return scope;
}

std::variant<ValueType, Diagnostic> condition_type(const Condition& c, const Registry& reg, const TypedScope& scope) {
  auto it = std::find_if(scope.begin(), scope.end(), [&](const auto& e) { return e.first == c.result_ref; });
  if (it == scope.end())
    return make_error("R002", "result '" + c.result_ref + "' is not visible here", c.span);
  ValueType current = it->second;
  for (std::size_t i = 0; i < c.processing_chain.size(); ++i) {
    const auto& step = c.processing_chain[i];
    const auto* def = reg.lookup(step.action_name);
    if (!def) return make_error("R001", "unknown processing action '" + step.action_name + "'", step.span);
    if (def->category != ActionCategory::Processing)
      return make_error("R007", "'" + step.action_name + "' is a " + std::string(to_string(def->category)) +
                                    " action and cannot process a result",
                        step.span);
    if (def->input_type != current)
      return make_error("T001",
                        "processing step " + std::to_string(i + 1) + ": '" + step.action_name + "' expects " +
                            std::string(to_string(*def->input_type)) + ", got " + std::string(to_string(current)),
                        step.span);
    current = def->output_type;
  }
  return current;
}

namespace {

class Analyzer {
 public:
  Analyzer(const Mission& m, const Registry& reg) : m_(m), reg_(reg) {}

  AnalysisReport run() {
    resolve_types();
    for (const auto& f : m_.filters()) {
      for (const auto& a : f.actions) check_action(a, ActionCategory::Filter, "filter '" + f.name + "'");
    }
    for (const auto& p : m_.parallels()) check_parallel(p);
    for (const auto& n : m_.nodes()) check_node(n);
    check_structure();
    check_unused();
    sort_diagnostics(report_.diagnostics);
    return std::move(report_);
  }

 private:
  void add(Diagnostic d) { report_.diagnostics.push_back(std::move(d)); }

  void resolve_types() {
    auto visit = [&](const std::vector<ActionInstance>& actions) {
      for (const auto& a : actions) {
        if (!a.result_label) continue;
        if (const auto* def = reg_.lookup(a.action_name)) report_.resolved_types[*a.result_label] = def->output_type;
      }
    };
    for (const auto& f : m_.filters()) visit(f.actions);
    for (const auto& p : m_.parallels()) visit(p.actions);
    for (const auto& n : m_.nodes()) visit(n.embedded_actions);
  }

  void check_action(const ActionInstance& a, ActionCategory expected, const std::string& where) {
    const auto* def = reg_.lookup(a.action_name);
    if (!def) {
      add(make_error("R001", "unknown action '" + a.action_name + "'", a.span));
      return;
    }
    if (def->category != expected) {
      add(make_error("R007",
                     "'" + a.action_name + "' is a " + std::string(to_string(def->category)) + " action; " + where +
                         " needs a " + std::string(to_string(expected)) + " action",
                     a.span));
      return;
    }
    for (auto& d : validate_instance(a, *def)) add(std::move(d));
  }

  void check_condition(const Condition& c, const TypedScope& scope) {
    // A result whose action is unknown has no type; R001 already covers it.
    if (report_.resolved_types.count(c.result_ref) == 0 && label_exists(c.result_ref)) return;

    auto typed = condition_type(c, reg_, scope);
    if (auto* d = std::get_if<Diagnostic>(&typed)) {
      if (d->code == "R002" && label_exists(c.result_ref)) {
        d->message = "result '" + c.result_ref + "' is out of scope here; conditions may only read results of " +
                     "the preceding routing element or its parallel blocks";
      } else if (d->code == "R002") {
        d->message = "no action produces result '" + c.result_ref + "'";
      }
      add(std::move(*d));
      return;
    }
    for (const auto& step : c.processing_chain) {
      if (const auto* def = reg_.lookup(step.action_name)) {
        for (auto& d : validate_instance(step, *def)) add(std::move(d));
      }
    }
    ValueType type = std::get<ValueType>(typed);
    if (is_ordering(c.comparator) && type != ValueType::Number) {
      add(make_error("T003",
                     "ordering comparator '" + std::string(symbol(c.comparator)) + "' needs a Number, condition yields " +
                         std::string(to_string(type)),
                     c.span));
      return;
    }
    auto literal_type = value_type_of(kind_of(c.reference_value));
    if (literal_type != type)
      add(make_error("T002",
                     "condition yields " + std::string(to_string(type)) + " but is compared with a " +
                         std::string(to_string(kind_of(c.reference_value))) + " literal",
                     c.span));
  }

  bool label_exists(const std::string& label) const {
    auto in = [&](const std::vector<ActionInstance>& actions) {
      return std::any_of(actions.begin(), actions.end(), [&](const ActionInstance& a) { return a.result_label == label; });
    };
    if (std::any_of(m_.parallels().begin(), m_.parallels().end(), [&](const auto& p) { return in(p.actions); }))
      return true;
    return std::any_of(m_.nodes().begin(), m_.nodes().end(), [&](const auto& n) { return in(n.embedded_actions); });
  }

  void check_parallel(const ParallelDecl& p) {
    if (p.period_s && !(*p.period_s > 0.0))
      add(make_error("T007", "period of parallel block '" + p.name + "' must be positive", p.span));
    for (const auto& a : p.actions) check_action(a, ActionCategory::Regular, "parallel block '" + p.name + "'");
    if (!p.until) return;

    const Node* target = m_.find_node(p.until->target);
    if (!target) {
      add(make_error("R005", "until target '" + p.until->target + "' is not a label in the flow", p.until->span));
    } else if (!is_routing(target->kind) || target->kind == NodeKind::TakeOff) {
      add(make_error("R005", "until target '" + p.until->target + "' must be a routing element other than takeoff",
                     p.until->span));
    }
    TypedScope own;
    for (const auto& a : p.actions) {
      if (!a.result_label) continue;
      if (const auto* def = reg_.lookup(a.action_name)) own.emplace_back(*a.result_label, def->output_type);
    }
    check_condition(p.until->condition, own);
  }

  void check_node(const Node& n) {
    if (n.kind == NodeKind::Branch) {
      check_condition(*n.condition, visible_result_types(m_, n.id, reg_));
      return;
    }
    for (auto& d : validate_params(n.params, routing_schema(n.kind), std::string(keyword(n.kind)), n.span))
      add(std::move(d));
    if (n.kind == NodeKind::FlyInArea) {
      if (const auto* area = n.params.find("area"); area && std::holds_alternative<Rect>(*area)) {
        const auto& r = std::get<Rect>(*area);
        if (!(r.x1 > r.x0 && r.y1 >= r.y0))
          add(make_error("T007", "area must satisfy x0 < x1 and y0 <= y1", n.span));
      }
    }
    for (const auto& a : n.embedded_actions) check_action(a, ActionCategory::Regular, "routing element '" + n.id + "'");
    if (n.filter_ref && !m_.find_filter(*n.filter_ref))
      add(make_error("R003", "unknown filter '" + *n.filter_ref + "'", n.span));
    for (const auto& ref : n.parallel_refs) {
      if (!m_.find_parallel(ref)) add(make_error("R004", "unknown parallel block '" + ref + "'", n.span));
    }
  }

  // Control-flow successors including until jumps of attached parallels.
  std::vector<std::string> flow_successors(const Node& n) const {
    std::vector<std::string> out;
    for (const auto& [label, to] : successors(m_, n.id)) out.push_back(to);
    for (const auto& ref : n.parallel_refs) {
      const auto* p = m_.find_parallel(ref);
      if (p && p->until && m_.find_node(p->until->target)) out.push_back(p->until->target);
    }
    return out;
  }

  void check_structure() {
    auto reached = reachable(m_);
    for (const auto& n : m_.nodes()) {
      if (!reached.count(n.id)) add(make_error("S001", "'" + n.id + "' is unreachable from takeoff", n.span));
    }

    // Backward search from touchdown.
    std::map<std::string, std::vector<std::string>> reverse;
    for (const auto& n : m_.nodes()) {
      for (const auto& to : flow_successors(n)) reverse[to].push_back(n.id);
    }
    std::set<std::string> finishing{m_.touchdown().id};
    std::deque<std::string> frontier{m_.touchdown().id};
    while (!frontier.empty()) {
      auto id = frontier.front();
      frontier.pop_front();
      for (const auto& from : reverse[id]) {
        if (finishing.insert(from).second) frontier.push_back(from);
      }
    }
    for (const auto& n : m_.nodes()) {
      if (reached.count(n.id) && !finishing.count(n.id))
        add(make_error("S002", "no path leads from '" + n.id + "' to touchdown", n.span));
    }

    // Cycles made only of branches would loop without time passing.
    for (const auto& n : m_.nodes()) {
      if (n.kind != NodeKind::Branch) continue;
      std::set<std::string> seen;
      std::deque<std::string> q;
      for (const auto& [label, to] : successors(m_, n.id)) q.push_back(to);
      bool cyclic = false;
      while (!q.empty() && !cyclic) {
        auto id = q.front();
        q.pop_front();
        if (id == n.id) {
          cyclic = true;
          break;
        }
        const Node* next = m_.find_node(id);
        if (next->kind != NodeKind::Branch || !seen.insert(id).second) continue;
        for (const auto& [label, to] : successors(m_, id)) q.push_back(to);
      }
      if (cyclic)
        add(make_error("S003", "branch '" + n.id + "' lies on a cycle with no routing element", n.span));
    }
  }

  void check_unused() {
    std::set<std::string> filters;
    std::set<std::string> parallels;
    for (const auto& n : m_.nodes()) {
      if (n.filter_ref) filters.insert(*n.filter_ref);
      parallels.insert(n.parallel_refs.begin(), n.parallel_refs.end());
    }
    for (const auto& f : m_.filters()) {
      if (!filters.count(f.name))
        add(make_warning("W001", "filter '" + f.name + "' is never attached to a routing element", f.span));
    }
    for (const auto& p : m_.parallels()) {
      if (!parallels.count(p.name))
        add(make_warning("W001", "parallel block '" + p.name + "' is never attached to a routing element", p.span));
    }
  }

  const Mission& m_;
  const Registry& reg_;
  AnalysisReport report_;
};

}  // namespace

AnalysisReport analyze(const Mission& m, const Registry& reg) { return Analyzer(m, reg).run(); }

}  // namespace skymission
