#include "skymission/flightscript.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "skymission/parser.hpp"
#include "syntax.hpp"

namespace skymission {

using syntax::Tok;
using syntax::TokenStream;

std::string FlightScript::text() const {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

namespace {

std::string act_line(const ActionInstance& a) {
  std::string out = "ACT ";
  if (a.result_label) out += *a.result_label + ":";
  out += a.action_name;
  for (const auto& [k, v] : a.params.entries()) out += " " + k + "=" + to_source(v);
  return out;
}

ActionInstance resolved(const ActionInstance& a, const Registry& reg) {
  ActionInstance out = a;
  if (const auto* def = reg.lookup(a.action_name)) out.params = resolve_params(a.params, def->params);
  return out;
}

std::string auto_id(NodeKind kind, std::size_t index, const std::set<std::string>& labeled) {
  std::string id = std::string(keyword(kind)) + "_" + std::to_string(index);
  while (labeled.count(id)) id += "_";
  return id;
}

std::string num(const ParamMap& p, std::string_view key) {
  const auto* lit = p.find(key);
  return lit && std::holds_alternative<double>(*lit) ? format_number(std::get<double>(*lit)) : "0.0";
}

std::string routing_line(const Node& n) {
  switch (n.kind) {
    case NodeKind::TakeOff: return "TAKEOFF " + num(n.params, "altitude");
    case NodeKind::TouchDown: return "TOUCHDOWN";
    case NodeKind::FlyHome: return "HOME";
    case NodeKind::Hover: return "HOVER " + num(n.params, "duration_s");
    case NodeKind::FlyTo: {
      Point p = std::get<Point>(*n.params.find("target"));
      return "GOTO " + format_number(p.x) + " " + format_number(p.y) + " " + format_number(p.z);
    }
    case NodeKind::FlyInArea: {
      Rect r = std::get<Rect>(*n.params.find("area"));
      return "SWEEP " + format_number(r.x0) + " " + format_number(r.y0) + " " + format_number(r.x1) + " " +
             format_number(r.y1) + " " + num(n.params, "spacing");
    }
    case NodeKind::Branch: break;
  }
  return {};
}

}  // namespace

FlightScript gen_flightscript(const Mission& m, const Registry& reg) {
  const auto& nodes = m.nodes();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i].id] = i;

  auto edge = [&](const Node& n, EdgeLabel want) -> std::optional<std::string> {
    for (const auto& [label, to] : successors(m, n.id)) {
      if (label == want) return to;
    }
    return std::nullopt;
  };

  // Ids the reader must see spelled out: explicit labels, jump targets, and
  // any id the reader would not re-derive from the step position.
  std::set<std::string> labeled;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.explicit_label) labeled.insert(n.id);
    if (n.kind == NodeKind::Branch) {
      labeled.insert(*edge(n, EdgeLabel::True));
      labeled.insert(*edge(n, EdgeLabel::False));
    } else if (auto next = edge(n, EdgeLabel::Next); next && index[*next] != i + 1) {
      labeled.insert(*next);
    }
  }
  for (const auto& p : m.parallels()) {
    if (p.until) labeled.insert(p.until->target);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (labeled.count(nodes[i].id) || auto_id(nodes[i].kind, i, labeled) == nodes[i].id) continue;
      labeled.insert(nodes[i].id);
      changed = true;
    }
  }

  FlightScript fs;
  auto& out = fs.lines;
  out.push_back("MISSION " + quote(m.name()));
  for (const auto& f : m.filters()) {
    out.push_back("DEF FILTER " + f.name);
    for (const auto& a : f.actions) out.push_back(act_line(resolved(a, reg)));
    out.push_back("END");
  }

  std::map<std::string, std::string> cond_of;  // branch id or "par:" name -> condition id
  int next_cond = 0;
  for (const auto& n : nodes) {
    if (n.kind != NodeKind::Branch) continue;
    std::string id = "c" + std::to_string(next_cond++);
    cond_of[n.id] = id;
    out.push_back("COND " + id + " " + to_source(*n.condition));
  }
  for (const auto& p : m.parallels()) {
    if (!p.until) continue;
    std::string id = "c" + std::to_string(next_cond++);
    cond_of["par:" + p.name] = id;
    out.push_back("COND " + id + " " + to_source(p.until->condition));
  }
  for (const auto& p : m.parallels()) {
    std::string head = "DEF PAR " + p.name;
    if (p.period_s) head += " " + format_number(*p.period_s);
    out.push_back(head);
    for (const auto& a : p.actions) out.push_back(act_line(resolved(a, reg)));
    if (p.until) out.push_back("UNTIL " + cond_of["par:" + p.name] + " " + p.until->target);
    out.push_back("END");
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (labeled.count(n.id)) out.push_back("LABEL " + n.id);
    if (n.kind == NodeKind::Branch) {
      out.push_back("BR " + cond_of[n.id] + " " + *edge(n, EdgeLabel::True) + " " + *edge(n, EdgeLabel::False));
      continue;
    }
    if (n.filter_ref) out.push_back("FILTER " + *n.filter_ref);
    for (const auto& ref : n.parallel_refs) {
      std::string line = "PAR " + ref;
      if (const auto* p = m.find_parallel(ref); p && p->period_s) line += " " + format_number(*p->period_s);
      out.push_back(line);
    }
    out.push_back(routing_line(n));
    for (const auto& a : n.embedded_actions) out.push_back(act_line(resolved(a, reg)));
    for (std::size_t k = 0; k < n.parallel_refs.size(); ++k) out.push_back("ENDPAR");
    if (auto next = edge(n, EdgeLabel::Next); next && index[*next] != i + 1) out.push_back("JMP " + *next);
  }
  return fs;
}

namespace {

// Drops a `#` comment that is not inside a string literal.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

class ScriptReader {
 public:
  ScriptProgram run(std::string_view text) {
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      line_ = line_no;
      auto body = strip_comment(text.substr(start, end - start));
      std::vector<syntax::Token> tokens;
      try {
        tokens = syntax::tokenize(body, line_no - 1);
      } catch (const syntax::SyntaxError& e) {
        fail(e.what());
      }
      if (tokens.size() > 1) {
        TokenStream ts(std::move(tokens));
        try {
          command(ts);
        } catch (const syntax::SyntaxError& e) {
          fail(e.what());
        }
      }
      if (end == text.size()) break;
      start = end + 1;
    }
    finish();
    return std::move(p_);
  }

 private:
  enum class Block { None, Filter, Parallel };

  [[noreturn]] void fail(const std::string& msg) const { throw FlightScriptError(line_, msg); }

  std::string word(TokenStream& ts, std::string_view what) { return ts.expect(Tok::Ident, what).text; }
  double number(TokenStream& ts) { return ts.expect(Tok::Number, "a number").number; }

  void end_of_line(TokenStream& ts) {
    if (!ts.at(Tok::End)) fail("unexpected " + syntax::describe(ts.peek()));
  }

  ActionInstance act(TokenStream& ts) {
    ActionInstance a;
    std::string first = word(ts, "an action name");
    if (ts.accept(Tok::Colon)) {
      a.result_label = first;
      a.action_name = word(ts, "an action name");
    } else {
      a.action_name = first;
    }
    while (!ts.at(Tok::End)) {
      std::string key = word(ts, "a parameter name");
      ts.expect(Tok::Assign, "'='");
      if (!a.params.insert(key, syntax::parse_literal(ts))) fail("parameter '" + key + "' given twice");
    }
    return a;
  }

  void command(TokenStream& ts) {
    std::string op = word(ts, "a command");
    if (!have_header_) {
      if (op != "MISSION") fail("a flight script starts with MISSION");
      p_.name = ts.expect(Tok::String, "a mission name").text;
      have_header_ = true;
      return end_of_line(ts);
    }
    if (block_ != Block::None) return block_command(op, ts);

    if (op == "DEF") {
      std::string kind = word(ts, "FILTER or PAR");
      if (kind == "FILTER") {
        p_.filters.push_back(FilterDecl{word(ts, "a filter name"), {}, {}});
        block_ = Block::Filter;
        block_line_ = line_;
      } else if (kind == "PAR") {
        ParallelDecl decl;
        decl.name = word(ts, "a parallel name");
        if (ts.at(Tok::Number)) decl.period_s = number(ts);
        p_.parallels.push_back(std::move(decl));
        block_ = Block::Parallel;
        block_line_ = line_;
      } else {
        fail("DEF expects FILTER or PAR");
      }
    } else if (op == "COND") {
      std::string id = word(ts, "a condition id");
      auto c = syntax::parse_condition(ts);
      if (!p_.conditions.emplace(id, std::move(c)).second) fail("condition '" + id + "' defined twice");
    } else if (op == "LABEL") {
      if (pending_label_) fail("two labels for one step");
      close_step();
      pending_label_ = word(ts, "a label");
    } else if (op == "FILTER") {
      close_step();
      if (pending_filter_) fail("a step takes one FILTER");
      pending_filter_ = word(ts, "a filter name");
    } else if (op == "PAR") {
      close_step();
      pending_pars_.push_back(word(ts, "a parallel name"));
      if (ts.at(Tok::Number)) number(ts);
    } else if (op == "ACT") {
      if (!open_step_) fail("ACT outside a routing step");
      if (open_step_closed_) fail("ACT after ENDPAR or JMP");
      p_.steps.back().element.embedded.push_back(act(ts));
    } else if (op == "ENDPAR") {
      if (!open_step_ || open_pars_ == 0) fail("ENDPAR without PAR");
      --open_pars_;
      open_step_closed_ = true;
    } else if (op == "JMP") {
      if (!open_step_) fail("JMP outside a routing step");
      if (p_.steps.back().jump) fail("a step takes one JMP");
      p_.steps.back().jump = word(ts, "a label");
      p_.steps.back().jump_line = line_;
      open_step_closed_ = true;
    } else if (op == "BR") {
      close_step();
      if (pending_filter_ || !pending_pars_.empty()) fail("FILTER/PAR cannot attach to BR");
      ScriptProgram::Step s;
      s.branch = true;
      s.cond = word(ts, "a condition id");
      s.if_true = word(ts, "a label");
      s.if_false = word(ts, "a label");
      push_step(std::move(s), NodeKind::Branch);
    } else {
      routing(op, ts);
    }
    end_of_line(ts);
  }

  void block_command(const std::string& op, TokenStream& ts) {
    if (op == "END") {
      block_ = Block::None;
    } else if (op == "ACT") {
      auto a = act(ts);
      if (block_ == Block::Filter) {
        p_.filters.back().actions.push_back(std::move(a));
      } else {
        p_.parallels.back().actions.push_back(std::move(a));
      }
    } else if (op == "UNTIL" && block_ == Block::Parallel) {
      if (p_.parallels.back().until) fail("a parallel block takes one UNTIL");
      std::string cond = word(ts, "a condition id");
      std::string target = word(ts, "a label");
      until_refs_.emplace_back(p_.parallels.size() - 1, cond, line_);
      p_.parallels.back().until = UntilClause{Condition{}, target, {}};
    } else {
      fail("unexpected '" + op + "' inside DEF block");
    }
    end_of_line(ts);
  }

  void routing(const std::string& op, TokenStream& ts) {
    close_step();
    ScriptProgram::Step s;
    auto& e = s.element;
    if (op == "TAKEOFF") {
      e.kind = NodeKind::TakeOff;
      e.params.insert("altitude", number(ts));
    } else if (op == "TOUCHDOWN") {
      e.kind = NodeKind::TouchDown;
    } else if (op == "HOME") {
      e.kind = NodeKind::FlyHome;
    } else if (op == "HOVER") {
      e.kind = NodeKind::Hover;
      e.params.insert("duration_s", number(ts));
    } else if (op == "GOTO") {
      e.kind = NodeKind::FlyTo;
      double x = number(ts), y = number(ts), z = number(ts);
      e.params.insert("target", Point{x, y, z});
    } else if (op == "SWEEP") {
      e.kind = NodeKind::FlyInArea;
      double x0 = number(ts), y0 = number(ts), x1 = number(ts), y1 = number(ts);
      e.params.insert("area", Rect{x0, y0, x1, y1});
      e.params.insert("spacing", number(ts));
    } else {
      fail("unknown command '" + op + "'");
    }
    e.filter = pending_filter_;
    e.parallels = pending_pars_;
    open_pars_ = pending_pars_.size();
    pending_filter_.reset();
    pending_pars_.clear();
    push_step(std::move(s), e.kind);
    open_step_ = true;
    open_step_closed_ = false;
  }

  void push_step(ScriptProgram::Step s, NodeKind kind) {
    s.line = line_;
    s.element.kind = kind;
    if (pending_label_) s.id = *pending_label_;
    explicit_.push_back(pending_label_.has_value());
    pending_label_.reset();
    p_.steps.push_back(std::move(s));
  }

  // A new step begins: the previous routing step must have closed its PARs.
  void close_step() {
    if (open_step_ && open_pars_ != 0) fail("missing ENDPAR");
    open_step_ = false;
  }

  void finish() {
    line_ = p_.steps.empty() ? line_ : p_.steps.back().line;
    if (!have_header_) fail("a flight script starts with MISSION");
    if (block_ != Block::None) {
      line_ = block_line_;
      fail("DEF block without END");
    }
    close_step();
    if (pending_label_ || pending_filter_ || !pending_pars_.empty()) fail("dangling LABEL/FILTER/PAR at end");
    if (p_.steps.empty() || p_.steps.front().element.kind != NodeKind::TakeOff) fail("script must start with TAKEOFF");
    if (std::none_of(p_.steps.begin(), p_.steps.end(),
                     [](const auto& s) { return !s.branch && s.element.kind == NodeKind::TouchDown; }))
      fail("script has no TOUCHDOWN");

    std::set<std::string> labeled;
    for (std::size_t i = 0; i < p_.steps.size(); ++i) {
      if (explicit_[i]) labeled.insert(p_.steps[i].id);
    }
    for (std::size_t i = 0; i < p_.steps.size(); ++i) {
      auto& s = p_.steps[i];
      if (!explicit_[i]) s.id = auto_id(s.branch ? NodeKind::Branch : s.element.kind, i, labeled);
      s.element.id = s.id;
      line_ = s.line;
      if (!p_.labels.emplace(s.id, i).second) fail("label '" + s.id + "' defined twice");
    }

    for (const auto& s : p_.steps) {
      line_ = s.line;
      auto need_label = [&](const std::string& l) {
        if (!p_.labels.count(l)) fail("undefined label '" + l + "'");
      };
      if (s.branch) {
        if (!p_.conditions.count(s.cond)) fail("undefined condition '" + s.cond + "'");
        need_label(s.if_true);
        need_label(s.if_false);
      } else {
        if (s.jump) {
          line_ = s.jump_line;
          need_label(*s.jump);
          line_ = s.line;
        }
        if (s.element.filter && std::none_of(p_.filters.begin(), p_.filters.end(),
                                             [&](const auto& f) { return f.name == *s.element.filter; }))
          fail("undefined filter '" + *s.element.filter + "'");
        for (const auto& ref : s.element.parallels) {
          if (std::none_of(p_.parallels.begin(), p_.parallels.end(), [&](const auto& d) { return d.name == ref; }))
            fail("undefined parallel block '" + ref + "'");
        }
      }
    }
    for (const auto& [idx, cond, line] : until_refs_) {
      line_ = line;
      auto it = p_.conditions.find(cond);
      if (it == p_.conditions.end()) fail("undefined condition '" + cond + "'");
      auto& until = *p_.parallels[idx].until;
      until.condition = it->second;
      if (!p_.labels.count(until.target)) fail("undefined label '" + until.target + "'");
    }
  }

  ScriptProgram p_;
  int line_ = 0;
  bool have_header_ = false;
  Block block_ = Block::None;
  int block_line_ = 0;
  std::optional<std::string> pending_label_;
  std::optional<std::string> pending_filter_;
  std::vector<std::string> pending_pars_;
  bool open_step_ = false;
  bool open_step_closed_ = false;
  std::size_t open_pars_ = 0;
  std::vector<bool> explicit_;
  std::vector<std::tuple<std::size_t, std::string, int>> until_refs_;
};

}  // namespace

ScriptProgram parse_flightscript(std::string_view text) { return ScriptReader().run(text); }

RoutingElement ScriptFlowSource::entry() const { return p_.steps.front().element; }

RoutingElement ScriptFlowSource::element(std::string_view id) const {
  auto it = p_.labels.find(std::string(id));
  if (it == p_.labels.end() || p_.steps[it->second].branch)
    throw SimulationError("no routing step '" + std::string(id) + "'");
  return p_.steps[it->second].element;
}

std::optional<RoutingElement> ScriptFlowSource::after(std::string_view completed, const BranchDecider& decide) const {
  auto it = p_.labels.find(std::string(completed));
  if (it == p_.labels.end()) throw SimulationError("no step '" + std::string(completed) + "'");
  const auto& done = p_.steps[it->second];
  if (done.element.kind == NodeKind::TouchDown) return std::nullopt;
  std::size_t pc = done.jump ? p_.labels.at(*done.jump) : it->second + 1;
  for (std::size_t hops = 0;; ++hops) {
    if (pc >= p_.steps.size()) throw SimulationError("program runs past the last step");
    if (hops > p_.steps.size()) throw SimulationError("branch cycle at '" + p_.steps[pc].id + "'");
    const auto& s = p_.steps[pc];
    if (!s.branch) return s.element;
    pc = p_.labels.at(decide(s.id, p_.conditions.at(s.cond)) ? s.if_true : s.if_false);
  }
}

const FilterDecl* ScriptFlowSource::filter(std::string_view name) const {
  for (const auto& f : p_.filters) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const ParallelDecl* ScriptFlowSource::parallel(std::string_view name) const {
  for (const auto& p : p_.parallels) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Trace run_script(const ScriptProgram& p, const Scenario& s, const Registry& reg, const SimConfig& cfg) {
  ScriptFlowSource flow(p);
  return Simulator(flow, s, reg, cfg).run();
}

}  // namespace skymission
