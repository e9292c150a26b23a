#include "skymission/parser.hpp"

#include <map>
#include <set>
#include <tuple>
#include <variant>

#include "syntax.hpp"

namespace skymission {

namespace {

using syntax::SyntaxError;
using syntax::Tok;
using syntax::TokenStream;

struct Step {
  Node node;
  SourceSpan label_span;
  // Branch targets, resolved after the whole flow is read.
  std::string true_target;
  std::string false_target;
  SourceSpan true_span;
  SourceSpan false_span;
};

struct Program {
  std::string name;
  MissionDecls decls;
  std::vector<Step> steps;
  SourceSpan flow_open;
  SourceSpan flow_close;
};

class MissionParser {
 public:
  explicit MissionParser(std::vector<syntax::Token> tokens) : ts_(std::move(tokens)) {}

  Program run() {
    try {
      return parse_mission();
    } catch (const SyntaxError& e) {
      // Running out of input inside braces is reported at the open brace.
      if (e.code() == "P001" && ts_.at(Tok::End) && !open_.empty())
        throw SyntaxError("P003", "block opened here is never closed", open_.back());
      throw;
    }
  }

 private:
  SourceSpan open_block() {
    auto span = ts_.expect(Tok::LBrace, "'{'").span;
    open_.push_back(span);
    return span;
  }

  SourceSpan close_block() {
    auto span = ts_.expect(Tok::RBrace, "'}'").span;
    open_.pop_back();
    return span;
  }

  [[noreturn]] void unknown_keyword(std::string_view where) {
    const auto& t = ts_.peek();
    throw SyntaxError("P002", "unknown keyword '" + t.text + "' " + std::string(where), t.span);
  }

  Program parse_mission() {
    Program prog;
    if (ts_.at(Tok::Ident) && !ts_.at_word("mission")) unknown_keyword("at top level; expected 'mission'");
    ts_.expect_word("mission");
    prog.name = ts_.expect(Tok::String, "the mission name as a string").text;
    open_block();
    while (!ts_.at_word("flow")) {
      if (ts_.at_word("filter")) {
        prog.decls.filters.push_back(parse_filter());
      } else if (ts_.at_word("parallel")) {
        prog.decls.parallels.push_back(parse_parallel());
      } else if (ts_.at(Tok::Ident)) {
        unknown_keyword("in mission body; expected 'filter', 'parallel' or 'flow'");
      } else {
        ts_.unexpected("'filter', 'parallel' or 'flow'");
      }
    }
    ts_.expect_word("flow");
    prog.flow_open = open_block();
    while (!ts_.at(Tok::RBrace)) {
      if (ts_.at(Tok::End)) ts_.unexpected("a flow step or '}'");
      prog.steps.push_back(parse_step());
    }
    prog.flow_close = close_block();
    close_block();
    if (!ts_.at(Tok::End)) ts_.unexpected("end of input after the mission");
    return prog;
  }

  std::vector<ActionInstance> parse_action_block() {
    open_block();
    std::vector<ActionInstance> actions;
    do {
      actions.push_back(syntax::parse_action(ts_));
    } while (!ts_.at(Tok::RBrace));
    close_block();
    return actions;
  }

  FilterDecl parse_filter() {
    FilterDecl f;
    f.span = ts_.peek().span;
    ts_.expect_word("filter");
    f.name = ts_.expect_name("a filter name").text;
    f.actions = parse_action_block();
    return f;
  }

  ParallelDecl parse_parallel() {
    ParallelDecl p;
    p.span = ts_.peek().span;
    ts_.expect_word("parallel");
    p.name = ts_.expect_name("a parallel block name").text;
    if (ts_.accept_word("every")) {
      p.period_s = ts_.expect(Tok::Number, "a period in seconds").number;
      ts_.expect_word("s");
    }
    p.actions = parse_action_block();
    if (ts_.at_word("until")) {
      UntilClause u;
      u.span = ts_.next().span;
      u.condition = syntax::parse_condition(ts_);
      ts_.expect(Tok::Arrow, "'->'");
      u.target = ts_.expect_name("a target label").text;
      p.until = std::move(u);
    }
    return p;
  }

  Step parse_step() {
    Step step;
    step.node.span = ts_.peek().span;
    if (ts_.at(Tok::Ident) && ts_.peek(1).kind == Tok::Colon) {
      step.label_span = ts_.peek().span;
      step.node.id = ts_.expect_name("a step label").text;
      step.node.explicit_label = true;
      ts_.next();
    }
    if (ts_.at_word("if")) {
      ts_.next();
      step.node.kind = NodeKind::Branch;
      step.node.condition = syntax::parse_condition(ts_);
      ts_.expect(Tok::Arrow, "'->'");
      step.true_span = ts_.peek().span;
      step.true_target = ts_.expect_name("the true-branch target label").text;
      ts_.expect_word("else");
      ts_.expect(Tok::Arrow, "'->'");
      step.false_span = ts_.peek().span;
      step.false_target = ts_.expect_name("the false-branch target label").text;
      return step;
    }
    if (!ts_.at(Tok::Ident)) ts_.unexpected("a routing element or 'if'");
    auto kind = routing_kind_from(ts_.peek().text);
    if (!kind) unknown_keyword("is not a routing element");
    ts_.next();
    step.node.kind = *kind;
    ts_.expect(Tok::LParen, "'('");
    syntax::parse_args(ts_, step.node.params, Tok::RParen);
    ts_.expect(Tok::RParen, "')'");
    if (ts_.at(Tok::LBrace)) step.node.embedded_actions = parse_action_block();
    if (ts_.accept_word("with")) {
      if (!ts_.at_word("filter")) {
        if (ts_.at(Tok::Ident)) unknown_keyword("after 'with'; expected 'filter'");
        ts_.unexpected("'filter'");
      }
      ts_.next();
      step.node.filter_ref = ts_.expect_name("a filter name").text;
    }
    if (ts_.accept_word("parallel")) {
      do {
        step.node.parallel_refs.push_back(ts_.expect_name("a parallel block name").text);
      } while (ts_.accept(Tok::Comma));
    }
    return step;
  }

  TokenStream ts_;
  std::vector<SourceSpan> open_;
};

void collect_label_diags(const std::vector<ActionInstance>& actions, std::set<std::string>& seen,
                         std::vector<Diagnostic>& out) {
  for (const auto& a : actions) {
    if (a.result_label && !seen.insert(*a.result_label).second)
      out.push_back(make_error("P006", "result label '" + *a.result_label + "' is already defined", a.span));
  }
}

// Assigns ids, wires edges and checks what the grammar alone cannot.
std::variant<Mission, std::vector<Diagnostic>> assemble(Program prog) {
  std::vector<Diagnostic> diags;
  auto& steps = prog.steps;

  if (steps.empty()) {
    diags.push_back(make_error("P004", "flow must start with takeoff and end with touchdown", prog.flow_close));
    return diags;
  }

  std::set<std::string> explicit_ids;
  for (const auto& s : steps) {
    if (!s.node.explicit_label) continue;
    if (!explicit_ids.insert(s.node.id).second)
      diags.push_back(make_error("P006", "label '" + s.node.id + "' is already defined", s.label_span));
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto& n = steps[i].node;
    if (n.explicit_label) continue;
    n.id = std::string(keyword(n.kind)) + "_" + std::to_string(i);
    while (explicit_ids.count(n.id)) n.id += "_";
  }

  std::set<std::string> decl_names;
  for (const auto& f : prog.decls.filters) {
    if (!decl_names.insert("filter " + f.name).second)
      diags.push_back(make_error("P006", "filter '" + f.name + "' is already declared", f.span));
  }
  for (const auto& p : prog.decls.parallels) {
    if (!decl_names.insert("parallel " + p.name).second)
      diags.push_back(make_error("P006", "parallel block '" + p.name + "' is already declared", p.span));
  }
  std::set<std::string> labels;
  for (const auto& f : prog.decls.filters) collect_label_diags(f.actions, labels, diags);
  for (const auto& p : prog.decls.parallels) collect_label_diags(p.actions, labels, diags);
  for (const auto& s : steps) collect_label_diags(s.node.embedded_actions, labels, diags);

  if (steps.front().node.kind != NodeKind::TakeOff)
    diags.push_back(make_error("P004", "flow must start with takeoff", steps.front().node.span));
  if (steps.back().node.kind != NodeKind::TouchDown)
    diags.push_back(make_error("P004", "flow must end with touchdown", prog.flow_close));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& n = steps[i].node;
    if (n.kind == NodeKind::TakeOff && i != 0)
      diags.push_back(make_error("P004", "takeoff may only appear as the first step", n.span));
    if (n.kind == NodeKind::TouchDown && i + 1 != steps.size())
      diags.push_back(make_error("P004", "touchdown may only appear as the last step", n.span));
  }

  std::map<std::string, NodeKind> kinds;
  for (const auto& s : steps) kinds.emplace(s.node.id, s.node.kind);
  MissionFlow flow;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (s.node.kind == NodeKind::Branch) {
      for (const auto& [target, span, label] :
           {std::tuple{s.true_target, s.true_span, EdgeLabel::True},
            std::tuple{s.false_target, s.false_span, EdgeLabel::False}}) {
        auto it = kinds.find(target);
        if (it == kinds.end()) {
          diags.push_back(make_error("P007", "jump target '" + target + "' is not a label in this flow", span));
        } else if (it->second == NodeKind::TakeOff) {
          diags.push_back(make_error("P004", "takeoff cannot be a jump target", span));
        } else {
          flow.edges.push_back(Edge{s.node.id, target, label});
        }
      }
    } else if (s.node.kind != NodeKind::TouchDown && i + 1 < steps.size()) {
      flow.edges.push_back(Edge{s.node.id, steps[i + 1].node.id, EdgeLabel::Next});
    }
  }

  if (!diags.empty()) return diags;

  for (auto& s : steps) flow.nodes.push_back(std::move(s.node));
  try {
    return build_mission(std::move(prog.name), std::move(prog.decls), std::move(flow));
  } catch (const MissionError& e) {
    // The checks above cover every structural rule; kept as a backstop.
    diags.push_back(make_error("P004", e.what(), prog.flow_open));
    return diags;
  }
}

}  // namespace

ParseResult parse(std::string_view source) {
  ParseResult result;
  try {
    MissionParser parser(syntax::tokenize(source));
    auto assembled = assemble(parser.run());
    if (auto* m = std::get_if<Mission>(&assembled)) {
      result.mission.emplace(std::move(*m));
    } else {
      result.diagnostics = std::move(std::get<std::vector<Diagnostic>>(assembled));
    }
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(e.diagnostic());
  }
  sort_diagnostics(result.diagnostics);
  return result;
}

}  // namespace skymission
