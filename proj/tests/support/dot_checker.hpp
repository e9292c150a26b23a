// A standalone reader for the Graphviz DOT language (graph, node, edge and
// attribute statements, subgraphs, ports, comments, quoted and numeral IDs).
// Written from the published grammar, independent of the generator.
#pragma once

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace testing_support {

struct DotGraph {
  bool strict = false;
  bool directed = false;
  std::string name;
  std::map<std::string, std::map<std::string, std::string>> nodes;
  struct Edge {
    std::string from, to;
    std::map<std::string, std::string> attrs;
  };
  std::vector<Edge> edges;
};

class DotSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DotReader {
 public:
  explicit DotReader(std::string text) : src_(std::move(text)) { lex(); }

  DotGraph read() {
    DotGraph g;
    if (keyword("strict")) {
      g.strict = true;
      ++pos_;
    }
    if (keyword("digraph")) {
      g.directed = true;
    } else if (!keyword("graph")) {
      fail("expected 'graph' or 'digraph'");
    }
    ++pos_;
    if (is_id()) g.name = toks_[pos_++].text;
    graph_ = &g;
    expect("{");
    stmt_list();
    expect("}");
    if (pos_ != toks_.size()) fail("trailing input after graph");
    return g;
  }

 private:
  struct Tok {
    enum Kind { Id, Punct } kind;
    std::string text;
    bool quoted = false;
  };

  [[noreturn]] void fail(const std::string& msg) const {
    std::string at = pos_ < toks_.size() ? " at '" + toks_[pos_].text + "'" : " at end";
    throw DotSyntaxError(msg + at);
  }

  void lex() {
    std::size_t i = 0;
    bool line_start = true;
    while (i < src_.size()) {
      char c = src_[i];
      if (c == '\n') {
        line_start = true;
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (line_start && c == '#') {  // preprocessor-style line
        while (i < src_.size() && src_[i] != '\n') ++i;
        continue;
      }
      line_start = false;
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
        while (i < src_.size() && src_[i] != '\n') ++i;
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '*') {
        auto end = src_.find("*/", i + 2);
        if (end == std::string::npos) throw DotSyntaxError("unterminated comment");
        i = end + 2;
        continue;
      }
      if (c == '"') {
        std::string text;
        ++i;
        while (true) {
          if (i >= src_.size()) throw DotSyntaxError("unterminated string");
          if (src_[i] == '\\' && i + 1 < src_.size() && src_[i + 1] == '"') {
            text += '"';
            i += 2;
          } else if (src_[i] == '\\' && i + 1 < src_.size() && src_[i + 1] == '\n') {
            i += 2;  // line continuation
          } else if (src_[i] == '"') {
            ++i;
            break;
          } else {
            text += src_[i++];
          }
        }
        toks_.push_back({Tok::Id, text, true});
        continue;
      }
      if (c == '<') {
        int depth = 0;
        std::size_t start = i;
        do {
          if (i >= src_.size()) throw DotSyntaxError("unterminated HTML string");
          if (src_[i] == '<') ++depth;
          if (src_[i] == '>') --depth;
          ++i;
        } while (depth > 0);
        toks_.push_back({Tok::Id, src_.substr(start, i - start), true});
        continue;
      }
      if (c == '-' && i + 1 < src_.size() && (src_[i + 1] == '>' || src_[i + 1] == '-')) {
        toks_.push_back({Tok::Punct, src_.substr(i, 2)});
        i += 2;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80) {
        std::size_t start = i;
        while (i < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '_' ||
                                   static_cast<unsigned char>(src_[i]) >= 0x80))
          ++i;
        toks_.push_back({Tok::Id, src_.substr(start, i - start)});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
        std::size_t start = i;
        if (c == '-') ++i;
        bool digits = false;
        while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) {
          ++i;
          digits = true;
        }
        if (i < src_.size() && src_[i] == '.') {
          ++i;
          while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) {
            ++i;
            digits = true;
          }
        }
        if (!digits) throw DotSyntaxError("malformed numeral");
        toks_.push_back({Tok::Id, src_.substr(start, i - start)});
        continue;
      }
      if (std::string("{}[];,=:").find(c) != std::string::npos) {
        toks_.push_back({Tok::Punct, std::string(1, c)});
        ++i;
        continue;
      }
      throw DotSyntaxError(std::string("unexpected character '") + c + "'");
    }
  }

  static std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  bool keyword(const char* word) const {
    return pos_ < toks_.size() && toks_[pos_].kind == Tok::Id && !toks_[pos_].quoted && lower(toks_[pos_].text) == word;
  }
  bool punct(const char* p) const {
    return pos_ < toks_.size() && toks_[pos_].kind == Tok::Punct && toks_[pos_].text == p;
  }
  bool is_id() const {
    if (pos_ >= toks_.size() || toks_[pos_].kind != Tok::Id) return false;
    if (toks_[pos_].quoted) return true;
    auto w = lower(toks_[pos_].text);
    return w != "node" && w != "edge" && w != "graph" && w != "digraph" && w != "subgraph" && w != "strict";
  }
  void expect(const char* p) {
    if (!punct(p)) fail(std::string("expected '") + p + "'");
    ++pos_;
  }
  std::string id() {
    if (!is_id()) fail("expected an ID");
    return toks_[pos_++].text;
  }

  void stmt_list() {
    while (!punct("}")) {
      if (pos_ >= toks_.size()) fail("unterminated statement list");
      stmt();
      if (punct(";")) ++pos_;
    }
  }

  std::map<std::string, std::string> attr_list() {
    std::map<std::string, std::string> attrs;
    if (!punct("[")) fail("expected '['");
    while (punct("[")) {
      ++pos_;
      while (!punct("]")) {
        std::string key = id();
        expect("=");
        attrs[key] = id();
        if (punct(",") || punct(";")) ++pos_;
      }
      ++pos_;
    }
    return attrs;
  }

  // node_id or subgraph; returns node ids it denotes.
  std::vector<std::string> operand() {
    if (keyword("subgraph") || punct("{")) return subgraph();
    std::string n = id();
    if (punct(":")) {
      ++pos_;
      id();
      if (punct(":")) {
        ++pos_;
        id();
      }
    }
    graph_->nodes[n];
    return {n};
  }

  std::vector<std::string> subgraph() {
    if (keyword("subgraph")) {
      ++pos_;
      if (is_id()) ++pos_;
    }
    auto before = graph_->nodes;
    expect("{");
    stmt_list();
    expect("}");
    std::vector<std::string> members;
    for (const auto& [k, v] : graph_->nodes) {
      if (!before.count(k)) members.push_back(k);
    }
    return members;
  }

  void stmt() {
    if (keyword("graph") || keyword("node") || keyword("edge")) {
      ++pos_;
      attr_list();
      return;
    }
    if (is_id() && pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == Tok::Punct && toks_[pos_ + 1].text == "=") {
      pos_ += 2;
      id();
      return;
    }
    auto left = operand();
    const char* op = graph_->directed ? "->" : "--";
    if (punct("->") || punct("--")) {
      std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> links;
      while (punct("->") || punct("--")) {
        if (!punct(op)) fail(std::string("edge operator must be '") + op + "'");
        ++pos_;
        auto right = operand();
        links.emplace_back(left, right);
        left = right;
      }
      std::map<std::string, std::string> attrs;
      if (punct("[")) attrs = attr_list();
      for (const auto& [from, to] : links) {
        for (const auto& a : from) {
          for (const auto& b : to) graph_->edges.push_back({a, b, attrs});
        }
      }
      return;
    }
    if (punct("[")) {
      auto attrs = attr_list();
      for (const auto& n : left) {
        for (const auto& [k, v] : attrs) graph_->nodes[n][k] = v;
      }
    }
  }

  std::string src_;
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  DotGraph* graph_ = nullptr;
};

inline DotGraph read_dot(const std::string& text) { return DotReader(text).read(); }

}  // namespace testing_support
