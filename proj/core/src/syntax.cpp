#include "syntax.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace skymission::syntax {

namespace {

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
 public:
  Lexer(std::string_view src, int line_offset) : src_(src), line_(1 + line_offset) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        Token end;
        end.kind = Tok::End;
        end.span = here();
        out.push_back(end);
        return out;
      }
      out.push_back(lex_one());
    }
  }

 private:
  SourceSpan here() const { return SourceSpan{line_, col_, line_, col_}; }

  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char ahead(std::size_t n) const { return pos_ + n < src_.size() ? src_[pos_ + n] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = cur();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && ahead(1) == '/') {
        while (pos_ < src_.size() && cur() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token finish(Token t, SourceSpan start) {
    t.span = start;
    t.span.end_line = line_;
    t.span.end_column = col_;
    return t;
  }

  Token simple(Tok kind, std::size_t width, SourceSpan start) {
    Token t;
    t.kind = kind;
    t.text = std::string(src_.substr(pos_, width));
    for (std::size_t i = 0; i < width; ++i) advance();
    return finish(std::move(t), start);
  }

  Token lex_one() {
    auto start = here();
    char c = cur();
    if (is_ident_start(c)) {
      Token t;
      t.kind = Tok::Ident;
      while (is_ident_char(cur())) {
        t.text += cur();
        advance();
      }
      return finish(std::move(t), start);
    }
    if (is_digit(c) || (c == '-' && is_digit(ahead(1)))) return lex_number(start);
    if (c == '"') return lex_string(start);
    switch (c) {
      case '{': return simple(Tok::LBrace, 1, start);
      case '}': return simple(Tok::RBrace, 1, start);
      case '(': return simple(Tok::LParen, 1, start);
      case ')': return simple(Tok::RParen, 1, start);
      case ',': return simple(Tok::Comma, 1, start);
      case ':': return simple(Tok::Colon, 1, start);
      case '-':
        if (ahead(1) == '>') return simple(Tok::Arrow, 2, start);
        break;
      case '=':
        return ahead(1) == '=' ? simple(Tok::Cmp, 2, start) : simple(Tok::Assign, 1, start);
      case '!':
        if (ahead(1) == '=') return simple(Tok::Cmp, 2, start);
        break;
      case '<':
      case '>':
        return ahead(1) == '=' ? simple(Tok::Cmp, 2, start) : simple(Tok::Cmp, 1, start);
      default:
        break;
    }
    std::string shown;
    auto byte = static_cast<unsigned char>(c);
    if (byte >= 0x20 && byte < 0x7f) {
      shown = std::string("'") + c + "'";
    } else {
      std::array<char, 8> buf{};
      std::snprintf(buf.data(), buf.size(), "0x%02X", byte);
      shown = buf.data();
    }
    throw SyntaxError("P005", "invalid character " + shown, start);
  }

  Token lex_number(SourceSpan start) {
    std::size_t begin = pos_;
    if (cur() == '-') advance();
    while (is_digit(cur())) advance();
    if (cur() == '.') {
      if (!is_digit(ahead(1))) throw SyntaxError("P005", "malformed number: digits expected after '.'", start);
      advance();
      while (is_digit(cur())) advance();
    }
    if ((cur() == 'e' || cur() == 'E') &&
        (is_digit(ahead(1)) || ((ahead(1) == '+' || ahead(1) == '-') && is_digit(ahead(2))))) {
      advance();
      if (cur() == '+' || cur() == '-') advance();
      while (is_digit(cur())) advance();
    }
    Token t;
    t.kind = Tok::Number;
    t.text = std::string(src_.substr(begin, pos_ - begin));
    const char* first = t.text.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, t.text.data() + t.text.size(), t.number);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(t.number))
      throw SyntaxError("P005", "malformed number '" + t.text + "'", start);
    return finish(std::move(t), start);
  }

  Token lex_string(SourceSpan start) {
    advance();  // opening quote
    Token t;
    t.kind = Tok::String;
    while (true) {
      if (pos_ >= src_.size() || cur() == '\n')
        throw SyntaxError("P005", "unterminated string literal", start);
      char c = cur();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        switch (cur()) {
          case '"': t.text += '"'; break;
          case '\\': t.text += '\\'; break;
          case 'n': t.text += '\n'; break;
          case 't': t.text += '\t'; break;
          default: throw SyntaxError("P005", "unknown escape sequence in string literal", here());
        }
        advance();
        continue;
      }
      t.text += c;
      advance();
    }
    return finish(std::move(t), start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, int line_offset) { return Lexer(source, line_offset).run(); }

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::Number: return "number " + t.text;
    case Tok::String: return "string " + quote(t.text);
    case Tok::End: return "end of input";
    default: return "'" + t.text + "'";
  }
}

bool is_reserved(std::string_view word) {
  static constexpr std::array<std::string_view, 13> kReserved = {
      "mission", "filter", "parallel", "every", "until", "flow", "with",
      "if",      "else",   "true",     "false", "point", "rect"};
  for (auto w : kReserved) {
    if (w == word) return true;
  }
  return false;
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != Tok::End) tokens_.push_back(Token{});
}

const Token& TokenStream::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

const Token& TokenStream::next() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::accept(Tok kind) {
  if (!at(kind)) return false;
  next();
  return true;
}

bool TokenStream::accept_word(std::string_view word) {
  if (!at_word(word)) return false;
  next();
  return true;
}

void TokenStream::unexpected(std::string_view expected) const {
  throw SyntaxError("P001", "unexpected " + describe(peek()) + ", expected " + std::string(expected), peek().span);
}

const Token& TokenStream::expect(Tok kind, std::string_view what) {
  if (!at(kind)) unexpected(what);
  return next();
}

void TokenStream::expect_word(std::string_view word) {
  if (!at_word(word)) unexpected("'" + std::string(word) + "'");
  next();
}

const Token& TokenStream::expect_name(std::string_view what) {
  if (!at(Tok::Ident) || is_reserved(peek().text)) unexpected(what);
  return next();
}

namespace {

double expect_number(TokenStream& ts) { return ts.expect(Tok::Number, "a number").number; }

}  // namespace

Literal parse_literal(TokenStream& ts) {
  const Token& t = ts.peek();
  switch (t.kind) {
    case Tok::Number: return ts.next().number;
    case Tok::String: return ts.next().text;
    case Tok::Ident:
      if (ts.accept_word("true")) return true;
      if (ts.accept_word("false")) return false;
      if (ts.accept_word("point")) {
        ts.expect(Tok::LParen, "'('");
        Point p;
        p.x = expect_number(ts);
        ts.expect(Tok::Comma, "','");
        p.y = expect_number(ts);
        ts.expect(Tok::Comma, "','");
        p.z = expect_number(ts);
        ts.expect(Tok::RParen, "')'");
        return p;
      }
      if (ts.accept_word("rect")) {
        ts.expect(Tok::LParen, "'('");
        Rect r;
        r.x0 = expect_number(ts);
        ts.expect(Tok::Comma, "','");
        r.y0 = expect_number(ts);
        ts.expect(Tok::Comma, "','");
        r.x1 = expect_number(ts);
        ts.expect(Tok::Comma, "','");
        r.y1 = expect_number(ts);
        ts.expect(Tok::RParen, "')'");
        return r;
      }
      break;
    default:
      break;
  }
  ts.unexpected("a literal (number, string, true, false, point(...), rect(...))");
}

void parse_args(TokenStream& ts, ParamMap& params, Tok stop) {
  if (ts.at(stop)) return;
  while (true) {
    const Token& key = ts.expect_name("a parameter name");
    auto key_span = key.span;
    std::string name = key.text;
    ts.expect(Tok::Assign, "'='");
    Literal value = parse_literal(ts);
    if (!params.insert(name, std::move(value)))
      throw SyntaxError("P006", "parameter '" + name + "' given twice", key_span);
    if (!ts.accept(Tok::Comma)) break;
  }
}

ActionInstance parse_action(TokenStream& ts) {
  ActionInstance inst;
  inst.span = ts.peek().span;
  const Token& first = ts.expect_name("an action");
  if (ts.accept(Tok::Colon)) {
    inst.result_label = first.text;
    inst.action_name = ts.expect_name("an action name").text;
  } else {
    inst.action_name = first.text;
  }
  ts.expect(Tok::LParen, "'('");
  parse_args(ts, inst.params, Tok::RParen);
  ts.expect(Tok::RParen, "')'");
  return inst;
}

namespace {

constexpr int kMaxChainDepth = 64;

// Fills `chain` innermost first; returns the result label at the core.
std::string parse_chain(TokenStream& ts, std::vector<ActionInstance>& chain, int depth = 0) {
  const Token& head = ts.expect_name("a result label or processing action");
  if (!ts.at(Tok::LParen)) return head.text;
  if (depth >= kMaxChainDepth)
    throw SyntaxError("P001", "processing chain nested deeper than " + std::to_string(kMaxChainDepth), head.span);
  ActionInstance step;
  step.action_name = head.text;
  step.span = head.span;
  ts.next();
  std::string core = parse_chain(ts, chain, depth + 1);
  if (ts.accept(Tok::Comma)) parse_args(ts, step.params, Tok::RParen);
  ts.expect(Tok::RParen, "')'");
  chain.push_back(std::move(step));
  return core;
}

Comparator comparator_from(const std::string& text) {
  if (text == "==") return Comparator::EQ;
  if (text == "!=") return Comparator::NE;
  if (text == "<") return Comparator::LT;
  if (text == "<=") return Comparator::LE;
  if (text == ">") return Comparator::GT;
  return Comparator::GE;
}

}  // namespace

Condition parse_condition(TokenStream& ts) {
  Condition c;
  c.span = ts.peek().span;
  c.result_ref = parse_chain(ts, c.processing_chain);
  c.comparator = comparator_from(ts.expect(Tok::Cmp, "a comparator (==, !=, <, <=, >, >=)").text);
  c.reference_value = parse_literal(ts);
  return c;
}

}  // namespace skymission::syntax
