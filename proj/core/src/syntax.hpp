// Tokenizer and shared sub-grammars (literals, arguments, action instances,
// conditions). Used by the mission parser and the flight-script reader.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skymission/diagnostic.hpp"
#include "skymission/mission.hpp"

namespace skymission::syntax {

enum class Tok {
  Ident,
  Number,
  String,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Comma,
  Assign,
  Colon,
  Arrow,
  Cmp,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier, comparator symbol, or decoded string contents
  double number = 0.0;
  SourceSpan span;
};

/// A failure carrying a stable diagnostic code.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string code, const std::string& message, SourceSpan at)
      : std::runtime_error(message), code_(std::move(code)), at_(at) {}

  const std::string& code() const { return code_; }
  const SourceSpan& at() const { return at_; }
  Diagnostic diagnostic() const { return make_error(code_, what(), at_); }

 private:
  std::string code_;
  SourceSpan at_;
};

/// Splits source into tokens; `//` comments and whitespace are dropped.
/// `line_offset` shifts reported lines (for single-line sub-sources).
/// Throws SyntaxError P005 on invalid characters or malformed literals.
std::vector<Token> tokenize(std::string_view source, int line_offset = 0);

std::string describe(const Token& t);

bool is_reserved(std::string_view word);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens);

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_word(std::string_view word) const { return peek().kind == Tok::Ident && peek().text == word; }
  bool accept(Tok kind);
  bool accept_word(std::string_view word);

  /// Consumes a token of `kind` or throws P001 naming `what` was expected.
  const Token& expect(Tok kind, std::string_view what);
  void expect_word(std::string_view word);
  /// Identifier that is not a reserved word.
  const Token& expect_name(std::string_view what);

  [[noreturn]] void unexpected(std::string_view expected) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

Literal parse_literal(TokenStream& ts);

/// `name = literal (, name = literal)*` up to (not including) `stop`.
/// Duplicate names raise P006.
void parse_args(TokenStream& ts, ParamMap& params, Tok stop);

/// `(label :)? name ( args? )`
ActionInstance parse_action(TokenStream& ts);

/// `chain cmp literal` where chain is `name(chain, args?)` or a result label.
Condition parse_condition(TokenStream& ts);

}  // namespace skymission::syntax
