#pragma once

// Tokenizer shared by the Turtle-subset and SPARQL-subset parsers.

#include <cstddef>
#include <string>
#include <string_view>

namespace kgforge::detail {

enum class Tok {
  End,
  IriRef,   // text = IRI with escapes decoded
  PName,    // prefix:local; prefix in `prefix`, local in `text`
  Blank,    // text = label
  Var,      // text = name without '?'/'$'
  String,   // text = decoded value
  AtWord,   // text = word after '@' (language tag or @prefix/@base)
  DoubleCaret,
  Integer,
  Decimal,
  Double,
  Word,     // bare word: keywords, 'a', true/false
  Punct,    // single character in `punct`
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::string prefix;
  char punct = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_punct(char c) const { return kind == Tok::Punct && punct == c; }
  // Case-insensitive keyword match on bare words.
  bool is_keyword(std::string_view word) const;
};

std::string describe(const Token& token);

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }
  Token next() {
    Token t = std::move(current_);
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& token, const std::string& message) const;

 private:
  void advance();
  void skip_ws_and_comments();
  char ch(std::size_t offset = 0) const {
    return pos_ + offset < text_.size() ? text_[pos_ + offset] : '\0';
  }
  void bump(std::size_t n = 1);
  [[noreturn]] void fail_here(const std::string& message) const;

  void lex_iri(Token& t);
  void lex_string(Token& t);
  void lex_number(Token& t);
  void lex_name(Token& t);
  std::string lex_local();
  void append_escape(std::string& out, bool allow_char_escapes);

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  Token current_;
};

}  // namespace kgforge::detail
