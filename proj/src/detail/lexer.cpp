#include "detail/lexer.hpp"

#include <cctype>

#include "detail/utf8.hpp"
#include "kgforge/error.hpp"

namespace kgforge::detail {

namespace {

bool is_name_start(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '_' || u >= 0x80;
}

bool is_name_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '-' || u >= 0x80;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

bool Token::is_keyword(std::string_view word) const {
  if (kind != Tok::Word || text.size() != word.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(text[i])) !=
        std::toupper(static_cast<unsigned char>(word[i]))) {
      return false;
    }
  }
  return true;
}

std::string describe(const Token& token) {
  switch (token.kind) {
    case Tok::End: return "end of input";
    case Tok::IriRef: return "<" + token.text + ">";
    case Tok::PName: return token.prefix + ":" + token.text;
    case Tok::Blank: return "_:" + token.text;
    case Tok::Var: return "?" + token.text;
    case Tok::String: return "string literal";
    case Tok::AtWord: return "@" + token.text;
    case Tok::DoubleCaret: return "'^^'";
    case Tok::Integer:
    case Tok::Decimal:
    case Tok::Double: return "number " + token.text;
    case Tok::Word: return "'" + token.text + "'";
    case Tok::Punct: return std::string("'") + token.punct + "'";
  }
  return "token";
}

void Lexer::fail(const std::string& message) const {
  fail_at(current_, message);
}

void Lexer::fail_at(const Token& token, const std::string& message) const {
  throw ParseError(message, token.line, token.column);
}

void Lexer::fail_here(const std::string& message) const {
  throw ParseError(message, line_, column_);
}

void Lexer::bump(std::size_t n) {
  for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }
}

void Lexer::skip_ws_and_comments() {
  while (pos_ < text_.size()) {
    char c = ch();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      bump();
    } else if (c == '#') {
      while (pos_ < text_.size() && ch() != '\n') bump();
    } else {
      break;
    }
  }
}

void Lexer::advance() {
  skip_ws_and_comments();
  Token t;
  t.line = line_;
  t.column = column_;
  if (pos_ >= text_.size()) {
    t.kind = Tok::End;
    current_ = std::move(t);
    return;
  }
  char c = ch();
  if (c == '<') {
    lex_iri(t);
  } else if (c == '"' || c == '\'') {
    lex_string(t);
  } else if ((c == '?' || c == '$') && is_name_char(ch(1))) {
    bump();
    t.kind = Tok::Var;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(ch())) ||
                                   ch() == '_' ||
                                   static_cast<unsigned char>(ch()) >= 0x80)) {
      t.text += ch();
      bump();
    }
  } else if (c == '_' && ch(1) == ':') {
    bump(2);
    t.kind = Tok::Blank;
    while (pos_ < text_.size() && is_name_char(ch())) {
      t.text += ch();
      bump();
    }
    if (t.text.empty()) fail_here("empty blank node label");
  } else if (c == '@') {
    bump();
    t.kind = Tok::AtWord;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(ch())) || ch() == '-')) {
      t.text += ch();
      bump();
    }
    if (t.text.empty()) fail_here("expected word after '@'");
  } else if (c == '^' && ch(1) == '^') {
    bump(2);
    t.kind = Tok::DoubleCaret;
  } else if (is_digit(c) || ((c == '+' || c == '-') && is_digit(ch(1)))) {
    lex_number(t);
  } else if (is_name_start(c) || c == ':') {
    lex_name(t);
  } else {
    t.kind = Tok::Punct;
    t.punct = c;
    bump();
  }
  current_ = std::move(t);
}

void Lexer::append_escape(std::string& out, bool allow_char_escapes) {
  // Positioned on the backslash.
  bump();
  char e = ch();
  if (e == 'u' || e == 'U') {
    int digits = e == 'u' ? 4 : 8;
    bump();
    char32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      int v = hex_value(ch());
      if (v < 0) fail_here("invalid unicode escape");
      cp = cp * 16 + static_cast<char32_t>(v);
      bump();
    }
    if (!append_utf8(out, cp)) fail_here("invalid code point in escape");
    return;
  }
  if (!allow_char_escapes) fail_here("invalid escape in IRI");
  switch (e) {
    case 't': out += '\t'; break;
    case 'b': out += '\b'; break;
    case 'n': out += '\n'; break;
    case 'r': out += '\r'; break;
    case 'f': out += '\f'; break;
    case '"': out += '"'; break;
    case '\'': out += '\''; break;
    case '\\': out += '\\'; break;
    default: fail_here("invalid escape sequence");
  }
  bump();
}

void Lexer::lex_iri(Token& t) {
  bump();  // '<'
  t.kind = Tok::IriRef;
  while (true) {
    if (pos_ >= text_.size()) fail_here("unterminated IRI");
    char c = ch();
    if (c == '>') break;
    if (c == '\\') {
      append_escape(t.text, false);
      continue;
    }
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      fail_here("whitespace in IRI");
    }
    t.text += c;
    bump();
  }
  bump();
}

void Lexer::lex_string(Token& t) {
  t.kind = Tok::String;
  char quote = ch();
  bool long_form = ch(1) == quote && ch(2) == quote;
  bump(long_form ? 3 : 1);
  while (true) {
    if (pos_ >= text_.size()) fail_here("unterminated string literal");
    char c = ch();
    if (long_form) {
      if (c == quote && ch(1) == quote && ch(2) == quote) {
        bump(3);
        return;
      }
    } else {
      if (c == quote) {
        bump();
        return;
      }
      if (c == '\n' || c == '\r') fail_here("newline in string literal");
    }
    if (c == '\\') {
      append_escape(t.text, true);
      continue;
    }
    t.text += c;
    bump();
  }
}

void Lexer::lex_number(Token& t) {
  t.kind = Tok::Integer;
  if (ch() == '+' || ch() == '-') {
    t.text += ch();
    bump();
  }
  while (is_digit(ch())) {
    t.text += ch();
    bump();
  }
  if (ch() == '.' && is_digit(ch(1))) {
    t.kind = Tok::Decimal;
    t.text += '.';
    bump();
    while (is_digit(ch())) {
      t.text += ch();
      bump();
    }
  }
  if ((ch() == 'e' || ch() == 'E') &&
      (is_digit(ch(1)) || ((ch(1) == '+' || ch(1) == '-') && is_digit(ch(2))))) {
    t.kind = Tok::Double;
    t.text += ch();
    bump();
    if (ch() == '+' || ch() == '-') {
      t.text += ch();
      bump();
    }
    while (is_digit(ch())) {
      t.text += ch();
      bump();
    }
  }
}

std::string Lexer::lex_local() {
  std::string local;
  while (pos_ < text_.size()) {
    char c = ch();
    if (is_name_char(c) || c == ':' || c == '.') {
      local += c;
      bump();
    } else if (c == '%' && hex_value(ch(1)) >= 0 && hex_value(ch(2)) >= 0) {
      local.append(text_.substr(pos_, 3));
      bump(3);
    } else if (c == '\\' && ch(1) != '\0' &&
               std::string_view("_~.-!$&'()*+,;=/?#@%").find(ch(1)) !=
                   std::string_view::npos) {
      local += ch(1);
      bump(2);
    } else {
      break;
    }
  }
  // A trailing '.' ends the statement, not the name.
  while (!local.empty() && local.back() == '.') {
    local.pop_back();
    --pos_;
    --column_;
  }
  return local;
}

void Lexer::lex_name(Token& t) {
  std::string word;
  while (pos_ < text_.size() && (is_name_char(ch()) || ch() == '.')) {
    word += ch();
    bump();
  }
  while (!word.empty() && word.back() == '.') {
    word.pop_back();
    --pos_;
    --column_;
  }
  if (ch() == ':') {
    bump();
    t.kind = Tok::PName;
    t.prefix = std::move(word);
    t.text = lex_local();
    return;
  }
  t.kind = Tok::Word;
  t.text = std::move(word);
}

}  // namespace kgforge::detail
