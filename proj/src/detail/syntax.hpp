#pragma once

// Term-level helpers shared by the Turtle-subset and SPARQL-subset parsers.

#include <map>
#include <optional>
#include <string>

#include "detail/lexer.hpp"
#include "kgforge/error.hpp"
#include "kgforge/term.hpp"

namespace kgforge::detail {

using PrefixTable = std::map<std::string, std::string>;

inline Iri resolve_iri_token(Lexer& lexer, const Token& token,
                             const PrefixTable& prefixes) {
  if (token.kind == Tok::IriRef) {
    if (!Iri::is_valid(token.text)) {
      if (token.text.find(':') == std::string::npos) {
        lexer.fail_at(token, "relative IRI <" + token.text + ">");
      }
      lexer.fail_at(token, "invalid IRI <" + token.text + ">");
    }
    return Iri(token.text);
  }
  if (token.kind == Tok::PName) {
    auto it = prefixes.find(token.prefix);
    if (it == prefixes.end()) {
      lexer.fail_at(token, "unknown prefix '" + token.prefix + ":'");
    }
    std::string value = it->second + token.text;
    if (!Iri::is_valid(value)) {
      lexer.fail_at(token, "invalid IRI <" + value + ">");
    }
    return Iri(std::move(value));
  }
  lexer.fail_at(token, "expected IRI, found " + describe(token));
}

inline bool is_iri_token(const Token& token) {
  return token.kind == Tok::IriRef || token.kind == Tok::PName;
}

inline bool is_literal_start(const Token& token) {
  return token.kind == Tok::String || token.kind == Tok::Integer ||
         token.kind == Tok::Decimal || token.kind == Tok::Double ||
         token.is_keyword("true") || token.is_keyword("false");
}

// Consumes a literal starting at the current token (string with optional
// language tag or datatype, number, or boolean).
inline Literal parse_literal(Lexer& lexer, const PrefixTable& prefixes) {
  Token token = lexer.next();
  switch (token.kind) {
    case Tok::Integer:
      return Literal(token.text, Iri(std::string(xsd::kInteger)));
    case Tok::Decimal:
      return Literal(token.text, Iri(std::string(xsd::kDecimal)));
    case Tok::Double:
      return Literal(token.text, Iri(std::string(xsd::kDouble)));
    case Tok::Word:
      if (token.is_keyword("true") || token.is_keyword("false")) {
        std::string lower = token.is_keyword("true") ? "true" : "false";
        return Literal(lower, Iri(std::string(xsd::kBoolean)));
      }
      break;
    case Tok::String: {
      if (lexer.peek().kind == Tok::AtWord) {
        Token tag = lexer.next();
        if (!Literal::is_valid_language(tag.text)) {
          lexer.fail_at(tag, "invalid language tag '" + tag.text + "'");
        }
        return Literal::lang(std::move(token.text), tag.text);
      }
      if (lexer.peek().kind == Tok::DoubleCaret) {
        lexer.next();
        Token dt = lexer.next();
        Iri datatype = resolve_iri_token(lexer, dt, prefixes);
        if (datatype.str() == rdf::kLangString) {
          lexer.fail_at(dt, "rdf:langString literal without language tag");
        }
        return Literal(std::move(token.text), std::move(datatype));
      }
      return Literal(std::move(token.text));
    }
    default:
      break;
  }
  lexer.fail_at(token, "expected literal, found " + describe(token));
}

inline BlankNode make_blank(Lexer& lexer, const Token& token) {
  if (!BlankNode::is_valid_label(token.text)) {
    lexer.fail_at(token, "invalid blank node label '" + token.text + "'");
  }
  return BlankNode(token.text);
}

}  // namespace kgforge::detail
