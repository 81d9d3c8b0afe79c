#include "kgforge/turtle.hpp"

#include "detail/lexer.hpp"
#include "detail/syntax.hpp"

namespace kgforge {

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

class TurtleParser {
 public:
  explicit TurtleParser(std::string_view text) : lexer_(text) {}

  Graph parse() {
    while (lexer_.peek().kind != Tok::End) {
      const Token& t = lexer_.peek();
      if (t.kind == Tok::AtWord && t.text == "prefix") {
        lexer_.next();
        parse_prefix_body();
        expect_punct('.');
      } else if (t.kind == Tok::AtWord && t.text == "base") {
        lexer_.fail("@base is not supported");
      } else if (t.is_keyword("PREFIX")) {
        lexer_.next();
        parse_prefix_body();
      } else if (t.is_keyword("BASE")) {
        lexer_.fail("BASE is not supported");
      } else {
        parse_triples();
        expect_punct('.');
      }
    }
    return std::move(graph_);
  }

 private:
  void expect_punct(char c) {
    if (!lexer_.peek().is_punct(c)) {
      lexer_.fail(std::string("expected '") + c + "', found " +
                  detail::describe(lexer_.peek()));
    }
    lexer_.next();
  }

  void reject_unsupported(const Token& t) {
    if (t.is_punct('[')) lexer_.fail("unsupported blank node property list");
    if (t.is_punct('(')) lexer_.fail("unsupported collection");
  }

  void parse_prefix_body() {
    Token name = lexer_.next();
    if (name.kind != Tok::PName || !name.text.empty()) {
      lexer_.fail_at(name, "expected prefix name, found " + detail::describe(name));
    }
    Token iri = lexer_.next();
    if (iri.kind != Tok::IriRef) {
      lexer_.fail_at(iri, "expected IRI, found " + detail::describe(iri));
    }
    prefixes_[name.prefix] = detail::resolve_iri_token(lexer_, iri, prefixes_).str();
  }

  Term parse_subject() {
    const Token& t = lexer_.peek();
    reject_unsupported(t);
    if (t.kind == Tok::Blank) return detail::make_blank(lexer_, lexer_.next());
    Token tok = lexer_.next();
    return detail::resolve_iri_token(lexer_, tok, prefixes_);
  }

  Iri parse_verb() {
    Token t = lexer_.next();
    if (t.kind == Tok::Word && t.text == "a") return Iri(std::string(rdf::kType));
    return detail::resolve_iri_token(lexer_, t, prefixes_);
  }

  Term parse_object() {
    const Token& t = lexer_.peek();
    reject_unsupported(t);
    if (t.kind == Tok::Blank) return detail::make_blank(lexer_, lexer_.next());
    if (detail::is_literal_start(t)) return detail::parse_literal(lexer_, prefixes_);
    Token tok = lexer_.next();
    return detail::resolve_iri_token(lexer_, tok, prefixes_);
  }

  void parse_triples() {
    Term subject = parse_subject();
    while (true) {
      Iri predicate = parse_verb();
      while (true) {
        graph_.insert(Triple(subject, predicate, parse_object()));
        if (!lexer_.peek().is_punct(',')) break;
        lexer_.next();
      }
      if (!lexer_.peek().is_punct(';')) break;
      while (lexer_.peek().is_punct(';')) lexer_.next();
      if (lexer_.peek().is_punct('.')) break;
    }
  }

  Lexer lexer_;
  detail::PrefixTable prefixes_;
  Graph graph_;
};

}  // namespace

Graph parse_turtle_subset(std::string_view text) {
  return TurtleParser(text).parse();
}

}  // namespace kgforge
