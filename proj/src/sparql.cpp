#include "kgforge/sparql.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "detail/lexer.hpp"
#include "detail/syntax.hpp"
#include "kgforge/error.hpp"

namespace kgforge {

std::string_view function_name(Function fn) {
  switch (fn) {
    case Function::Iri: return "IRI";
    case Function::Concat: return "CONCAT";
    case Function::EncodeForUri: return "ENCODE_FOR_URI";
    case Function::Str: return "STR";
  }
  return "?";
}

Expression Expression::constant(Term term) {
  Expression e;
  e.kind_ = Kind::Constant;
  e.constant_ = std::move(term);
  return e;
}

Expression Expression::variable(std::string name) {
  Expression e;
  e.kind_ = Kind::VariableRef;
  e.variable_ = std::move(name);
  return e;
}

Expression Expression::call(Function fn, std::vector<Expression> args) {
  if (fn == Function::Concat ? args.empty() : args.size() != 1) {
    throw Error(std::string(function_name(fn)) + " called with " +
                std::to_string(args.size()) + " argument(s)");
  }
  Expression e;
  e.kind_ = Kind::Call;
  e.function_ = fn;
  e.args_ = std::move(args);
  return e;
}

void Expression::collect_variables(std::vector<std::string>& out) const {
  if (kind_ == Kind::VariableRef) out.push_back(variable_);
  for (const Expression& a : args_) a.collect_variables(out);
}

std::vector<std::string> pattern_variables(
    const std::vector<TriplePattern>& patterns) {
  std::vector<std::string> out;
  auto add = [&](const PatternTerm& pt) {
    if (const auto* v = std::get_if<Variable>(&pt)) {
      if (std::find(out.begin(), out.end(), v->name) == out.end()) {
        out.push_back(v->name);
      }
    }
  };
  for (const TriplePattern& p : patterns) {
    add(p.subject);
    add(p.predicate);
    add(p.object);
  }
  return out;
}

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

constexpr std::string_view kUnsupportedKeywords[] = {
    "FILTER", "OPTIONAL", "UNION", "MINUS",  "VALUES", "SERVICE",
    "EXISTS", "NOT",      "GROUP", "HAVING", "FROM",   "NAMED",
    "DESCRIBE", "INSERT", "DELETE", "LOAD",  "CLEAR",  "DROP",
    "CREATE", "WITH",     "USING", "BASE",   "REDUCED"};

class SparqlParser {
 public:
  SparqlParser(std::string_view text, const PrefixMap& defaults)
      : lexer_(text), prefixes_(defaults) {}

  Query parse() {
    parse_prologue();
    Query q;
    const Token& t = peek();
    if (t.is_keyword("SELECT")) {
      next();
      parse_select_clause(q);
      reject_dataset_clause();
      if (peek().is_keyword("WHERE")) next();
      parse_group(q);
    } else if (t.is_keyword("CONSTRUCT")) {
      next();
      q.form = QueryForm::Construct;
      expect_punct('{');
      q.construct_template = parse_triples_until('}', /*in_template=*/true);
      expect_punct('}');
      reject_dataset_clause();
      if (!peek().is_keyword("WHERE")) fail("expected WHERE");
      next();
      parse_group(q);
    } else if (t.is_keyword("ASK")) {
      next();
      q.form = QueryForm::Ask;
      reject_dataset_clause();
      if (peek().is_keyword("WHERE")) next();
      parse_group(q);
    } else {
      reject_unsupported(t);
      fail("expected SELECT, CONSTRUCT or ASK, found " + detail::describe(t));
    }
    parse_modifiers(q);
    if (peek().kind != Tok::End) {
      reject_unsupported(peek());
      fail("unexpected " + detail::describe(peek()) + " after query");
    }
    q.prefixes = prefixes_;
    validate(q);
    return q;
  }

 private:
  const Token& peek() const { return lexer_.peek(); }
  Token next() { return lexer_.next(); }
  [[noreturn]] void fail(const std::string& message) { lexer_.fail(message); }

  void expect_punct(char c) {
    if (!peek().is_punct(c)) {
      reject_unsupported(peek());
      fail(std::string("expected '") + c + "', found " + detail::describe(peek()));
    }
    next();
  }

  void reject_unsupported(const Token& t) {
    if (t.kind == Tok::Word) {
      for (std::string_view kw : kUnsupportedKeywords) {
        if (t.is_keyword(kw)) {
          std::string upper(kw);
          lexer_.fail_at(t, "unsupported feature: " + upper);
        }
      }
    }
  }

  void parse_prologue() {
    while (true) {
      if (peek().is_keyword("PREFIX")) {
        next();
        Token name = next();
        if (name.kind != Tok::PName || !name.text.empty()) {
          lexer_.fail_at(name, "expected prefix name, found " + detail::describe(name));
        }
        Token iri = next();
        if (iri.kind != Tok::IriRef) {
          lexer_.fail_at(iri, "expected IRI, found " + detail::describe(iri));
        }
        prefixes_[name.prefix] = detail::resolve_iri_token(lexer_, iri, prefixes_).str();
      } else if (peek().is_keyword("BASE")) {
        fail("unsupported feature: BASE");
      } else {
        return;
      }
    }
  }

  void reject_dataset_clause() {
    if (peek().is_keyword("FROM")) fail("unsupported feature: FROM");
  }

  std::string expect_variable() {
    Token t = next();
    if (t.kind != Tok::Var) {
      lexer_.fail_at(t, "expected variable, found " + detail::describe(t));
    }
    return t.text;
  }

  void parse_select_clause(Query& q) {
    q.form = QueryForm::Select;
    if (peek().is_keyword("DISTINCT")) {
      next();
      q.distinct = true;
    }
    if (peek().is_punct('*')) {
      next();
      q.select_all = true;
      return;
    }
    while (true) {
      if (peek().kind == Tok::Var) {
        q.projection.push_back(next().text);
      } else if (peek().is_punct('(')) {
        if (q.count) fail("only one aggregate is supported");
        next();
        if (!peek().is_keyword("COUNT")) {
          reject_unsupported(peek());
          fail("unsupported feature: projection expression");
        }
        next();
        CountAggregate agg;
        expect_punct('(');
        if (peek().is_keyword("DISTINCT")) {
          next();
          agg.distinct = true;
        }
        if (peek().is_punct('*')) {
          next();
        } else {
          agg.counted = expect_variable();
        }
        expect_punct(')');
        if (!peek().is_keyword("AS")) fail("expected AS");
        next();
        agg.alias = expect_variable();
        expect_punct(')');
        q.count = std::move(agg);
      } else {
        break;
      }
    }
    if (q.projection.empty() && !q.count) fail("empty projection");
    if (q.count && !q.projection.empty()) {
      fail("unsupported feature: GROUP BY (aggregate mixed with variables)");
    }
  }

  void parse_group(Query& q) {
    expect_punct('{');
    if (peek().is_keyword("GRAPH")) {
      next();
      if (peek().kind == Tok::Var) fail("unsupported feature: GRAPH variable");
      Token g = next();
      q.graph = detail::resolve_iri_token(lexer_, g, prefixes_);
      expect_punct('{');
      parse_group_body(q);
      expect_punct('}');
      if (peek().is_punct('.')) next();
      if (!peek().is_punct('}')) {
        reject_unsupported(peek());
        fail("unsupported feature: patterns outside the GRAPH block");
      }
    } else {
      parse_group_body(q);
    }
    expect_punct('}');
  }

  void parse_group_body(Query& q) {
    while (!peek().is_punct('}')) {
      const Token& t = peek();
      if (t.kind == Tok::End) fail("unterminated group pattern");
      if (t.is_keyword("BIND")) {
        next();
        q.binds.push_back(parse_bind());
        if (peek().is_punct('.')) next();
        continue;
      }
      if (t.is_keyword("GRAPH")) fail("unsupported feature: nested GRAPH");
      if (t.is_punct('{')) fail("unsupported feature: nested group pattern");
      reject_unsupported(t);
      if (t.kind == Tok::Word && t.text != "a" && !t.is_keyword("true") &&
          !t.is_keyword("false")) {
        fail("unexpected " + detail::describe(t) + " in group pattern");
      }
      auto block = parse_triples_until('}', /*in_template=*/false, /*stop_at_keyword=*/true);
      q.where.insert(q.where.end(), block.begin(), block.end());
    }
  }

  BindClause parse_bind() {
    expect_punct('(');
    Expression e = parse_expression();
    if (!peek().is_keyword("AS")) fail("expected AS in BIND");
    next();
    std::string var = expect_variable();
    expect_punct(')');
    return BindClause{std::move(var), std::move(e)};
  }

  Expression parse_expression() {
    const Token& t = peek();
    if (t.kind == Tok::Var) return Expression::variable(next().text);
    if (detail::is_literal_start(t)) {
      return Expression::constant(detail::parse_literal(lexer_, prefixes_));
    }
    if (detail::is_iri_token(t)) {
      Token tok = next();
      return Expression::constant(detail::resolve_iri_token(lexer_, tok, prefixes_));
    }
    if (t.kind == Tok::Word) {
      Token name = next();
      if (!peek().is_punct('(')) {
        lexer_.fail_at(name, "unexpected " + detail::describe(name) + " in expression");
      }
      Function fn;
      if (name.is_keyword("IRI") || name.is_keyword("URI")) {
        fn = Function::Iri;
      } else if (name.is_keyword("CONCAT")) {
        fn = Function::Concat;
      } else if (name.is_keyword("ENCODE_FOR_URI")) {
        fn = Function::EncodeForUri;
      } else if (name.is_keyword("STR")) {
        fn = Function::Str;
      } else {
        lexer_.fail_at(name, "unknown function " + name.text);
      }
      next();  // '('
      std::vector<Expression> args;
      if (!peek().is_punct(')')) {
        while (true) {
          args.push_back(parse_expression());
          if (!peek().is_punct(',')) break;
          next();
        }
      }
      expect_punct(')');
      try {
        return Expression::call(fn, std::move(args));
      } catch (const Error& e) {
        lexer_.fail_at(name, e.what());
      }
    }
    if (t.kind == Tok::Punct && std::string_view("+-*/<>=!&|").find(t.punct) !=
                                    std::string_view::npos) {
      fail(std::string("unsupported feature: operator '") + t.punct + "'");
    }
    fail("expected expression, found " + detail::describe(t));
  }

  PatternTerm parse_node(bool in_template, bool subject_position) {
    const Token& t = peek();
    if (t.is_punct('[')) fail("unsupported feature: blank node property list");
    if (t.is_punct('(')) fail("unsupported feature: collection");
    if (t.kind == Tok::Var) return Variable{next().text};
    if (t.kind == Tok::Blank) {
      Token b = next();
      if (in_template) return Term(detail::make_blank(lexer_, b));
      return Variable{std::string(kBlankVariablePrefix) + b.text};
    }
    if (detail::is_literal_start(t)) {
      (void)subject_position;
      return Term(detail::parse_literal(lexer_, prefixes_));
    }
    if (detail::is_iri_token(t)) {
      Token tok = next();
      return Term(detail::resolve_iri_token(lexer_, tok, prefixes_));
    }
    reject_unsupported(t);
    fail("expected term, found " + detail::describe(t));
  }

  PatternTerm parse_verb() {
    const Token& t = peek();
    if (t.is_punct('^') || t.is_punct('!') || t.is_punct('(')) {
      fail("unsupported feature: property path");
    }
    PatternTerm verb = [&]() -> PatternTerm {
      if (t.kind == Tok::Var) return Variable{next().text};
      if (t.kind == Tok::Word && t.text == "a") {
        next();
        return Term(Iri(std::string(rdf::kType)));
      }
      if (detail::is_iri_token(t)) {
        Token tok = next();
        return Term(detail::resolve_iri_token(lexer_, tok, prefixes_));
      }
      if (t.kind == Tok::Blank || detail::is_literal_start(t)) {
        fail("predicate must be an IRI or a variable");
      }
      reject_unsupported(t);
      fail("expected predicate, found " + detail::describe(t));
    }();
    const Token& after = peek();
    if (after.is_punct('/') || after.is_punct('|') || after.is_punct('*') ||
        after.is_punct('+') || after.is_punct('?')) {
      fail("unsupported feature: property path");
    }
    return verb;
  }

  // Triples separated by '.', up to (not including) `close`. In a WHERE
  // body, stops before BIND so the caller can interleave.
  std::vector<TriplePattern> parse_triples_until(char close, bool in_template,
                                                 bool stop_at_keyword = false) {
    std::vector<TriplePattern> out;
    while (!peek().is_punct(close)) {
      if (stop_at_keyword && peek().kind == Tok::Word && peek().text != "a" &&
          !peek().is_keyword("true") && !peek().is_keyword("false")) {
        break;
      }
      if (peek().kind == Tok::End) fail("unterminated triple block");
      PatternTerm subject = parse_node(in_template, true);
      while (true) {
        PatternTerm predicate = parse_verb();
        while (true) {
          PatternTerm object = parse_node(in_template, false);
          out.push_back(TriplePattern{subject, predicate, std::move(object)});
          if (!peek().is_punct(',')) break;
          next();
        }
        if (!peek().is_punct(';')) break;
        while (peek().is_punct(';')) next();
        if (peek().is_punct('.') || peek().is_punct(close)) break;
      }
      if (peek().is_punct('.')) {
        next();
      } else if (!peek().is_punct(close)) {
        if (stop_at_keyword && peek().kind == Tok::Word) break;
        reject_unsupported(peek());
        fail("expected '.' or '" + std::string(1, close) + "', found " +
             detail::describe(peek()));
      }
    }
    return out;
  }

  std::size_t parse_count() {
    Token t = next();
    std::size_t value = 0;
    if (t.kind != Tok::Integer || t.text[0] == '-' || t.text[0] == '+' ||
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), value).ec !=
            std::errc()) {
      lexer_.fail_at(t, "expected non-negative integer, found " + detail::describe(t));
    }
    return value;
  }

  void parse_modifiers(Query& q) {
    if (peek().is_keyword("GROUP")) fail("unsupported feature: GROUP BY");
    if (peek().is_keyword("ORDER")) {
      next();
      if (!peek().is_keyword("BY")) fail("expected BY after ORDER");
      next();
      while (true) {
        if (peek().kind == Tok::Var) {
          q.order_by.push_back(OrderKey{next().text, false});
        } else if (peek().is_keyword("ASC") || peek().is_keyword("DESC")) {
          bool desc = next().is_keyword("DESC");
          expect_punct('(');
          q.order_by.push_back(OrderKey{expect_variable(), desc});
          expect_punct(')');
        } else {
          break;
        }
      }
      if (q.order_by.empty()) fail("expected variable after ORDER BY");
    }
    for (int i = 0; i < 2; ++i) {
      if (peek().is_keyword("LIMIT") && !q.limit) {
        next();
        q.limit = parse_count();
      } else if (peek().is_keyword("OFFSET") && !q.offset) {
        next();
        q.offset = parse_count();
      }
    }
  }

  void validate(const Query& q) {
    std::vector<std::string> bound = pattern_variables(q.where);
    std::set<std::string> available(bound.begin(), bound.end());
    for (const BindClause& b : q.binds) {
      std::vector<std::string> used;
      b.expression.collect_variables(used);
      for (const std::string& v : used) {
        if (!available.contains(v)) {
          throw ParseError("BIND expression uses ?" + v +
                           " which is not bound by the WHERE patterns or an earlier BIND");
        }
      }
      if (available.contains(b.variable)) {
        throw ParseError("BIND target ?" + b.variable + " is already bound");
      }
      available.insert(b.variable);
    }
    if (q.form == QueryForm::Construct) {
      for (const std::string& v : pattern_variables(q.construct_template)) {
        if (!available.contains(v)) {
          throw ParseError("template variable ?" + v + " has no source in WHERE");
        }
      }
    }
  }

  Lexer lexer_;
  PrefixMap prefixes_;
};

void collect_iri(const PatternTerm& pt, std::vector<Iri>& out) {
  if (const auto* t = std::get_if<Term>(&pt)) {
    if (t->is_iri()) out.push_back(t->iri());
    if (t->is_literal() && !t->literal().is_plain_string() &&
        !t->literal().has_language()) {
      out.push_back(t->literal().datatype());
    }
  }
}

void collect_expression_iris(const Expression& e, std::vector<Iri>& out) {
  if (e.kind() == Expression::Kind::Constant && e.term().is_iri()) {
    out.push_back(e.term().iri());
  }
  for (const Expression& a : e.args()) collect_expression_iris(a, out);
}

}  // namespace

Query parse_query(std::string_view text, const PrefixMap& default_prefixes) {
  return SparqlParser(text, default_prefixes).parse();
}

MappingRule parse_rule(std::string_view text, std::string name) {
  Query q = parse_query(text);
  if (q.form != QueryForm::Construct) {
    throw ParseError("a mapping rule must be a CONSTRUCT query");
  }
  if (q.graph) throw ParseError("unsupported feature: GRAPH in mapping rule");
  if (!q.order_by.empty() || q.limit || q.offset) {
    throw ParseError("unsupported feature: solution modifiers in mapping rule");
  }
  MappingRule rule;
  rule.name = std::move(name);
  rule.prefixes = std::move(q.prefixes);
  rule.construct_template = std::move(q.construct_template);
  rule.where = std::move(q.where);
  rule.binds = std::move(q.binds);
  return rule;
}

std::vector<Iri> rule_iris(const MappingRule& rule) {
  std::vector<Iri> out;
  for (const auto* patterns : {&rule.construct_template, &rule.where}) {
    for (const TriplePattern& p : *patterns) {
      collect_iri(p.subject, out);
      collect_iri(p.predicate, out);
      collect_iri(p.object, out);
    }
  }
  for (const BindClause& b : rule.binds) collect_expression_iris(b.expression, out);
  return out;
}

}  // namespace kgforge
