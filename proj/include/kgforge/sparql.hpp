#pragma once

// The SPARQL subset understood by mapping rules and the query endpoint:
// PREFIX declarations; CONSTRUCT, SELECT and ASK forms over a basic graph
// pattern; BIND with IRI, CONCAT, ENCODE_FOR_URI and STR; the `a` keyword
// and the `;` / `,` abbreviations. Queries additionally accept a single
// GRAPH <iri> { ... } scope, ORDER BY, LIMIT, OFFSET, DISTINCT and
// (COUNT(*) AS ?var). Everything else (FILTER, OPTIONAL, UNION, property
// paths, ...) is rejected at parse time with "unsupported feature: X".

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgforge/term.hpp"

namespace kgforge {

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

// Blank nodes in a WHERE clause become variables with this name prefix;
// it cannot collide with a user-written variable.
inline constexpr std::string_view kBlankVariablePrefix = "_:";

using PatternTerm = std::variant<Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;  // Iri or Variable
  PatternTerm object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class Function { Iri, Concat, EncodeForUri, Str };

std::string_view function_name(Function fn);

class Expression {
 public:
  enum class Kind { Constant, VariableRef, Call };

  static Expression constant(Term term);
  static Expression variable(std::string name);
  // Throws kgforge::Error if the arity is wrong for `fn`.
  static Expression call(Function fn, std::vector<Expression> args);

  Kind kind() const noexcept { return kind_; }
  const Term& term() const { return *constant_; }
  const std::string& variable_name() const noexcept { return variable_; }
  Function function() const noexcept { return function_; }
  const std::vector<Expression>& args() const noexcept { return args_; }

  // Names of every variable the expression reads.
  void collect_variables(std::vector<std::string>& out) const;

 private:
  Kind kind_ = Kind::Constant;
  std::optional<Term> constant_;
  std::string variable_;
  Function function_ = Function::Str;
  std::vector<Expression> args_;
};

struct BindClause {
  std::string variable;
  Expression expression;
};

using PrefixMap = std::map<std::string, std::string>;

struct MappingRule {
  std::string name;
  PrefixMap prefixes;
  std::vector<TriplePattern> construct_template;
  std::vector<TriplePattern> where;
  std::vector<BindClause> binds;
};

enum class QueryForm { Select, Construct, Ask };

struct OrderKey {
  std::string variable;
  bool descending = false;
};

struct CountAggregate {
  std::string alias;
  bool distinct = false;
  std::optional<std::string> counted;  // nullopt = COUNT(*)
};

struct Query {
  QueryForm form = QueryForm::Select;
  PrefixMap prefixes;
  bool select_all = false;
  bool distinct = false;
  std::vector<std::string> projection;
  std::optional<CountAggregate> count;
  std::vector<TriplePattern> construct_template;
  std::vector<TriplePattern> where;
  std::vector<BindClause> binds;
  std::optional<Iri> graph;
  std::vector<OrderKey> order_by;
  std::optional<std::size_t> limit;
  std::optional<std::size_t> offset;
};

// Parses any supported query form. `default_prefixes` are available without
// a PREFIX declaration (declarations override them).
Query parse_query(std::string_view text, const PrefixMap& default_prefixes = {});

// Parses a mapping rule: exactly one CONSTRUCT without GRAPH or solution
// modifiers. Every template variable must be bound by the WHERE patterns or
// a BIND; BIND targets must be fresh.
MappingRule parse_rule(std::string_view text, std::string name = {});

// Variables mentioned by the patterns, in first-occurrence order.
std::vector<std::string> pattern_variables(const std::vector<TriplePattern>& patterns);

// Constant IRIs mentioned anywhere in a rule (for vocabulary checks).
std::vector<Iri> rule_iris(const MappingRule& rule);

}  // namespace kgforge
