#pragma once

// Evaluation of mapping rules (CONSTRUCT-style).

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/bgp.hpp"
#include "kgforge/graph.hpp"
#include "kgforge/sparql.hpp"

namespace kgforge {

// Percent-encodes every UTF-8 octet of `s` except the RFC 3986 unreserved
// characters ALPHA / DIGIT / '-' / '.' / '_' / '~' (uppercase hex).
std::string encode_for_uri(std::string_view s);

// Evaluates `e` under `bindings`. Unbound variables and type errors yield
// nullopt, mirroring SPARQL's BIND error semantics.
std::optional<Term> eval_expression(const Expression& e, const BindingSet& bindings);

// Extends each solution with the BIND clauses in order. A failed expression
// leaves its variable unbound.
void apply_binds(std::vector<BindingSet>& solutions, std::span<const BindClause> binds);

// Instantiates the template once per solution. Triples with an unbound
// variable or an ill-typed position are skipped. Blank nodes in the template
// get a fresh label per solution, derived from the solution's content.
Graph instantiate(std::span<const TriplePattern> construct_template,
                  std::span<const BindingSet> solutions);

template <class Source>
std::vector<BindingSet> solve(const Source& source, std::span<const TriplePattern> where,
                              std::span<const BindClause> binds) {
  std::vector<BindingSet> solutions = eval_bgp(source, where);
  apply_binds(solutions, binds);
  return solutions;
}

template <class Source>
Graph apply_rule(const Source& source, const MappingRule& rule) {
  auto solutions = solve(source, rule.where, rule.binds);
  return instantiate(rule.construct_template, solutions);
}

// Output of a rule pack: the union plus each rule's own output.
struct RulePackOutput {
  Graph merged;
  std::vector<Graph> per_rule;
};

// Every rule reads only `source`, never another rule's output.
template <class Source>
RulePackOutput apply_rule_pack_detailed(const Source& source,
                                        std::span<const MappingRule> rules) {
  RulePackOutput out;
  out.per_rule.reserve(rules.size());
  for (const MappingRule& rule : rules) {
    out.per_rule.push_back(apply_rule(source, rule));
    out.merged.merge(out.per_rule.back());
  }
  return out;
}

template <class Source>
Graph apply_rule_pack(const Source& source, std::span<const MappingRule> rules) {
  return apply_rule_pack_detailed(source, rules).merged;
}

}  // namespace kgforge
