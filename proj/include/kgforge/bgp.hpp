#pragma once

// Basic graph pattern evaluation.
//
// A triple source is anything with
//
//   template <class Fn>
//   void for_each_match(const Term* s, const Iri* p, const Term* o, Fn&& fn) const;
//
// calling `fn(const Triple&)` once per matching triple (null = wildcard).
// Both Graph and the quad store's views satisfy it.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kgforge/sparql.hpp"
#include "kgforge/term.hpp"

namespace kgforge {

using BindingSet = std::map<std::string, Term>;

namespace detail {

struct CompiledPosition {
  std::optional<Term> constant;  // set when the position is a constant
  std::size_t slot = 0;          // variable slot otherwise
};

struct CompiledPattern {
  CompiledPosition s, p, o;
};

inline std::size_t slot_for(std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  names.push_back(name);
  return names.size() - 1;
}

inline CompiledPosition compile_position(std::vector<std::string>& names,
                                         const PatternTerm& pt) {
  if (const auto* t = std::get_if<Term>(&pt)) return CompiledPosition{*t, 0};
  return CompiledPosition{std::nullopt, slot_for(names, std::get<Variable>(pt).name)};
}

}  // namespace detail

// All solutions of the conjunction of `patterns`, extending `initial`.
// The result is duplicate-free and sorted. Patterns are joined left-deep in
// a greedy order (most bound positions first); the order never affects the
// result.
template <class Source>
std::vector<BindingSet> eval_bgp(const Source& source,
                                 std::span<const TriplePattern> patterns,
                                 const BindingSet& initial = {}) {
  using detail::CompiledPattern;
  using detail::CompiledPosition;

  std::vector<std::string> names;
  std::vector<std::optional<Term>> row;
  for (const auto& [name, value] : initial) {
    names.push_back(name);
    row.push_back(value);
  }
  std::vector<CompiledPattern> compiled;
  compiled.reserve(patterns.size());
  for (const TriplePattern& p : patterns) {
    compiled.push_back(CompiledPattern{detail::compile_position(names, p.subject),
                                       detail::compile_position(names, p.predicate),
                                       detail::compile_position(names, p.object)});
  }
  row.resize(names.size());

  // Greedy join order.
  std::vector<bool> bound(names.size(), false);
  for (std::size_t i = 0; i < initial.size(); ++i) bound[i] = true;
  std::vector<const CompiledPattern*> order;
  std::vector<bool> used(compiled.size(), false);
  auto is_bound = [&](const CompiledPosition& pos) {
    return pos.constant.has_value() || bound[pos.slot];
  };
  for (std::size_t step = 0; step < compiled.size(); ++step) {
    std::size_t best = compiled.size();
    int best_score = -1;
    for (std::size_t i = 0; i < compiled.size(); ++i) {
      if (used[i]) continue;
      const CompiledPattern& cp = compiled[i];
      int score = is_bound(cp.s) + is_bound(cp.p) + is_bound(cp.o);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    used[best] = true;
    const CompiledPattern& cp = compiled[best];
    for (const CompiledPosition* pos : {&cp.s, &cp.p, &cp.o}) {
      if (!pos->constant) bound[pos->slot] = true;
    }
    order.push_back(&cp);
  }

  std::set<BindingSet> results;
  std::vector<std::size_t> trail;

  auto value_of = [&](const CompiledPosition& pos) -> const Term* {
    if (pos.constant) return &*pos.constant;
    return row[pos.slot] ? &*row[pos.slot] : nullptr;
  };

  auto bind = [&](const CompiledPosition& pos, const Term& value) {
    if (pos.constant) return true;
    auto& cell = row[pos.slot];
    if (cell) return *cell == value;
    cell = value;
    trail.push_back(pos.slot);
    return true;
  };

  auto step = [&](auto& self, std::size_t depth) -> void {
    if (depth == order.size()) {
      BindingSet solution;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (row[i]) solution.emplace(names[i], *row[i]);
      }
      results.insert(std::move(solution));
      return;
    }
    const CompiledPattern& cp = *order[depth];
    const Term* s = value_of(cp.s);
    const Term* p_term = value_of(cp.p);
    const Term* o = value_of(cp.o);
    if (s != nullptr && s->is_literal()) return;
    const Iri* p = nullptr;
    if (p_term != nullptr) {
      p = p_term->if_iri();
      if (p == nullptr) return;
    }
    source.for_each_match(s, p, o, [&](const Triple& t) {
      std::size_t mark = trail.size();
      if (bind(cp.s, t.subject()) && bind(cp.p, Term(t.predicate())) &&
          bind(cp.o, t.object())) {
        self(self, depth + 1);
      }
      while (trail.size() > mark) {
        row[trail.back()].reset();
        trail.pop_back();
      }
    });
  };
  step(step, 0);

  return {results.begin(), results.end()};
}

}  // namespace kgforge
