#include "kgforge/engine.hpp"

#include "kgforge/digest.hpp"
#include "kgforge/ntriples.hpp"

namespace kgforge {

std::string encode_for_uri(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '.' ||
                      c == '_' || c == '~';
    if (unreserved) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::optional<Term> eval_expression(const Expression& e, const BindingSet& bindings) {
  switch (e.kind()) {
    case Expression::Kind::Constant:
      return e.term();
    case Expression::Kind::VariableRef: {
      auto it = bindings.find(e.variable_name());
      if (it == bindings.end()) return std::nullopt;
      return it->second;
    }
    case Expression::Kind::Call:
      break;
  }

  std::vector<Term> args;
  args.reserve(e.args().size());
  for (const Expression& a : e.args()) {
    auto v = eval_expression(a, bindings);
    if (!v) return std::nullopt;
    args.push_back(std::move(*v));
  }

  switch (e.function()) {
    case Function::Str:
      if (args[0].is_blank()) return std::nullopt;
      return Term(Literal(term_text(args[0])));
    case Function::Concat: {
      std::string out;
      for (const Term& t : args) {
        if (!t.is_literal()) return std::nullopt;
        out += t.literal().lexical();
      }
      return Term(Literal(std::move(out)));
    }
    case Function::EncodeForUri:
      if (!args[0].is_literal()) return std::nullopt;
      return Term(Literal(encode_for_uri(args[0].literal().lexical())));
    case Function::Iri: {
      if (args[0].is_iri()) return args[0];
      if (!args[0].is_literal() || !args[0].literal().is_plain_string()) {
        return std::nullopt;
      }
      const std::string& text = args[0].literal().lexical();
      if (!Iri::is_valid(text)) return std::nullopt;
      return Term(Iri(text));
    }
  }
  return std::nullopt;
}

void apply_binds(std::vector<BindingSet>& solutions, std::span<const BindClause> binds) {
  for (BindingSet& solution : solutions) {
    for (const BindClause& b : binds) {
      if (auto v = eval_expression(b.expression, solution)) {
        solution.emplace(b.variable, std::move(*v));
      }
    }
  }
}

namespace {

std::string solution_key(const BindingSet& solution) {
  std::string key;
  for (const auto& [name, value] : solution) {
    key += name;
    key += '=';
    key += to_ntriples(value);
    key += '\n';
  }
  return key;
}

}  // namespace

Graph instantiate(std::span<const TriplePattern> construct_template,
                  std::span<const BindingSet> solutions) {
  Graph out;
  for (const BindingSet& solution : solutions) {
    std::string suffix;
    auto resolve = [&](const PatternTerm& pt) -> std::optional<Term> {
      if (const auto* v = std::get_if<Variable>(&pt)) {
        auto it = solution.find(v->name);
        if (it == solution.end()) return std::nullopt;
        return it->second;
      }
      const Term& t = std::get<Term>(pt);
      if (t.is_blank()) {
        if (suffix.empty()) suffix = to_hex(fnv1a64(solution_key(solution)));
        return Term(BlankNode(t.blank().label() + "_" + suffix));
      }
      return t;
    };
    for (const TriplePattern& p : construct_template) {
      auto s = resolve(p.subject);
      auto pr = resolve(p.predicate);
      auto o = resolve(p.object);
      if (!s || !pr || !o || s->is_literal() || !pr->is_iri()) continue;
      out.insert(Triple(std::move(*s), pr->iri(), std::move(*o)));
    }
  }
  return out;
}

}  // namespace kgforge
