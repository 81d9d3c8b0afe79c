#pragma once

// RDF terms, triples and quads.
//
// Terms are immutable values. The comparison operators implement the
// canonical order used for every serialization: blank nodes sort before
// IRIs, IRIs before literals; within a kind the order is lexicographic on
// (label | value | lexical form, datatype, language).

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace kgforge {

namespace xsd {
inline constexpr std::string_view kNamespace =
    "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kString =
    "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kInteger =
    "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kDecimal =
    "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kDouble =
    "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kBoolean =
    "http://www.w3.org/2001/XMLSchema#boolean";
}  // namespace xsd

namespace rdf {
inline constexpr std::string_view kNamespace =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kLangString =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}  // namespace rdf

// An absolute IRI. Construction rejects relative references and characters
// that must be percent-encoded.
class Iri {
 public:
  explicit Iri(std::string value);

  static bool is_valid(std::string_view value) noexcept;

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const Iri&, const Iri&) = default;
  friend std::strong_ordering operator<=>(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

class BlankNode {
 public:
  explicit BlankNode(std::string label);

  // Labels are restricted to [A-Za-z0-9_]+.
  static bool is_valid_label(std::string_view label) noexcept;

  const std::string& label() const noexcept { return label_; }

  friend bool operator==(const BlankNode&, const BlankNode&) = default;
  friend std::strong_ordering operator<=>(const BlankNode&,
                                          const BlankNode&) = default;

 private:
  std::string label_;
};

class Literal {
 public:
  // Plain xsd:string literal.
  explicit Literal(std::string lexical);
  // Typed literal. Passing rdf:langString here is an error; use lang().
  Literal(std::string lexical, Iri datatype);

  static Literal lang(std::string lexical, std::string language);

  const std::string& lexical() const noexcept { return lexical_; }
  const Iri& datatype() const noexcept { return datatype_; }
  const std::string& language() const noexcept { return language_; }
  bool has_language() const noexcept { return !language_.empty(); }
  bool is_plain_string() const noexcept;

  static bool is_valid_language(std::string_view tag) noexcept;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend std::strong_ordering operator<=>(const Literal&,
                                          const Literal&) = default;

 private:
  Literal(std::string lexical, Iri datatype, std::string language);

  // Member order is the comparison order.
  std::string lexical_;
  Iri datatype_;
  std::string language_;
};

class Term {
 public:
  Term(Iri iri) : value_(std::move(iri)) {}              // NOLINT
  Term(BlankNode node) : value_(std::move(node)) {}      // NOLINT
  Term(Literal literal) : value_(std::move(literal)) {}  // NOLINT

  bool is_iri() const noexcept { return value_.index() == 1; }
  bool is_blank() const noexcept { return value_.index() == 0; }
  bool is_literal() const noexcept { return value_.index() == 2; }

  const Iri& iri() const { return std::get<Iri>(value_); }
  const BlankNode& blank() const { return std::get<BlankNode>(value_); }
  const Literal& literal() const { return std::get<Literal>(value_); }

  const Iri* if_iri() const noexcept { return std::get_if<Iri>(&value_); }
  const Literal* if_literal() const noexcept {
    return std::get_if<Literal>(&value_);
  }

  template <class Visitor>
  decltype(auto) visit(Visitor&& visitor) const {
    return std::visit(std::forward<Visitor>(visitor), value_);
  }

  friend bool operator==(const Term&, const Term&) = default;
  // Variant comparison orders by alternative index first, which is exactly
  // the kind order BlankNode < Iri < Literal.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    return a.value_ <=> b.value_;
  }

 private:
  std::variant<BlankNode, Iri, Literal> value_;
};

inline std::strong_ordering compare_terms(const Term& a, const Term& b) {
  return a <=> b;
}

class Triple {
 public:
  // Throws InvalidTerm if the subject is a literal.
  Triple(Term subject, Iri predicate, Term object);

  const Term& subject() const noexcept { return subject_; }
  const Iri& predicate() const noexcept { return predicate_; }
  const Term& object() const noexcept { return object_; }

  friend bool operator==(const Triple&, const Triple&) = default;
  friend std::strong_ordering operator<=>(const Triple&,
                                          const Triple&) = default;

 private:
  Term subject_;
  Iri predicate_;
  Term object_;
};

// Graph name of a quad; nullopt is the default graph.
using GraphName = std::optional<Iri>;

class Quad {
 public:
  Quad(Triple triple, GraphName graph = std::nullopt)
      : graph_(std::move(graph)), triple_(std::move(triple)) {}

  const Triple& triple() const noexcept { return triple_; }
  const GraphName& graph() const noexcept { return graph_; }

  friend bool operator==(const Quad&, const Quad&) = default;
  // (graph, subject, predicate, object); the default graph sorts first.
  friend std::strong_ordering operator<=>(const Quad&, const Quad&) = default;

 private:
  GraphName graph_;
  Triple triple_;
};

// N-Triples rendering of a single term.
std::string to_ntriples(const Term& term);
std::string to_ntriples(const Iri& iri);

// Text of a term as SPARQL STR() sees it (IRI value, literal lexical form,
// blank node label).
const std::string& term_text(const Term& term) noexcept;

std::size_t hash_value(const Term& term) noexcept;

}  // namespace kgforge

template <>
struct std::hash<kgforge::Term> {
  std::size_t operator()(const kgforge::Term& term) const noexcept {
    return kgforge::hash_value(term);
  }
};
