#include "kgforge/term.hpp"

#include <cstdio>

#include "kgforge/error.hpp"
#include "kgforge/graph.hpp"

namespace kgforge {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_forbidden_iri_char(unsigned char c) {
  if (c <= 0x20 || c == 0x7F) return true;
  switch (c) {
    case '<': case '>': case '"': case '{': case '}':
    case '|': case '^': case '`': case '\\':
      return true;
    default:
      return false;
  }
}

}  // namespace

bool Iri::is_valid(std::string_view value) noexcept {
  std::size_t colon = value.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!is_alpha(value[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = value[i];
    if (!is_alpha(c) && !is_digit(c) && c != '+' && c != '-' && c != '.') {
      return false;
    }
  }
  for (unsigned char c : value) {
    if (is_forbidden_iri_char(c)) return false;
  }
  return true;
}

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) {
    throw InvalidTerm("not an absolute IRI: '" + value_ + "'");
  }
}

bool BlankNode::is_valid_label(std::string_view label) noexcept {
  if (label.empty()) return false;
  for (char c : label) {
    if (!is_alpha(c) && !is_digit(c) && c != '_') return false;
  }
  return true;
}

BlankNode::BlankNode(std::string label) : label_(std::move(label)) {
  if (!is_valid_label(label_)) {
    throw InvalidTerm("invalid blank node label: '" + label_ + "'");
  }
}

bool Literal::is_valid_language(std::string_view tag) noexcept {
  if (tag.empty()) return false;
  std::size_t i = 0;
  std::size_t run = 0;
  bool first = true;
  for (; i <= tag.size(); ++i) {
    if (i == tag.size() || tag[i] == '-') {
      if (run == 0) return false;
      run = 0;
      first = false;
      continue;
    }
    char c = tag[i];
    if (!(is_alpha(c) || (!first && is_digit(c)))) return false;
    ++run;
  }
  return true;
}

Literal::Literal(std::string lexical)
    : lexical_(std::move(lexical)), datatype_(std::string(xsd::kString)) {}

Literal::Literal(std::string lexical, Iri datatype)
    : lexical_(std::move(lexical)), datatype_(std::move(datatype)) {
  if (datatype_.str() == rdf::kLangString) {
    throw InvalidTerm("rdf:langString literal requires a language tag");
  }
}

Literal::Literal(std::string lexical, Iri datatype, std::string language)
    : lexical_(std::move(lexical)),
      datatype_(std::move(datatype)),
      language_(std::move(language)) {}

Literal Literal::lang(std::string lexical, std::string language) {
  if (!is_valid_language(language)) {
    throw InvalidTerm("invalid language tag: '" + language + "'");
  }
  return Literal(std::move(lexical), Iri(std::string(rdf::kLangString)),
                 std::move(language));
}

bool Literal::is_plain_string() const noexcept {
  return datatype_.str() == xsd::kString;
}

Triple::Triple(Term subject, Iri predicate, Term object)
    : subject_(std::move(subject)),
      predicate_(std::move(predicate)),
      object_(std::move(object)) {
  if (subject_.is_literal()) {
    throw InvalidTerm("literal in subject position: " + to_ntriples(subject_));
  }
}

namespace {

void append_escaped_literal(std::string& out, std::string_view text) {
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
}

}  // namespace

std::string to_ntriples(const Iri& iri) { return "<" + iri.str() + ">"; }

std::string to_ntriples(const Term& term) {
  if (term.is_iri()) return to_ntriples(term.iri());
  if (term.is_blank()) return "_:" + term.blank().label();
  const Literal& lit = term.literal();
  std::string out = "\"";
  append_escaped_literal(out, lit.lexical());
  out += '"';
  if (lit.has_language()) {
    out += '@';
    out += lit.language();
  } else if (!lit.is_plain_string()) {
    out += "^^";
    out += to_ntriples(lit.datatype());
  }
  return out;
}

const std::string& term_text(const Term& term) noexcept {
  if (term.is_iri()) return term.iri().str();
  if (term.is_blank()) return term.blank().label();
  return term.literal().lexical();
}

std::size_t hash_value(const Term& term) noexcept {
  std::hash<std::string> h;
  std::size_t seed = term.visit([&](const auto& v) -> std::size_t {
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, Literal>) {
      return h(v.lexical()) ^ (h(v.datatype().str()) * 31) ^
             (h(v.language()) * 131);
    } else if constexpr (std::is_same_v<T, Iri>) {
      return h(v.str());
    } else {
      return h(v.label()) * 7;
    }
  });
  return seed;
}

namespace {

struct SubjectKey {
  const Term* subject;
};

bool operator<(const Triple& t, SubjectKey k) { return t.subject() < *k.subject; }

}  // namespace

Graph::const_iterator Graph::lower_bound_subject(const Term& subject) const {
  return triples_.lower_bound(SubjectKey{&subject});
}

}  // namespace kgforge
