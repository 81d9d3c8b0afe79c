#include "kgforge/ntriples.hpp"

#include <algorithm>
#include <optional>

#include "detail/utf8.hpp"
#include "kgforge/error.hpp"

namespace kgforge {

namespace {

// Cursor over a single line of N-Triples / N-Quads.
class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no)
      : line_(line), line_no_(line_no) {}

  // Returns nullopt for blank and comment-only lines.
  std::optional<Quad> parse(bool allow_graph) {
    skip_ws();
    if (at_end() || peek() == '#') return std::nullopt;

    Term subject = parse_subject();
    skip_ws();
    Iri predicate = parse_iri();
    skip_ws();
    Term object = parse_object();
    skip_ws();

    GraphName graph;
    if (!at_end() && peek() != '.') {
      if (!allow_graph) fail("expected '.'");
      if (peek() == '_') fail("blank node graph names are not supported");
      graph = parse_iri();
      skip_ws();
    }
    if (at_end() || peek() != '.') fail("expected '.'");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected content after '.'");
    return Quad(Triple(std::move(subject), std::move(predicate),
                       std::move(object)),
                std::move(graph));
  }

 private:
  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return line_[pos_]; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_no_, pos_ + 1);
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  Term parse_subject() {
    if (at_end()) fail("expected subject");
    if (peek() == '<') return parse_iri();
    if (peek() == '_') return parse_blank();
    fail("expected IRI or blank node as subject");
  }

  Term parse_object() {
    if (at_end()) fail("expected object");
    switch (peek()) {
      case '<': return parse_iri();
      case '_': return parse_blank();
      case '"': return parse_literal();
      default: fail("expected IRI, blank node or literal as object");
    }
  }

  char32_t parse_hex(int digits) {
    if (pos_ + digits > line_.size()) fail("truncated unicode escape");
    char32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      int v = detail::hex_value(line_[pos_ + i]);
      if (v < 0) fail("invalid hex digit in unicode escape");
      cp = cp * 16 + static_cast<char32_t>(v);
    }
    pos_ += digits;
    return cp;
  }

  void append_unicode_escape(std::string& out) {
    // Positioned on 'u' or 'U'.
    char kind = peek();
    ++pos_;
    char32_t cp = parse_hex(kind == 'u' ? 4 : 8);
    if (!detail::append_utf8(out, cp)) fail("invalid code point in escape");
  }

  Iri parse_iri() {
    if (at_end() || peek() != '<') fail("expected '<'");
    ++pos_;
    std::size_t start = pos_;
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = peek();
      if (c == '>') break;
      if (c == '\\') {
        ++pos_;
        if (at_end() || (peek() != 'u' && peek() != 'U')) {
          fail("invalid escape in IRI");
        }
        append_unicode_escape(value);
        continue;
      }
      value += c;
      ++pos_;
    }
    ++pos_;
    if (!Iri::is_valid(value)) {
      pos_ = start;
      if (value.find(':') == std::string::npos) {
        fail("relative IRI <" + value + ">");
      }
      fail("invalid IRI <" + value + ">");
    }
    return Iri(std::move(value));
  }

  BlankNode parse_blank() {
    if (line_.substr(pos_, 2) != "_:") fail("expected '_:'");
    pos_ += 2;
    std::size_t start = pos_;
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '.' || c == '<' || c == '"') break;
      ++pos_;
    }
    std::string label(line_.substr(start, pos_ - start));
    if (!BlankNode::is_valid_label(label)) {
      pos_ = start;
      fail("invalid blank node label '" + label + "'");
    }
    return BlankNode(std::move(label));
  }

  Literal parse_literal() {
    ++pos_;  // opening quote
    std::string lexical;
    while (true) {
      if (at_end()) fail("unterminated literal");
      char c = peek();
      if (c == '"') break;
      if (c == '\\') {
        ++pos_;
        if (at_end()) fail("unterminated literal");
        switch (peek()) {
          case 't': lexical += '\t'; ++pos_; break;
          case 'b': lexical += '\b'; ++pos_; break;
          case 'n': lexical += '\n'; ++pos_; break;
          case 'r': lexical += '\r'; ++pos_; break;
          case 'f': lexical += '\f'; ++pos_; break;
          case '"': lexical += '"'; ++pos_; break;
          case '\'': lexical += '\''; ++pos_; break;
          case '\\': lexical += '\\'; ++pos_; break;
          case 'u':
          case 'U': append_unicode_escape(lexical); break;
          default: fail("invalid escape in literal");
        }
        continue;
      }
      lexical += c;
      ++pos_;
    }
    ++pos_;  // closing quote

    if (!at_end() && peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!at_end() && peek() != ' ' && peek() != '\t' && peek() != '.') {
        ++pos_;
      }
      std::string tag(line_.substr(start, pos_ - start));
      if (!Literal::is_valid_language(tag)) {
        pos_ = start;
        fail("invalid language tag '" + tag + "'");
      }
      return Literal::lang(std::move(lexical), std::move(tag));
    }
    if (line_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      Iri datatype = parse_iri();
      if (datatype.str() == rdf::kLangString) {
        fail("rdf:langString literal without language tag");
      }
      return Literal(std::move(lexical), std::move(datatype));
    }
    return Literal(std::move(lexical));
  }

  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace

Graph parse_ntriples(std::string_view text) {
  Graph graph;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (auto quad = LineParser(line, line_no).parse(false)) {
      graph.insert(quad->triple());
    }
  });
  return graph;
}

std::string serialize_ntriples(const Graph& graph) {
  std::string out;
  for (const Triple& t : graph) {
    out += to_ntriples(t.subject());
    out += ' ';
    out += to_ntriples(t.predicate());
    out += ' ';
    out += to_ntriples(t.object());
    out += " .\n";
  }
  return out;
}

std::vector<Quad> parse_nquads(std::string_view text) {
  std::vector<Quad> quads;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (auto quad = LineParser(line, line_no).parse(true)) {
      quads.push_back(std::move(*quad));
    }
  });
  return quads;
}

std::string to_nquads_line(const Quad& quad) {
  const Triple& t = quad.triple();
  std::string out = to_ntriples(t.subject());
  out += ' ';
  out += to_ntriples(t.predicate());
  out += ' ';
  out += to_ntriples(t.object());
  if (quad.graph()) {
    out += ' ';
    out += to_ntriples(*quad.graph());
  }
  out += " .\n";
  return out;
}

std::string serialize_nquads(std::span<const Quad> quads) {
  std::vector<const Quad*> sorted;
  sorted.reserve(quads.size());
  for (const Quad& q : quads) sorted.push_back(&q);
  std::sort(sorted.begin(), sorted.end(),
            [](const Quad* a, const Quad* b) { return *a < *b; });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const Quad* a, const Quad* b) { return *a == *b; }),
               sorted.end());
  std::string out;
  for (const Quad* q : sorted) out += to_nquads_line(*q);
  return out;
}

}  // namespace kgforge
