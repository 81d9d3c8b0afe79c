#pragma once

// Conversion of schema.org-flavoured JSON-LD records to RDF.
//
// Supported: inline @context with term and prefix maps (plus term objects
// with "@id" and "@type": "@id"), "@vocab", @id, @type, value objects with
// @value / @language / @type, nested node objects and arrays. A string
// @context naming schema.org is treated as the shipped schema context;
// other remote contexts are rejected. @graph, @list, @reverse and the
// remaining keywords are rejected by name.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "kgforge/date.hpp"
#include "kgforge/graph.hpp"

namespace kgforge {

class JsonLdContext {
 public:
  struct TermDefinition {
    std::string iri;
    bool coerce_to_id = false;
  };

  JsonLdContext() = default;

  // Parses a context object (the value of "@context"). Throws kgforge::Error.
  static JsonLdContext parse(const nlohmann::json& context);

  // The shipped default: @vocab http://schema.org/ and the schema/xsd
  // prefixes.
  static const JsonLdContext& schema_org();

  // Definitions of `overlay` take precedence.
  JsonLdContext merged(const JsonLdContext& overlay) const;

  const std::map<std::string, TermDefinition>& terms() const noexcept { return terms_; }
  const std::map<std::string, std::string>& prefixes() const noexcept { return prefixes_; }
  const std::optional<std::string>& vocab() const noexcept { return vocab_; }

  // Expands a property key or @type value. Throws kgforge::Error naming the
  // term if there is no mapping.
  std::string expand_vocab(std::string_view term) const;
  // Expands an @id value: compact IRI or absolute IRI. Relative references
  // are rejected.
  std::string expand_id(std::string_view id) const;

  const TermDefinition* find_term(std::string_view term) const;

 private:
  std::optional<std::string> expand_compact(std::string_view value) const;

  std::map<std::string, TermDefinition> terms_;
  std::map<std::string, std::string> prefixes_;
  std::optional<std::string> vocab_;
};

struct RawRecord {
  std::string source_id;
  Date submission_date;
  // Trailing segment of the minted resource IRI (e.g. "Raman").
  std::string suffix;
  nlohmann::json payload;
  std::string fetched_at;
};

// Parses a harvested record envelope:
//   {"source_id": "...", "submission_date": "YYYY-MM-DD",
//    "suffix": "...", "payload": {...}}
// Throws kgforge::Error if a field is missing or malformed.
RawRecord parse_record_envelope(std::string_view text);
nlohmann::json record_envelope(const RawRecord& record);

// Converts a JSON-LD payload (object or array of objects). Anonymous
// objects become blank nodes labelled by their JSON path from the root
// ("b", "b_creator_0", ...). Throws kgforge::Error on unsupported input.
Graph to_rdf(const nlohmann::json& payload, const JsonLdContext& context);
Graph to_rdf(const RawRecord& record, const JsonLdContext& context);

// Prefixes every blank node label with a digest of `record_scope`, so that
// graphs of different records never share a blank node.
Graph relabel_blank_nodes(const Graph& graph, std::string_view record_scope);

}  // namespace kgforge
