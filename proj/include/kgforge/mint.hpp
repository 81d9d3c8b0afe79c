#pragma once

// IRI policies: literal-derived node IRIs, date-encoded resource IRIs and
// date-keyed named-graph IRIs.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "kgforge/date.hpp"
#include "kgforge/term.hpp"

namespace kgforge {

struct Uuid {
  std::array<std::uint8_t, 16> bytes{};

  // Canonical 8-4-4-4-12 lowercase form.
  std::string str() const;
  // Throws kgforge::Error on malformed input.
  static Uuid parse(std::string_view text);

  friend bool operator==(const Uuid&, const Uuid&) = default;
};

// RFC 4122 name-based UUID, version 5 (SHA-1).
Uuid uuid_v5(const Uuid& name_space, std::string_view name);

// 6ba7b811-9dad-11d1-80b4-00c04fd430c8
const Uuid& url_namespace();

enum class MintStrategy { LiteralEncoded, Uuid };
enum class GraphGranularity { Month, Day };

struct MintConfig {
  std::string base = "https://ditrare.ise.fiz-karlsruhe.de/chemotion-kg/";
  MintStrategy strategy = MintStrategy::LiteralEncoded;
  Uuid uuid_namespace = url_namespace();
  GraphGranularity granularity = GraphGranularity::Month;

  // Throws kgforge::Error unless base is absolute and ends with '/'.
  void check() const;
  std::string node_base() const { return base + "nodes/"; }
};

std::string_view strategy_name(MintStrategy s);
MintStrategy parse_strategy(std::string_view name);
std::string_view granularity_name(GraphGranularity g);
GraphGranularity parse_granularity(std::string_view name);

// {base}nodes/{encode_for_uri(lexical)} or {base}nodes/{uuid5}.
Iri mint_node_iri(const MintConfig& cfg, std::string_view lexical);

// {base}resources/{year}/{MM}/{source_id}/{suffix}. The source id is kept
// verbatim (DOIs contain slashes), the suffix is percent-encoded and
// omitted when empty.
Iri mint_resource_iri(const MintConfig& cfg, int year, int month,
                      std::string_view source_id, std::string_view suffix);

// {base}graphs/{year}/{MM}, or .../{DD} with day granularity.
Iri mint_graph_iri(const MintConfig& cfg, const Date& date);

// Key of the graph's store file: "YYYY-MM" or "YYYY-MM-DD".
std::string graph_key(const MintConfig& cfg, const Date& date);

// Reverses percent-encoding; nullopt on a malformed escape.
std::optional<std::string> percent_decode(std::string_view s);

// With the uuid strategy, replaces each IRI under {base}nodes/ whose last
// segment is literal-encoded by the uuid form of the decoded lexical.
Term remint_node(const MintConfig& cfg, const Term& term);

}  // namespace kgforge
