#pragma once

// N-Triples and N-Quads (W3C line-based grammars).

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/graph.hpp"
#include "kgforge/term.hpp"

namespace kgforge {

// Throws ParseError (with line and column) on malformed input.
Graph parse_ntriples(std::string_view text);

// One line per triple in canonical order.
std::string serialize_ntriples(const Graph& graph);

// Quads in document order; duplicates are kept.
std::vector<Quad> parse_nquads(std::string_view text);

// Sorted by (graph, subject, predicate, object), duplicates dropped.
std::string serialize_nquads(std::span<const Quad> quads);

std::string to_nquads_line(const Quad& quad);

}  // namespace kgforge
