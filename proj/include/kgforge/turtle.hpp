#pragma once

// A Turtle subset: @prefix / PREFIX directives, prefixed names, the `a`
// keyword, IRIs, plain/typed/language-tagged literals, numbers, booleans
// and the `;` and `,` abbreviations. Collections and blank node property
// lists are rejected.

#include <string_view>

#include "kgforge/graph.hpp"

namespace kgforge {

// Throws ParseError with position; unknown prefixes are reported by name.
Graph parse_turtle_subset(std::string_view text);

}  // namespace kgforge
