#pragma once

// Shape-lite validation: cardinality/kind/class constraints per target
// class, and pattern implications (every antecedent match must extend to a
// consequent match).
//
// Shape files are line oriented; '#' starts a comment at line start or after
// whitespace:
//
//   prefix obo: <http://purl.obolibrary.org/obo/>
//
//   shape PersonShape
//     target nfdicore:NFDI_0000004
//     property obo:BFO_0000053 min 1 kind iri class obo:BFO_0000023
//     property obo:IAO_0000235 min 1 max 3 kind any severity warning
//   end
//
//   pattern ProcessAgentRole
//     focus ?role
//     when ?process obo:BFO_0000055 ?role .
//     then ?agent obo:BFO_0000053 ?role .
//     then ?process obo:BFO_0000057 ?agent .
//   end
//
// Variables that occur only in `then` lines are existential.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/graph.hpp"
#include "kgforge/sparql.hpp"

namespace kgforge {

enum class Severity { Violation, Warning };
enum class ValueKind { Iri, Literal, Any };

struct PropertyConstraint {
  Iri path;
  std::size_t min_count = 0;
  std::optional<std::size_t> max_count;
  ValueKind kind = ValueKind::Any;
  std::optional<Iri> value_class;
  Severity severity = Severity::Violation;
};

struct Shape {
  std::string name;
  Iri target_class;
  std::vector<PropertyConstraint> properties;
};

struct PatternRule {
  std::string name;
  std::vector<TriplePattern> antecedent;
  std::vector<TriplePattern> consequent;
  // Variable reported as the focus node; defaults to the first antecedent
  // variable.
  std::string focus;
  Severity severity = Severity::Violation;
};

struct ShapeSet {
  std::vector<Shape> shapes;
  std::vector<PatternRule> patterns;
};

struct Finding {
  std::string rule;
  std::string focus;  // N-Triples form of the focus node
  std::string message;
  Severity severity = Severity::Violation;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> findings;  // sorted by (rule, focus, message)

  bool conforms() const noexcept { return findings.empty(); }
  std::size_t violations() const noexcept;
  std::size_t warnings() const noexcept;
};

std::string_view severity_name(Severity s);

// Throws ParseError with the line number; `name` is used in messages.
ShapeSet parse_shapes(std::string_view text, std::string_view name = "shapes");
// Every *.shapes file of `dir`, in file-name order.
ShapeSet load_shapes_dir(const std::filesystem::path& dir);

// Constant IRIs of the shape set (for vocabulary checks).
std::vector<Iri> shape_iris(const ShapeSet& set);

ValidationReport validate_shapes(const Graph& g, const std::vector<Shape>& shapes);
ValidationReport validate_patterns(const Graph& g, const std::vector<PatternRule>& rules);
ValidationReport validate(const Graph& g, const ShapeSet& set);

nlohmann::json report_to_json(const ValidationReport& report);
std::string report_table(const ValidationReport& report);

}  // namespace kgforge
