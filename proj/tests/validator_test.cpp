#include <gtest/gtest.h>

#include "kgforge/error.hpp"
#include "kgforge/validator.hpp"
#include "support.hpp"

namespace kgforge {
namespace {

using test::fixture;

const ShapeSet& shipped() {
  static const ShapeSet set = load_shapes_dir(test::source_dir() / "shapes");
  return set;
}

std::set<std::string> rules_hit(const ValidationReport& r, Severity severity) {
  std::set<std::string> out;
  for (const Finding& f : r.findings) {
    if (f.severity == severity) out.insert(f.rule);
  }
  return out;
}

TEST(Shapes, ShippedSetLoads) {
  EXPECT_EQ(shipped().shapes.size(), 6u);
  ASSERT_EQ(shipped().patterns.size(), 3u);
  std::set<std::string> names;
  for (const PatternRule& p : shipped().patterns) names.insert(p.name);
  EXPECT_EQ(names, (std::set<std::string>{"MeasurementUnit", "ProcessAgentRole",
                                          "PublishingTemporalRegion"}));
}

TEST(Shapes, ParseErrorsCarryLine) {
  try {
    parse_shapes("shape S\n  target <https://e.org/C>\n  property <https://e.org/p> min x\nend\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_shapes("shape S\n  property <https://e.org/p> min 1\nend\n"), ParseError);
  EXPECT_THROW(parse_shapes("shape S\n  target nope:C\nend\n"), ParseError);
  EXPECT_THROW(parse_shapes("pattern P\n  when ?a <https://e.org/p> ?b .\nend\n"), ParseError);
  EXPECT_THROW(parse_shapes("shape S\n  target <https://e.org/C>\n"), ParseError);
}

TEST(Shapes, Cardinality) {
  ShapeSet set = parse_shapes(R"(
prefix e: <https://e.org/>
shape Thing
  target e:Thing
  property e:name min 1 max 2 kind literal
  property e:link kind iri class e:Target severity warning
end
)");
  Graph g = parse_ntriples(R"(
<https://e.org/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://e.org/Thing> .
<https://e.org/a> <https://e.org/name> "one" .
<https://e.org/b> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://e.org/Thing> .
<https://e.org/c> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://e.org/Thing> .
<https://e.org/c> <https://e.org/name> "1" .
<https://e.org/c> <https://e.org/name> "2" .
<https://e.org/c> <https://e.org/name> "3" .
<https://e.org/d> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://e.org/Thing> .
<https://e.org/d> <https://e.org/name> <https://e.org/notALiteral> .
<https://e.org/d> <https://e.org/link> <https://e.org/untyped> .
<https://e.org/d> <https://e.org/link> "literal" .
)");
  ValidationReport r = validate_shapes(g, set.shapes);
  std::set<std::string> foci;
  for (const Finding& f : r.findings) {
    if (f.severity == Severity::Violation) foci.insert(f.focus);
  }
  EXPECT_EQ(foci, (std::set<std::string>{"<https://e.org/b>", "<https://e.org/c>",
                                         "<https://e.org/d>"}));
  // untyped link target; the literal link fails both kind and class
  EXPECT_EQ(r.warnings(), 3u);
  EXPECT_FALSE(r.conforms());
  EXPECT_TRUE(std::is_sorted(r.findings.begin(), r.findings.end(),
                             [](const Finding& a, const Finding& b) {
                               return std::tie(a.rule, a.focus, a.message) <
                                      std::tie(b.rule, b.focus, b.message);
                             }));
}

TEST(Patterns, ExistentialConsequent) {
  ShapeSet set = parse_shapes(R"(
prefix e: <https://e.org/>
pattern Owned
  focus ?x
  when ?x a e:Item .
  then ?x e:owner ?o .
  then ?o a e:Person .
end
)");
  Graph g = parse_ntriples(R"(
<https://e.org/i1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://e.org/Item> .
<https://e.org/i1> <https://e.org/owner> <https://e.org/p> .
<https://e.org/p> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://e.org/Person> .
<https://e.org/i2> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://e.org/Item> .
<https://e.org/i2> <https://e.org/owner> <https://e.org/q> .
)");
  ValidationReport r = validate_patterns(g, set.patterns);
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].rule, "Owned");
  EXPECT_EQ(r.findings[0].focus, "<https://e.org/i2>");
}

TEST(Shipped, GoldenRecordConforms) {
  ValidationReport r = validate(test::read_ntriples_file(fixture("faults/record0.nt")), shipped());
  EXPECT_EQ(r.violations(), 0u) << report_table(r);
  EXPECT_EQ(r.warnings(), 0u) << report_table(r);
}

TEST(Shipped, SeededFaultsFlagged) {
  struct Case {
    const char* file;
    const char* rule;
  };
  for (const Case& c : {Case{"faults/par.nt", "ProcessAgentRole"},
                        Case{"faults/unit.nt", "MeasurementUnit"},
                        Case{"faults/temporal.nt", "PublishingTemporalRegion"}}) {
    ValidationReport r = validate(test::read_ntriples_file(fixture(c.file)), shipped());
    EXPECT_TRUE(rules_hit(r, Severity::Violation).contains(c.rule)) << c.file << "\n"
                                                                     << report_table(r);
    // Each fault trips only its own pattern.
    ValidationReport p = validate_patterns(test::read_ntriples_file(fixture(c.file)),
                                           shipped().patterns);
    EXPECT_EQ(rules_hit(p, Severity::Violation), std::set<std::string>{c.rule}) << c.file;
  }
}

TEST(Shipped, ReportJson) {
  ValidationReport r = validate(test::read_ntriples_file(fixture("faults/unit.nt")), shipped());
  nlohmann::json j = report_to_json(r);
  EXPECT_EQ(j["conforms"], false);
  EXPECT_EQ(j["violations"], r.violations());
  ASSERT_FALSE(j["findings"].empty());
  EXPECT_TRUE(j["findings"][0].contains("focus"));
}

}  // namespace
}  // namespace kgforge
