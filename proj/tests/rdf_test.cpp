#include <gtest/gtest.h>

#include "kgforge/error.hpp"
#include "kgforge/ntriples.hpp"
#include "kgforge/turtle.hpp"
#include "support.hpp"

namespace kgforge {
namespace {

using test::fixture;

const Iri kP("https://example.org/p");

TEST(Term, IriValidity) {
  EXPECT_TRUE(Iri::is_valid("http://schema.org/Dataset"));
  EXPECT_TRUE(Iri::is_valid("urn:uuid:bc7f23b6-fca5-5eee-832d-b04246749d0b"));
  EXPECT_FALSE(Iri::is_valid("relative/path"));
  EXPECT_FALSE(Iri::is_valid(":nope"));
  EXPECT_FALSE(Iri::is_valid("1http://x"));
  EXPECT_FALSE(Iri::is_valid("http://x/a b"));
  EXPECT_FALSE(Iri::is_valid("http://x/<a>"));
  EXPECT_THROW(Iri("no scheme"), InvalidTerm);
}

TEST(Term, BlankLabelsAndLanguages) {
  EXPECT_NO_THROW(BlankNode("b_isPartOf_0"));
  EXPECT_THROW(BlankNode(""), InvalidTerm);
  EXPECT_THROW(BlankNode("a-b"), InvalidTerm);
  EXPECT_TRUE(Literal::is_valid_language("en"));
  EXPECT_TRUE(Literal::is_valid_language("de-CH-1996"));
  EXPECT_FALSE(Literal::is_valid_language("e1"));
  EXPECT_FALSE(Literal::is_valid_language("en-"));
  EXPECT_THROW(Literal("x", Iri(std::string(rdf::kLangString))), InvalidTerm);
}

TEST(Term, LiteralSubjectRejected) {
  EXPECT_THROW(Triple(Literal("x"), kP, Literal("y")), InvalidTerm);
}

TEST(Term, CanonicalOrderByKind) {
  Term b = BlankNode("z");
  Term i = Iri("http://a/");
  Term l = Literal("a");
  EXPECT_LT(b, i);
  EXPECT_LT(i, l);
  EXPECT_LT(Term(Literal("a")), Term(Literal("b")));
  EXPECT_NE(Term(Literal("1")), Term(Literal("1", Iri(std::string(xsd::kInteger)))));
}

TEST(Term, QuadOrderPutsDefaultGraphFirst) {
  Triple t(Iri("http://a/s"), kP, Literal("o"));
  Quad named(t, Iri("http://a/g"));
  Quad dflt(t);
  EXPECT_LT(dflt, named);
}

TEST(NTriples, SerializationEscapes) {
  Term l = Literal("a\"b\\c\nd\te\x01");
  EXPECT_EQ(to_ntriples(l), R"("a\"b\\c\nd\te\u0001")");
  EXPECT_EQ(to_ntriples(Term(Literal::lang("Spektrum", "de"))), "\"Spektrum\"@de");
  EXPECT_EQ(to_ntriples(Term(Literal("3", Iri(std::string(xsd::kInteger))))),
            "\"3\"^^<http://www.w3.org/2001/XMLSchema#integer>");
  EXPECT_EQ(to_ntriples(Term(BlankNode("b0"))), "_:b0");
}

TEST(NTriples, RoundTrip) {
  Graph g;
  g.insert(Triple(Iri("http://a/s"), kP, Literal("line\nbreak \"quoted\" é")));
  g.insert(Triple(Iri("http://a/s"), kP, Literal::lang("x", "en-GB")));
  g.insert(Triple(BlankNode("n1"), kP, Iri("http://a/o")));
  g.insert(Triple(BlankNode("n1"), kP, Literal("2.5", Iri(std::string(xsd::kDecimal)))));
  std::string text = serialize_ntriples(g);
  EXPECT_EQ(parse_ntriples(text), g);
  EXPECT_EQ(serialize_ntriples(parse_ntriples(text)), text);
}

TEST(NTriples, UnicodeEscapesDecode) {
  Graph g = parse_ntriples("<http://a/s> <https://example.org/p> \"\\u00E9\\U0001F600\" .\n");
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.begin()->object().literal().lexical(), "\xC3\xA9\xF0\x9F\x98\x80");
}

TEST(NTriples, CommentsAndBlankLines) {
  Graph g = parse_ntriples("# header\n\n<http://a/s> <http://a/p> <http://a/o> . # trailing\n");
  EXPECT_EQ(g.size(), 1u);
}

TEST(NTriples, ErrorsCarryPosition) {
  try {
    parse_ntriples("<http://a/s> <http://a/p> <http://a/o> .\n<http://a/s> <http://a/p> .\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
  EXPECT_THROW(parse_ntriples("<rel> <http://a/p> <http://a/o> .\n"), Error);
  EXPECT_THROW(parse_ntriples("\"lit\" <http://a/p> <http://a/o> .\n"), Error);
  EXPECT_THROW(parse_ntriples("<http://a/s> <http://a/p> <http://a/o>\n"), ParseError);
}

TEST(NQuads, ThreeGraphFixture) {
  std::vector<Quad> quads = parse_nquads(read_file(fixture("rdf/three_graphs.nq")));
  ASSERT_EQ(quads.size(), 5u);
  std::map<std::string, int> per_graph;
  for (const Quad& q : quads) ++per_graph[q.graph() ? q.graph()->str() : ""];
  EXPECT_EQ(per_graph[""], 1);
  EXPECT_EQ(per_graph["https://example.org/graphs/2014/05"], 2);
  EXPECT_EQ(per_graph["https://example.org/graphs/2014/06"], 2);

  std::string text = serialize_nquads(quads);
  std::vector<Quad> again = parse_nquads(text);
  EXPECT_EQ(serialize_nquads(again), text);
  EXPECT_TRUE(std::is_sorted(again.begin(), again.end()));
  EXPECT_FALSE(again.front().graph().has_value());
}

TEST(NQuads, DuplicatesDroppedOnSerialize) {
  Quad q(Triple(Iri("http://a/s"), kP, Literal("o")), Iri("http://a/g"));
  std::vector<Quad> quads{q, q};
  EXPECT_EQ(serialize_nquads(quads), to_nquads_line(q));
  EXPECT_EQ(parse_nquads(to_nquads_line(q) + to_nquads_line(q)).size(), 2u);
}

TEST(Turtle, TwinOfNTriples) {
  Graph ttl = parse_turtle_subset(read_file(fixture("rdf/twin.ttl")));
  Graph nt = parse_ntriples(read_file(fixture("rdf/twin.nt")));
  EXPECT_EQ(ttl.size(), 11u);
  EXPECT_EQ(serialize_ntriples(ttl), serialize_ntriples(nt));
}

TEST(Turtle, RejectsUnsupportedSyntax) {
  EXPECT_THROW(parse_turtle_subset("@prefix e: <http://e/> . e:s e:p [ e:q 1 ] ."), ParseError);
  EXPECT_THROW(parse_turtle_subset("@prefix e: <http://e/> . e:s e:p ( 1 2 ) ."), ParseError);
  EXPECT_THROW(parse_turtle_subset("@base <http://e/> ."), ParseError);
}

TEST(Turtle, UnknownPrefixNamed) {
  try {
    parse_turtle_subset("nope:s <http://e/p> 1 .");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
  }
}

}  // namespace
}  // namespace kgforge
