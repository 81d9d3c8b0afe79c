#include <gtest/gtest.h>

#include <httplib.h>

#include "kgforge/endpoint.hpp"
#include "kgforge/engine.hpp"
#include "kgforge/jsonld.hpp"
#include "kgforge/ntriples.hpp"
#include "support.hpp"

namespace kgforge {
namespace {

using nlohmann::json;

const std::string kGraphs = "https://ditrare.ise.fiz-karlsruhe.de/chemotion-kg/graphs/";

std::shared_ptr<const Store> corpus_store() {
  static std::shared_ptr<const Store> store = [] {
    auto st = std::make_shared<Store>();
    st->load_quads(parse_nquads(read_file(test::corpus_dir() / "expected.nq")));
    return std::shared_ptr<const Store>(st);
  }();
  return store;
}

const json& expected() {
  static const json doc = json::parse(read_file(test::corpus_dir() / "expected.json"));
  return doc;
}

EndpointResponse get(const Endpoint& ep, const std::string& path,
                     std::multimap<std::string, std::string> params = {},
                     const std::string& accept = "") {
  EndpointRequest r;
  r.path = path;
  r.params = std::move(params);
  r.accept = accept;
  return ep.handle(r);
}

json select(const Endpoint& ep, const std::string& query,
            std::multimap<std::string, std::string> extra = {}) {
  extra.emplace("query", query);
  EndpointResponse r = get(ep, "/sparql", extra);
  EXPECT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(r.content_type, "application/sparql-results+json");
  return json::parse(r.body);
}

TEST(Endpoint, DatasetRows) {
  Endpoint ep(corpus_store());
  json j = select(ep, "SELECT ?d WHERE { ?d a nfdicore:NFDI_0000009 }");
  EXPECT_EQ(j["head"]["vars"], json::array({"d"}));
  EXPECT_EQ(j["results"]["bindings"].size(), 50u);
  EXPECT_EQ(j["results"]["bindings"][0]["d"]["type"], "uri");
}

TEST(Endpoint, CountMatchesFixture) {
  Endpoint ep(corpus_store());
  json j = select(ep, "SELECT (COUNT(?d) AS ?n) WHERE { ?d a nfdicore:NFDI_0000009 }");
  const json& n = j["results"]["bindings"][0]["n"];
  EXPECT_EQ(n["value"], "50");
  EXPECT_EQ(n["datatype"], "http://www.w3.org/2001/XMLSchema#integer");
  json m = select(ep, "SELECT (COUNT(DISTINCT ?m) AS ?n) WHERE { ?s obo:BFO_0000178 ?m . "
                      "?m a obo:CHEBI_23367 }");
  EXPECT_EQ(m["results"]["bindings"][0]["n"]["value"], "10");
}

TEST(Endpoint, LimitZeroKeepsVariables) {
  Endpoint ep(corpus_store());
  json j = select(ep, "SELECT ?d ?t WHERE { ?d nfdicore:NFDI_0000216 ?t } LIMIT 0");
  EXPECT_EQ(j["head"]["vars"], json::array({"d", "t"}));
  EXPECT_TRUE(j["results"]["bindings"].empty());
}

TEST(Endpoint, GraphScope) {
  Endpoint ep(corpus_store());
  std::string g = kGraphs + "2014/05";
  json j = select(ep, "SELECT * WHERE { GRAPH <" + g + "> { ?s ?p ?o } }");
  std::size_t n = expected()["graphs"][g]["quads"];
  EXPECT_EQ(j["results"]["bindings"].size(), n);
  EXPECT_EQ(j["head"]["vars"], json::array({"s", "p", "o"}));

  json scoped = select(ep, "SELECT ?d WHERE { ?d a nfdicore:NFDI_0000009 }",
                       {{"default-graph-uri", kGraphs + "2014/06"}});
  EXPECT_EQ(scoped["results"]["bindings"].size(), 7u);

  json explicit_graph = select(ep, "SELECT ?d WHERE { GRAPH <" + g + "> { ?d a nfdicore:NFDI_0000009 } }",
                               {{"default-graph-uri", kGraphs + "2014/06"}});
  EXPECT_EQ(explicit_graph["results"]["bindings"].size(), 1u);
}

TEST(Endpoint, SelectEqualsInProcessBgp) {
  std::string q = "SELECT * WHERE { ?d nfdicore:NFDI_0000216 ?t ; nfdicore:NFDI_0001027 ?c }";
  Endpoint ep(corpus_store());
  json j = select(ep, q);
  Query parsed = parse_query(q, default_query_prefixes());
  auto direct = eval_bgp(corpus_store()->view(), parsed.where);
  ASSERT_EQ(j["results"]["bindings"].size(), direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    EXPECT_EQ(j["results"]["bindings"][i]["t"]["value"], direct[i].at("t").literal().lexical());
    EXPECT_EQ(j["results"]["bindings"][i]["d"]["value"], direct[i].at("d").iri().str());
  }
}

TEST(Endpoint, OrderDistinctOffset) {
  Endpoint ep(corpus_store());
  json j = select(ep, "SELECT DISTINCT ?t WHERE { ?d nfdicore:NFDI_0000216 ?t } ORDER BY DESC(?t)");
  std::vector<std::string> got;
  for (const auto& b : j["results"]["bindings"]) got.push_back(b["t"]["value"]);
  EXPECT_EQ(got, (std::vector<std::string>{"Raman", "MS", "IR", "1H NMR", "13C NMR"}));
  json page = select(ep, "SELECT DISTINCT ?t WHERE { ?d nfdicore:NFDI_0000216 ?t } "
                         "ORDER BY ?t LIMIT 2 OFFSET 1");
  ASSERT_EQ(page["results"]["bindings"].size(), 2u);
  EXPECT_EQ(page["results"]["bindings"][0]["t"]["value"], "1H NMR");
}

TEST(Endpoint, LiteralEncoding) {
  Endpoint ep(corpus_store());
  json j = select(ep, "SELECT ?w WHERE { ?m schema:molecularWeight ?w } LIMIT 1");
  const json& w = j["results"]["bindings"][0]["w"];
  EXPECT_EQ(w["type"], "literal");
  EXPECT_EQ(w["datatype"], "http://www.w3.org/2001/XMLSchema#decimal");
  json s = select(ep, "SELECT ?n WHERE { ?p a schema:Person ; schema:name ?n } LIMIT 1");
  EXPECT_FALSE(s["results"]["bindings"][0]["n"].contains("datatype"));
}

TEST(Endpoint, AskAndConstruct) {
  Endpoint ep(corpus_store());
  EndpointResponse ask = get(ep, "/sparql", {{"query", "ASK { ?s a obo:CHEBI_23367 }"}});
  EXPECT_EQ(json::parse(ask.body)["boolean"], true);
  EndpointResponse no = get(ep, "/sparql", {{"query", "ASK { ?s a obo:BFO_0000023 ; a obo:CHEBI_23367 }"}});
  EXPECT_EQ(json::parse(no.body)["boolean"], false);

  Endpoint empty(std::make_shared<const Store>());
  EndpointResponse c = get(empty, "/sparql", {{"query", "CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }"}});
  EXPECT_EQ(c.status, 200);
  EXPECT_EQ(c.content_type, "application/n-triples");
  EXPECT_TRUE(c.body.empty());
}

TEST(Endpoint, DatasetRuleThroughEndpoint) {
  std::string rule_text = read_file(test::source_dir() / "rules" / "dataset.rq");
  Graph source = to_rdf(json::parse(read_file(test::fixture("dataset_rule/record.jsonld"))),
                        JsonLdContext::schema_org());
  auto st = std::make_shared<Store>();
  std::vector<Quad> quads;
  for (const Triple& t : source) quads.emplace_back(t, Iri(kGraphs + "2014/05"));
  st->load_quads(quads);
  Endpoint ep(st);
  EndpointResponse r = get(ep, "/sparql", {{"query", rule_text}});
  ASSERT_EQ(r.status, 200) << r.body;
  Graph via_endpoint = parse_ntriples(r.body);
  EXPECT_EQ(via_endpoint, apply_rule(source, parse_rule(rule_text)));
  EXPECT_EQ(via_endpoint.size(), 11u);
}

TEST(Endpoint, TsvNegotiation) {
  Endpoint ep(corpus_store());
  EndpointResponse r = get(ep, "/sparql",
                           {{"query", "SELECT ?t WHERE { ?d nfdicore:NFDI_0000216 ?t } LIMIT 1"}},
                           "text/tab-separated-values");
  EXPECT_EQ(r.content_type, "text/tab-separated-values; charset=utf-8");
  EXPECT_TRUE(r.body.starts_with("?t\n\""));
}

TEST(Endpoint, StatsAndExport) {
  Endpoint ep(corpus_store());
  EndpointResponse s = get(ep, "/stats");
  EXPECT_EQ(s.status, 200);
  json stats = json::parse(s.body);
  EXPECT_EQ(stats["total_triples"], expected()["staged_quads"]);
  EXPECT_EQ(stats["graph_count"], 8);

  EndpointResponse e = get(ep, "/export/2014/05");
  EXPECT_EQ(e.status, 200);
  EXPECT_EQ(e.content_type, "application/n-quads");
  std::vector<Quad> q = parse_nquads(e.body);
  EXPECT_EQ(q.size(), expected()["graphs"][kGraphs + "2014/05"]["quads"].get<std::size_t>());
  for (const Quad& x : q) EXPECT_EQ(x.graph()->str(), kGraphs + "2014/05");
  EXPECT_EQ(get(ep, "/export/2013/01").status, 404);
}

TEST(Endpoint, ErrorStatuses) {
  Endpoint ep(corpus_store());
  EXPECT_EQ(get(ep, "/sparql").status, 400);
  EXPECT_EQ(get(ep, "/sparql", {{"query", "SELECT WHERE"}}).status, 400);
  EXPECT_EQ(get(ep, "/sparql", {{"query", "SELECT * WHERE { ?s ?p ?o FILTER(?o) }"}}).status, 400);
  EXPECT_EQ(get(ep, "/sparql", {{"query", "SELECT * WHERE { ?s ?p ?o }"},
                                {"default-graph-uri", "not an iri"}})
                .status,
            400);
  EXPECT_EQ(get(ep, "/nope").status, 404);
  EndpointRequest put;
  put.method = "PUT";
  put.path = "/stats";
  EXPECT_EQ(ep.handle(put).status, 405);
}

TEST(Endpoint, SwapServes503ThenNewSnapshot) {
  Endpoint ep(std::make_shared<const Store>());
  json before = select(ep, "SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }");
  EXPECT_EQ(before["results"]["bindings"][0]["n"]["value"], "0");
  ep.begin_swap();
  EXPECT_EQ(get(ep, "/stats").status, 503);
  ep.swap(corpus_store());
  json after = select(ep, "SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }");
  // The default graph is the union of all graphs; shared triples count once.
  Graph distinct;
  for (const Quad& q : parse_nquads(read_file(test::corpus_dir() / "expected.nq"))) {
    distinct.insert(q.triple());
  }
  EXPECT_EQ(after["results"]["bindings"][0]["n"]["value"], std::to_string(distinct.size()));
}

TEST(Server, HttpRoundTrip) {
  Endpoint ep(corpus_store());
  Server server(ep);
  int port = server.bind("127.0.0.1", 0);
  server.start();
  httplib::Client client("127.0.0.1", port);

  httplib::Params params{{"query", "SELECT (COUNT(?d) AS ?n) WHERE { ?d a nfdicore:NFDI_0000009 }"}};
  auto r = client.Get("/sparql", params, httplib::Headers{});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["results"]["bindings"][0]["n"]["value"], "50");

  auto post = client.Post("/sparql", "ASK { ?s a obo:CHEBI_59999 }", "application/sparql-query");
  ASSERT_TRUE(post);
  EXPECT_EQ(json::parse(post->body)["boolean"], true);

  auto form = client.Post("/sparql", httplib::Params{{"query", "ASK { ?s a obo:IAO_0000109 }"}});
  ASSERT_TRUE(form);
  EXPECT_EQ(form->status, 200);
  EXPECT_EQ(json::parse(form->body)["boolean"], true);

  auto missing = client.Get("/export/1999/01");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  server.stop();
}

}  // namespace
}  // namespace kgforge
