#include <gtest/gtest.h>

#include "kgforge/error.hpp"
#include "kgforge/pipeline.hpp"
#include "support.hpp"

namespace kgforge {
namespace {

using nlohmann::json;
using test::TempDir;
namespace fs = std::filesystem;

const LogSink kQuiet = [](std::string_view) {};

const json& expected() {
  static const json doc = json::parse(read_file(test::corpus_dir() / "expected.json"));
  return doc;
}

void write_config(const fs::path& file, const PipelineConfig& cfg) {
  write_file_atomic(file, cfg.to_json().dump(2) + "\n");
}

TEST(Config, RoundTripAndDefaults) {
  TempDir tmp;
  PipelineConfig cfg = test::corpus_config(tmp.path());
  cfg.source.since = Date{2014, 6, 1};
  cfg.mint.strategy = MintStrategy::Uuid;
  cfg.mint.granularity = GraphGranularity::Day;
  cfg.endpoint.port = 9999;
  PipelineConfig back = PipelineConfig::from_json(cfg.to_json(), "/");
  EXPECT_EQ(back.to_json(), cfg.to_json());

  PipelineConfig defaults = PipelineConfig::from_json(json::object(), "/srv/kg");
  EXPECT_EQ(defaults.store_dir, fs::path("/srv/kg/store"));
  EXPECT_EQ(defaults.source.directory, fs::path("/srv/kg/records"));
  EXPECT_EQ(default_config_json()["source"]["page_size"], 100);
}

TEST(Config, RejectsUnknownAndIllTyped) {
  EXPECT_THROW(PipelineConfig::from_json(json{{"stor_dir", "x"}}, "/"), Error);
  EXPECT_THROW(PipelineConfig::from_json(json{{"source", {{"pagesize", 3}}}}, "/"), Error);
  EXPECT_THROW(PipelineConfig::from_json(json{{"source", {{"page_size", "many"}}}}, "/"), Error);
  EXPECT_THROW(PipelineConfig::from_json(json{{"mint", {{"strategy", "sha"}}}}, "/"), Error);
  EXPECT_THROW(PipelineConfig::from_json(json{{"endpoint", {{"port", 70000}}}}, "/"), Error);
}

TEST(Config, EnvironmentOverrides) {
  std::map<std::string, std::string> env{{"KGFORGE_STORE_DIR", "/data/store"},
                                         {"KGFORGE_SOURCE_PAGE_SIZE", "25"},
                                         {"KGFORGE_MINT_STRATEGY", "uuid"},
                                         {"KGFORGE_SOURCE_RATE_LIMIT", "2.5"}};
  auto lookup = [&](const char* name) -> const char* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  json doc = apply_env_overrides(json::object(), lookup);
  PipelineConfig cfg = PipelineConfig::from_json(doc, "/");
  EXPECT_EQ(cfg.store_dir, fs::path("/data/store"));
  EXPECT_EQ(cfg.source.page_size, 25u);
  EXPECT_EQ(cfg.mint.strategy, MintStrategy::Uuid);
  EXPECT_DOUBLE_EQ(cfg.source.rate_limit, 2.5);

  env = {{"KGFORGE_SOURCE_PAGE_SIZE", "lots"}};
  EXPECT_THROW(apply_env_overrides(json::object(), lookup), Error);
}

TEST(Pipeline, RunMatchesFixtureOracle) {
  TempDir tmp;
  Pipeline p(test::corpus_config(tmp.path()), kQuiet);
  json summary = p.run();
  EXPECT_EQ(summary["ok"], true);
  EXPECT_EQ(summary["harvested"], 50);
  EXPECT_EQ(summary["transformed_triples"], expected()["staged_quads"]);
  EXPECT_EQ(summary["inserted"], expected()["staged_quads"]);
  EXPECT_EQ(summary["violations"], 0);
  EXPECT_EQ(summary["warnings"], 0);
  ASSERT_EQ(summary["stages"].size(), 5u);
  EXPECT_EQ(summary["stages"][1]["counts"]["source_triples"], expected()["source_triples"]);
  for (const auto& [rule, n] : expected()["rule_triples"].items()) {
    EXPECT_EQ(summary["stages"][1]["counts"]["rule_triples"][rule], n) << rule;
  }
  EXPECT_EQ(json::parse(read_file(p.summary_file())), summary);

  // The loaded store is exactly the oracle's quad set.
  Store st = Store::load(tmp / "store");
  std::vector<Quad> oracle = parse_nquads(read_file(test::corpus_dir() / "expected.nq"));
  std::sort(oracle.begin(), oracle.end());
  EXPECT_EQ(st.quads(), oracle);

  for (const auto& [g, info] : expected()["graphs"].items()) {
    const GraphRecord& rec = st.manifest().at(g);
    EXPECT_EQ(rec.quad_count, info["quads"].get<std::size_t>()) << g;
    EXPECT_EQ(rec.sources.size(), info["records"].get<std::size_t>()) << g;
  }
}

TEST(Pipeline, StatsHandCountedOnFixture) {
  TempDir tmp;
  Pipeline p(test::corpus_config(tmp.path()), kQuiet);
  p.run();
  StoreStats s = p.stats();
  EXPECT_EQ(s.total_triples, expected()["staged_quads"].get<std::size_t>());
  EXPECT_EQ(s.entity_count, expected()["entity_count"].get<std::size_t>());
  EXPECT_EQ(s.graph_count, 8u);
  for (const auto& [cls, n] : expected()["per_class"].items()) {
    EXPECT_EQ(s.per_class.at(cls), n.get<std::size_t>()) << cls;
  }
  EXPECT_EQ(s.per_class.at("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0000009"), 50u);
  EXPECT_EQ(s.per_class.at("http://purl.obolibrary.org/obo/CHEBI_59999"), 10u);
  EXPECT_EQ(s.per_class.at("http://purl.obolibrary.org/obo/CHEBI_23367"), 10u);
  EXPECT_EQ(s.per_class.at("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0000004"), 5u);
  EXPECT_TRUE(fs::exists(p.reports_dir() / "stats.json"));
}

TEST(Pipeline, SecondRunIsIdempotent) {
  TempDir tmp;
  Pipeline p(test::corpus_config(tmp.path()), kQuiet);
  p.run();
  auto before = test::snapshot_dir(tmp / "store");
  json second = Pipeline(test::corpus_config(tmp.path()), kQuiet).run();
  EXPECT_EQ(second["inserted"], 0);
  EXPECT_EQ(second["stages"][0]["counts"]["cache_hits"], 50);
  EXPECT_EQ(test::snapshot_dir(tmp / "store"), before);
}

TEST(Pipeline, RunEqualsSequentialStages) {
  TempDir a, b;
  Pipeline(test::corpus_config(a.path()), kQuiet).run();
  Pipeline p(test::corpus_config(b.path()), kQuiet);
  p.harvest();
  p.transform();
  p.load();
  p.validate();
  p.stats();
  for (const char* f : {"work/staging/staged.nq", "work/staging/sources.json",
                        "work/reports/validation.json", "work/reports/stats.json",
                        "store/graphs/2014-05.nq", "store/graphs/2014-12.nq"}) {
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
  EXPECT_EQ(Store::load(a / "store").quads(), Store::load(b / "store").quads());
}

TEST(Pipeline, FreshLoadAndLock) {
  TempDir tmp;
  Pipeline p(test::corpus_config(tmp.path()), kQuiet);
  p.harvest();
  p.transform();
  EXPECT_EQ(p.load().inserted, expected()["staged_quads"].get<std::size_t>());
  EXPECT_EQ(p.load().inserted, 0u);
  EXPECT_EQ(p.load(true).inserted, expected()["staged_quads"].get<std::size_t>());

  StoreLock held(tmp / "store");
  EXPECT_THROW(p.load(), Error);
}

TEST(Pipeline, UuidStrategyRemintsNodes) {
  TempDir tmp;
  PipelineConfig cfg = test::corpus_config(tmp.path());
  cfg.mint.strategy = MintStrategy::Uuid;
  Pipeline p(cfg, kQuiet);
  json summary = p.run();
  EXPECT_EQ(summary["violations"], 0);
  Store st = Store::load(tmp / "store");
  Term unit = Iri("https://ditrare.ise.fiz-karlsruhe.de/chemotion-kg/nodes/" +
                  uuid_v5(url_namespace(), "g/mol").str());
  EXPECT_FALSE(st.match(&unit, nullptr, nullptr, nullptr).empty());
}

TEST(Pipeline, StageFailureNamesStage) {
  TempDir tmp;
  PipelineConfig cfg = test::corpus_config(tmp.path());
  cfg.source.directory = tmp / "missing";
  Pipeline p(cfg, kQuiet);
  try {
    p.run();
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "harvest");
  }
  json summary = json::parse(read_file(p.summary_file()));
  EXPECT_EQ(summary["ok"], false);
  EXPECT_EQ(summary["failed_stage"], "harvest");
}

TEST(Cli, RunTwiceAndStats) {
  TempDir tmp;
  write_config(tmp / "kgforge.json", test::corpus_config(tmp.path()));
  std::string cfg = "-c " + test::shell_quote((tmp / "kgforge.json").string());
  EXPECT_EQ(test::run_cli(cfg + " run", tmp / "run1.log"), 0) << read_file(tmp / "run1.log");
  auto before = test::snapshot_dir(tmp / "store");
  EXPECT_EQ(test::run_cli(cfg + " run", tmp / "run2.log"), 0);
  EXPECT_EQ(test::snapshot_dir(tmp / "store"), before);
  json summary = json::parse(read_file(tmp / "work/run-summary.json"));
  EXPECT_EQ(summary["inserted"], 0);

  EXPECT_EQ(test::run_cli(cfg + " stats --format json", tmp / "stats.out"), 0);
  std::string out = read_file(tmp / "stats.out");
  std::size_t open = out.find("{\n");
  ASSERT_NE(open, std::string::npos) << out;
  json stats = json::parse(out.substr(open, out.rfind('}') + 1 - open));
  EXPECT_EQ(stats["total_triples"], expected()["staged_quads"]);
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  EXPECT_EQ(test::run_cli("--no-such-flag", tmp / "a.log"), 1);
  EXPECT_EQ(test::run_cli("-c " + test::shell_quote((tmp / "absent.json").string()) + " run",
                          tmp / "b.log"),
            1);

  PipelineConfig broken = test::corpus_config(tmp.path());
  broken.source.directory = tmp / "missing";
  write_config(tmp / "broken.json", broken);
  EXPECT_EQ(test::run_cli("-c " + test::shell_quote((tmp / "broken.json").string()) + " harvest",
                          tmp / "c.log"),
            2);
  EXPECT_NE(read_file(tmp / "c.log").find("harvest"), std::string::npos);
}

TEST(Cli, ValidateSeededFaultStore) {
  TempDir tmp;
  PipelineConfig cfg = test::corpus_config(tmp.path());
  write_config(tmp / "kgforge.json", cfg);
  std::string flag = "-c " + test::shell_quote((tmp / "kgforge.json").string());

  Store good;
  std::vector<Quad> quads;
  for (const Triple& t : test::read_ntriples_file(test::fixture("faults/record0.nt"))) {
    quads.emplace_back(t, Iri("https://ditrare.ise.fiz-karlsruhe.de/chemotion-kg/graphs/2014/05"));
  }
  good.load_quads(quads);
  good.persist(cfg.store_dir);
  EXPECT_EQ(test::run_cli(flag + " validate", tmp / "ok.log"), 0) << read_file(tmp / "ok.log");

  for (const char* fault : {"faults/par.nt", "faults/unit.nt", "faults/temporal.nt"}) {
    fs::remove_all(cfg.store_dir);
    Store bad;
    std::vector<Quad> q;
    for (const Triple& t : test::read_ntriples_file(test::fixture(fault))) q.emplace_back(t);
    bad.load_quads(q);
    bad.persist(cfg.store_dir);
    EXPECT_EQ(test::run_cli(flag + " validate", tmp / "bad.log"), 3) << fault;
    EXPECT_TRUE(fs::exists(cfg.work_dir / "reports" / "validation.json"));
  }
}

}  // namespace
}  // namespace kgforge
