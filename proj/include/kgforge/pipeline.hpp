#pragma once

// The daily pipeline: harvest -> transform -> load -> validate -> stats.
//
// Work directory layout:
//   cache/                     raw record cache (see harvester.hpp)
//   harvest.checkpoint.json
//   staging/staged.nq          transformed quads
//   staging/sources.json       record keys per graph
//   reports/validation.json, reports/validation.txt, reports/stats.json
//   run-summary.json

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/error.hpp"
#include "kgforge/harvester.hpp"
#include "kgforge/mint.hpp"
#include "kgforge/sparql.hpp"
#include "kgforge/store.hpp"
#include "kgforge/validator.hpp"

namespace kgforge {

struct EndpointConfig {
  std::string host = "127.0.0.1";
  int port = 8080;

  friend bool operator==(const EndpointConfig&, const EndpointConfig&) = default;
};

struct PipelineConfig {
  SourceConfig source;
  MintConfig mint;
  std::filesystem::path rules_dir = "rules";
  std::filesystem::path shapes_dir = "shapes";
  std::filesystem::path context_file = "rules/schema_context.jsonld";
  std::filesystem::path store_dir = "store";
  std::filesystem::path work_dir = "work";
  EndpointConfig endpoint;

  // Relative paths are resolved against `base_dir`. Unknown keys are
  // rejected. Throws kgforge::Error.
  static PipelineConfig from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir);
  nlohmann::json to_json() const;

  // Reads a config file, then applies KGFORGE_* environment overrides
  // (KGFORGE_STORE_DIR, KGFORGE_SOURCE_PAGE_SIZE, KGFORGE_MINT_STRATEGY, ...).
  static PipelineConfig load(const std::filesystem::path& file);

  void check() const;
};

// Overrides named after the JSON keys: KGFORGE_<SECTION>_<KEY> for nested
// keys and KGFORGE_<KEY> for top-level ones. `getenv` is injectable for
// tests.
using EnvLookup = std::function<const char*(const char*)>;
nlohmann::json apply_env_overrides(nlohmann::json doc, const EnvLookup& getenv_fn);

nlohmann::json default_config_json();

// A stage failed; the message names the stage.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& message)
      : Error(stage + ": " + message), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct HarvestSummary {
  HarvestResult result;
};

struct TransformSummary {
  std::size_t records = 0;
  std::size_t failed = 0;
  std::size_t source_triples = 0;
  std::map<std::string, std::size_t> rule_triples;  // rule name -> triples
  std::size_t staged_quads = 0;
  std::size_t graphs = 0;
};

struct LoadSummary {
  std::size_t staged = 0;
  std::size_t inserted = 0;
  std::size_t total = 0;
};

struct ValidateSummary {
  ValidationReport report;
};

// Serializes stages on a store directory through an advisory lock on
// <store_dir>/.lock.
class StoreLock {
 public:
  explicit StoreLock(const std::filesystem::path& store_dir);
  ~StoreLock();
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

// Loads every *.rq file of `dir` in file-name order; the rule name is the
// file stem. Rules mentioning unknown ontology terms are rejected.
std::vector<MappingRule> load_rules(const std::filesystem::path& dir);

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, LogSink log = {}, Transport* transport = nullptr,
                    Clock* clock = nullptr);

  const PipelineConfig& config() const noexcept { return cfg_; }

  HarvestSummary harvest(const HarvestOptions* options = nullptr);
  TransformSummary transform();
  LoadSummary load(bool fresh = false);
  ValidateSummary validate();
  StoreStats stats();

  // All stages in order under the store lock; stops at the first failure
  // (StageError). Writes the run summary (also on failure) and returns it.
  nlohmann::json run();

  std::filesystem::path cache_dir() const { return cfg_.work_dir / "cache"; }
  std::filesystem::path checkpoint_file() const {
    return cfg_.work_dir / "harvest.checkpoint.json";
  }
  std::filesystem::path staged_file() const { return cfg_.work_dir / "staging" / "staged.nq"; }
  std::filesystem::path sources_file() const {
    return cfg_.work_dir / "staging" / "sources.json";
  }
  std::filesystem::path reports_dir() const { return cfg_.work_dir / "reports"; }
  std::filesystem::path summary_file() const { return cfg_.work_dir / "run-summary.json"; }

 private:
  void log(const std::string& message) const;
  LoadSummary load_locked(bool fresh);

  PipelineConfig cfg_;
  LogSink log_;
  Transport* transport_;
  Clock* clock_;
  std::unique_ptr<Transport> owned_transport_;
};

nlohmann::json harvest_json(const HarvestSummary& s);
nlohmann::json transform_json(const TransformSummary& s);
nlohmann::json load_json(const LoadSummary& s);
nlohmann::json validate_json(const ValidateSummary& s);

// Transformation of one record: JSON-LD conversion, blank-node scoping,
// the rule pack, and (uuid strategy) node re-minting. Assigns the minted
// resource IRI to an object payload without "@id".
struct TransformedRecord {
  Graph source;
  std::vector<Graph> per_rule;
  Graph combined;
  Iri graph;
};
TransformedRecord transform_record(const RawRecord& record, const JsonLdContext& context,
                                   const std::vector<MappingRule>& rules, const MintConfig& mint);

}  // namespace kgforge
