#include "kgforge/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <set>

#include "kgforge/engine.hpp"
#include "kgforge/io.hpp"
#include "kgforge/jsonld.hpp"
#include "kgforge/ntriples.hpp"
#include "kgforge/vocab.hpp"

namespace kgforge {

namespace fs = std::filesystem;
using nlohmann::json;

// Config

json default_config_json() {
  PipelineConfig defaults;
  return defaults.to_json();
}

json PipelineConfig::to_json() const {
  json src = {{"mode", std::string(source_mode_name(source.mode))},
              {"base_url", source.base_url},
              {"directory", source.directory.string()},
              {"page_size", source.page_size},
              {"since", source.since ? json(source.since->str()) : json(nullptr)},
              {"rate_limit", source.rate_limit},
              {"max_retries", source.max_retries},
              {"backoff_initial_ms", source.backoff_initial.count()},
              {"backoff_max_ms", source.backoff_max.count()},
              {"parallel_fetches", source.parallel_fetches},
              {"jitter_seed", source.jitter_seed}};
  json mnt = {{"base", mint.base},
              {"strategy", std::string(strategy_name(mint.strategy))},
              {"uuid_namespace", mint.uuid_namespace.str()},
              {"graph_granularity", std::string(granularity_name(mint.granularity))}};
  return {{"source", std::move(src)},
          {"mint", std::move(mnt)},
          {"rules_dir", rules_dir.string()},
          {"shapes_dir", shapes_dir.string()},
          {"context_file", context_file.string()},
          {"store_dir", store_dir.string()},
          {"work_dir", work_dir.string()},
          {"endpoint", {{"host", endpoint.host}, {"port", endpoint.port}}}};
}

namespace {

void reject_unknown_keys(const json& doc, const json& defaults, const std::string& where) {
  if (!doc.is_object()) throw Error(where + " must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!defaults.contains(key)) {
      throw Error("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
    if (defaults[key].is_object()) reject_unknown_keys(value, defaults[key], key);
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path.lexically_normal() : (base / path).lexically_normal();
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& doc, const fs::path& base_dir) {
  json defaults = default_config_json();
  reject_unknown_keys(doc, defaults, "");
  json merged = defaults;
  merged.merge_patch(doc);
  // merge_patch drops keys set to null; "since" is the only nullable one.
  if (!merged["source"].contains("since")) merged["source"]["since"] = nullptr;

  PipelineConfig c;
  try {
    const json& s = merged.at("source");
    c.source.mode = parse_source_mode(s.at("mode").get<std::string>());
    c.source.base_url = s.at("base_url").get<std::string>();
    c.source.directory = resolve(base_dir, s.at("directory").get<std::string>());
    c.source.page_size = s.at("page_size").get<std::size_t>();
    if (!s.at("since").is_null()) c.source.since = Date::parse(s.at("since").get<std::string>());
    c.source.rate_limit = s.at("rate_limit").get<double>();
    c.source.max_retries = s.at("max_retries").get<int>();
    c.source.backoff_initial = std::chrono::milliseconds(s.at("backoff_initial_ms").get<std::int64_t>());
    c.source.backoff_max = std::chrono::milliseconds(s.at("backoff_max_ms").get<std::int64_t>());
    c.source.parallel_fetches = s.at("parallel_fetches").get<std::size_t>();
    c.source.jitter_seed = s.at("jitter_seed").get<std::uint64_t>();

    const json& m = merged.at("mint");
    c.mint.base = m.at("base").get<std::string>();
    c.mint.strategy = parse_strategy(m.at("strategy").get<std::string>());
    c.mint.uuid_namespace = Uuid::parse(m.at("uuid_namespace").get<std::string>());
    c.mint.granularity = parse_granularity(m.at("graph_granularity").get<std::string>());

    c.rules_dir = resolve(base_dir, merged.at("rules_dir").get<std::string>());
    c.shapes_dir = resolve(base_dir, merged.at("shapes_dir").get<std::string>());
    c.context_file = resolve(base_dir, merged.at("context_file").get<std::string>());
    c.store_dir = resolve(base_dir, merged.at("store_dir").get<std::string>());
    c.work_dir = resolve(base_dir, merged.at("work_dir").get<std::string>());
    c.endpoint.host = merged.at("endpoint").at("host").get<std::string>();
    c.endpoint.port = merged.at("endpoint").at("port").get<int>();
  } catch (const json::exception& e) {
    throw Error(std::string("invalid config: ") + e.what());
  }
  c.check();
  return c;
}

void PipelineConfig::check() const {
  source.check();
  mint.check();
  if (endpoint.port < 0 || endpoint.port > 65535) throw Error("endpoint.port out of range");
  if (store_dir.empty() || work_dir.empty()) throw Error("store_dir and work_dir are required");
}

namespace {

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

json parse_env_value(const json& like, const std::string& key, const std::string& text) {
  try {
    if (like.is_boolean()) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw Error("expected true or false");
    }
    if (like.is_number_unsigned()) return std::stoull(text);
    if (like.is_number_integer()) return std::stoll(text);
    if (like.is_number_float()) return std::stod(text);
    if (like.is_null() && (text.empty() || text == "none")) return nullptr;
    return text;
  } catch (const std::logic_error&) {
    throw Error("environment override " + key + "='" + text + "' is not a number");
  }
}

}  // namespace

json apply_env_overrides(json doc, const EnvLookup& getenv_fn) {
  json defaults = default_config_json();
  for (const auto& [key, value] : defaults.items()) {
    if (value.is_object()) {
      for (const auto& [sub, subvalue] : value.items()) {
        std::string name = "KGFORGE_" + upper(key) + "_" + upper(sub);
        if (const char* v = getenv_fn(name.c_str())) {
          doc[key][sub] = parse_env_value(subvalue, name, v);
        }
      }
    } else {
      std::string name = "KGFORGE_" + upper(key);
      if (const char* v = getenv_fn(name.c_str())) doc[key] = parse_env_value(value, name, v);
    }
  }
  return doc;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
  json doc = json::parse(read_file(file), nullptr, false);
  if (doc.is_discarded()) throw Error("config " + file.string() + " is not valid JSON");
  doc = apply_env_overrides(std::move(doc), [](const char* n) { return std::getenv(n); });
  fs::path base = fs::absolute(file).parent_path();
  return from_json(doc, base);
}

// Lock

StoreLock::StoreLock(const fs::path& store_dir) {
  fs::create_directories(store_dir);
  fs::path p = store_dir / ".lock";
  fd_ = ::open(p.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open " + p.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error("store " + store_dir.string() + " is locked by another run");
  }
}

StoreLock::~StoreLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

// Rules

std::vector<MappingRule> load_rules(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("rules directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".rq") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<MappingRule> rules;
  for (const fs::path& f : files) {
    MappingRule rule;
    try {
      rule = parse_rule(read_file(f), f.stem().string());
    } catch (const ParseError& e) {
      throw Error(f.filename().string() + ": " + e.what());
    }
    auto unknown = vocab::unknown_terms(rule_iris(rule));
    if (!unknown.empty()) {
      throw Error(f.filename().string() + ": unknown vocabulary term <" + unknown.front() + ">");
    }
    rules.push_back(std::move(rule));
  }
  if (rules.empty()) throw Error("no *.rq rules in " + dir.string());
  return rules;
}

// Per-record transformation

namespace {

Graph remint_graph(const Graph& g, const MintConfig& mint) {
  if (mint.strategy != MintStrategy::Uuid) return g;
  Graph out;
  for (const Triple& t : g) {
    Term p = remint_node(mint, Term(t.predicate()));
    out.insert(Triple(remint_node(mint, t.subject()), p.iri(), remint_node(mint, t.object())));
  }
  return out;
}

}  // namespace

TransformedRecord transform_record(const RawRecord& record, const JsonLdContext& context,
                                   const std::vector<MappingRule>& rules,
                                   const MintConfig& mint) {
  json payload = record.payload;
  if (payload.is_object() && !payload.contains("@id")) {
    payload["@id"] = mint_resource_iri(mint, record.submission_date.year,
                                       record.submission_date.month, record.source_id,
                                       record.suffix)
                         .str();
  }
  TransformedRecord out{Graph(), {}, Graph(), mint_graph_iri(mint, record.submission_date)};
  out.source = relabel_blank_nodes(to_rdf(payload, context),
                                   record_key(record.source_id, record.suffix));
  RulePackOutput pack = apply_rule_pack_detailed(out.source, std::span(rules));
  out.per_rule = std::move(pack.per_rule);
  Graph combined = out.source;
  combined.merge(pack.merged);
  out.combined = remint_graph(combined, mint);
  return out;
}

// Pipeline

Pipeline::Pipeline(PipelineConfig cfg, LogSink log, Transport* transport, Clock* clock)
    : cfg_(std::move(cfg)), log_(std::move(log)), transport_(transport), clock_(clock) {
  cfg_.check();
}

void Pipeline::log(const std::string& message) const {
  if (log_) {
    log_(message);
  } else {
    std::cerr << "kgforge: " << message << "\n";
  }
}

HarvestSummary Pipeline::harvest(const HarvestOptions* options) {
  try {
    if (cfg_.source.mode == SourceMode::Http && transport_ == nullptr) {
      owned_transport_ = make_http_transport();
      transport_ = owned_transport_.get();
    }
    RecordCache cache(cache_dir());
    Harvester h(cfg_.source, cache, checkpoint_file(), transport_, clock_,
                [this](std::string_view m) { log("harvest: " + std::string(m)); });
    HarvestOptions opts;
    if (options != nullptr) {
      opts = *options;
    } else if (fs::exists(checkpoint_file())) {
      // Continue an interrupted run; a completed one starts afresh.
      try {
        opts.resume = !Checkpoint::parse(read_file(checkpoint_file())).completed;
      } catch (const Error&) {
        opts.resume = true;  // the harvester reports and restarts
      }
    }
    HarvestSummary s;
    s.result = h.run([](const RawRecord&, const CacheEntry&) {}, opts);
    log("harvest: " + std::to_string(s.result.yielded) + " records (" +
        std::to_string(s.result.cache_hits) + " cache hits, " +
        std::to_string(s.result.fetched) + " fetched, " + std::to_string(s.result.skipped) +
        " skipped)");
    return s;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("harvest", e.what());
  }
}

TransformSummary Pipeline::transform() {
  try {
    std::vector<MappingRule> rules = load_rules(cfg_.rules_dir);
    json ctx_doc = json::parse(read_file(cfg_.context_file), nullptr, false);
    if (ctx_doc.is_discarded() || !ctx_doc.is_object() || !ctx_doc.contains("@context")) {
      throw Error("context file " + cfg_.context_file.string() + " lacks an @context");
    }
    JsonLdContext context = JsonLdContext::parse(ctx_doc["@context"]);

    RecordCache cache(cache_dir());
    std::vector<RawRecord> records =
        cached_records(cache, [this](std::string_view m) { log("transform: " + std::string(m)); });

    TransformSummary s;
    for (const MappingRule& r : rules) s.rule_triples[r.name] = 0;
    std::vector<Quad> quads;
    std::map<std::string, std::set<std::string>> sources;
    for (const RawRecord& record : records) {
      std::string key = record_key(record.source_id, record.suffix);
      std::optional<TransformedRecord> transformed;
      try {
        transformed = transform_record(record, context, rules, cfg_.mint);
      } catch (const Error& e) {
        ++s.failed;
        log("transform: record " + key + " skipped: " + e.what());
        continue;
      }
      const TransformedRecord& t = *transformed;
      ++s.records;
      s.source_triples += t.source.size();
      for (std::size_t i = 0; i < rules.size(); ++i) {
        s.rule_triples[rules[i].name] += t.per_rule[i].size();
      }
      for (const Triple& triple : t.combined) quads.emplace_back(triple, t.graph);
      sources[t.graph.str()].insert(key);
    }
    std::sort(quads.begin(), quads.end());
    quads.erase(std::unique(quads.begin(), quads.end()), quads.end());
    s.staged_quads = quads.size();
    s.graphs = sources.size();

    write_file_atomic(staged_file(), serialize_nquads(quads));
    write_file_atomic(sources_file(), json(sources).dump(2) + "\n");
    std::string per_rule;
    for (const auto& [name, n] : s.rule_triples) {
      per_rule += " " + name + "=" + std::to_string(n);
    }
    log("transform: " + std::to_string(s.records) + " records, " +
        std::to_string(s.staged_quads) + " quads in " + std::to_string(s.graphs) +
        " graphs; rule triples:" + per_rule);
    return s;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("transform", e.what());
  }
}

LoadSummary Pipeline::load(bool fresh) {
  std::optional<StoreLock> lock;
  try {
    lock.emplace(cfg_.store_dir);
  } catch (const std::exception& e) {
    throw StageError("load", e.what());
  }
  return load_locked(fresh);
}

LoadSummary Pipeline::load_locked(bool fresh) {
  try {
    if (!fs::exists(staged_file())) throw Error("nothing staged; run transform first");
    std::vector<Quad> quads = parse_nquads(read_file(staged_file()));
    LoadContext ctx;
    ctx.timestamp = utc_timestamp();
    if (fs::exists(sources_file())) {
      json doc = json::parse(read_file(sources_file()), nullptr, false);
      if (doc.is_discarded() || !doc.is_object()) throw Error("corrupt " + sources_file().string());
      for (const auto& [graph, keys] : doc.items()) {
        ctx.sources[GraphName(Iri(graph))] = keys.get<std::set<std::string>>();
      }
    }
    if (fresh) {
      for (const auto& e : fs::directory_iterator(cfg_.store_dir)) {
        if (e.path().filename() != ".lock") fs::remove_all(e.path());
      }
    }
    Store store = Store::load(cfg_.store_dir);
    LoadSummary s;
    s.staged = quads.size();
    s.inserted = store.load_quads(quads, ctx);
    s.total = store.size();
    store.persist(cfg_.store_dir);
    log("load: " + std::to_string(s.inserted) + " new quads (" + std::to_string(s.total) +
        " in store)");
    return s;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("load", e.what());
  }
}

ValidateSummary Pipeline::validate() {
  try {
    ShapeSet shapes = load_shapes_dir(cfg_.shapes_dir);
    auto unknown = vocab::unknown_terms(shape_iris(shapes));
    if (!unknown.empty()) throw Error("shapes use unknown vocabulary term <" + unknown.front() + ">");
    Store store = Store::load(cfg_.store_dir);
    Graph all;
    store.for_each_quad(nullptr, nullptr, nullptr, nullptr,
                        [&](const Quad& q) { all.insert(q.triple()); });
    ValidateSummary s;
    s.report = kgforge::validate(all, shapes);
    write_file_atomic(reports_dir() / "validation.json", report_to_json(s.report).dump(2) + "\n");
    write_file_atomic(reports_dir() / "validation.txt", report_table(s.report));
    log("validate: " + std::to_string(s.report.violations()) + " violations, " +
        std::to_string(s.report.warnings()) + " warnings");
    return s;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("validate", e.what());
  }
}

StoreStats Pipeline::stats() {
  try {
    StoreStats st = Store::load(cfg_.store_dir).stats();
    write_file_atomic(reports_dir() / "stats.json", stats_to_json(st).dump(2) + "\n");
    return st;
  } catch (const std::exception& e) {
    throw StageError("stats", e.what());
  }
}

json harvest_json(const HarvestSummary& s) {
  const HarvestResult& r = s.result;
  return {{"harvested", r.yielded}, {"cache_hits", r.cache_hits}, {"fetched", r.fetched},
          {"page_requests", r.page_requests}, {"skipped", r.skipped},
          {"filtered", r.filtered}, {"completed", r.completed}, {"resumed", r.resumed}};
}

json transform_json(const TransformSummary& s) {
  std::size_t rule_total = 0;
  for (const auto& [name, n] : s.rule_triples) rule_total += n;
  return {{"records", s.records},           {"failed", s.failed},
          {"source_triples", s.source_triples}, {"rule_triples", s.rule_triples},
          {"rule_triples_total", rule_total}, {"transformed_triples", s.staged_quads},
          {"graphs", s.graphs}};
}

json load_json(const LoadSummary& s) {
  return {{"staged", s.staged}, {"inserted", s.inserted}, {"total", s.total}};
}

json validate_json(const ValidateSummary& s) {
  return {{"violations", s.report.violations()}, {"warnings", s.report.warnings()}};
}

json Pipeline::run() {
  using Clock = std::chrono::steady_clock;
  json stages = json::array();
  json summary = {{"ok", false}};
  auto timed = [&](const char* name, auto&& fn) {
    auto start = Clock::now();
    json counts = fn();
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    stages.push_back({{"stage", name}, {"seconds", seconds}, {"counts", counts}});
    return counts;
  };
  auto finish = [&](bool ok, const std::string& failed_stage, const std::string& error) {
    summary["ok"] = ok;
    summary["stages"] = stages;
    if (!ok) {
      summary["failed_stage"] = failed_stage;
      summary["error"] = error;
    }
    write_file_atomic(summary_file(), summary.dump(2) + "\n");
  };

  try {
    StoreLock lock(cfg_.store_dir);
    json h = timed("harvest", [&] { return harvest_json(harvest()); });
    summary["harvested"] = h["harvested"];
    json t = timed("transform", [&] { return transform_json(transform()); });
    summary["transformed_triples"] = t["transformed_triples"];
    json l = timed("load", [&] { return load_json(load_locked(false)); });
    summary["inserted"] = l["inserted"];
    ValidateSummary v;
    timed("validate", [&] {
      v = validate();
      return validate_json(v);
    });
    summary["violations"] = v.report.violations();
    summary["warnings"] = v.report.warnings();
    StoreStats st;
    timed("stats", [&] {
      st = stats();
      return json{{"total_triples", st.total_triples}, {"entity_count", st.entity_count}};
    });
    summary["total_triples"] = st.total_triples;
  } catch (const StageError& e) {
    finish(false, e.stage(), e.what());
    throw;
  } catch (const std::exception& e) {
    finish(false, "run", e.what());
    throw StageError("run", e.what());
  }
  finish(true, {}, {});
  return summary;
}

}  // namespace kgforge
