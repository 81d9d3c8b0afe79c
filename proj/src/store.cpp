#include "kgforge/store.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <sstream>

#include "kgforge/digest.hpp"
#include "kgforge/error.hpp"
#include "kgforge/io.hpp"
#include "kgforge/ntriples.hpp"
#include "kgforge/vocab.hpp"

namespace kgforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string graph_key_of(const GraphName& g) { return g ? g->str() : std::string(); }

namespace {

// graphs/2014/05 -> graphs/2014-05.nq; graphs/2014/05/17 -> graphs/2014-05-17.nq
std::string graph_file_name(const GraphName& g) {
  if (!g) return "default.nq";
  static const std::regex dated(R"(/graphs/(\d{4})/(\d{2})(?:/(\d{2}))?$)");
  std::smatch m;
  const std::string& iri = g->str();
  if (std::regex_search(iri, m, dated)) {
    std::string name = m[1].str() + "-" + m[2].str();
    if (m[3].matched) name += "-" + m[3].str();
    return "graphs/" + name + ".nq";
  }
  return "graphs/g-" + to_hex(fnv1a64(iri)) + ".nq";
}

}  // namespace

Store::Store() {
  // Id 0 stands for the default graph and never appears as a term.
  terms_.emplace_back(BlankNode("default_graph"));
}

Store::Id Store::intern(const Term& t) {
  auto [it, inserted] = ids_.try_emplace(t, static_cast<Id>(terms_.size()));
  if (inserted) {
    if (terms_.size() >= kNoId) throw Error("term dictionary is full");
    terms_.push_back(t);
  }
  return it->second;
}

Store::Id Store::lookup(const Term& t) const {
  auto it = ids_.find(t);
  return it == ids_.end() ? kNoId : it->second;
}

Store::Id Store::graph_id(const GraphName& g) const {
  return g ? lookup(Term(*g)) : Id{0};
}

Quad Store::decode(const Row& r) const {
  GraphName g;
  if (r[0] != 0) g = terms_[r[0]].iri();
  return Quad(decode_triple(r), std::move(g));
}

Triple Store::decode_triple(const Row& r) const {
  return Triple(terms_[r[1]], terms_[r[2]].iri(), terms_[r[3]]);
}

std::size_t Store::load_quads(std::span<const Quad> quads, const LoadContext& ctx) {
  std::size_t inserted = 0;
  std::set<GraphName> touched;
  for (const Quad& q : quads) {
    Id g = q.graph() ? intern(Term(*q.graph())) : Id{0};
    Id s = intern(q.triple().subject());
    Id p = intern(Term(q.triple().predicate()));
    Id o = intern(q.triple().object());
    if (!gspo_.insert({g, s, p, o}).second) continue;
    posg_.insert({p, o, s, g});
    ospg_.insert({o, s, p, g});
    ++graph_sizes_[g];
    ++inserted;
    touched.insert(q.graph());
  }
  for (const GraphName& g : touched) {
    GraphRecord& rec = manifest_[graph_key_of(g)];
    if (rec.file.empty()) {
      rec.file = graph_file_name(g);
      // Two graph IRIs with the same dated tail under different bases.
      for (const auto& [key, other] : manifest_) {
        if (&other != &rec && other.file == rec.file) {
          rec.file = "graphs/g-" + to_hex(fnv1a64(g->str())) + ".nq";
          break;
        }
      }
    }
    rec.quad_count = graph_sizes_[graph_id(g)];
    if (!ctx.timestamp.empty()) rec.load_timestamps.push_back(ctx.timestamp);
  }
  for (const auto& [g, sources] : ctx.sources) {
    auto it = manifest_.find(graph_key_of(g));
    if (it == manifest_.end()) continue;
    it->second.sources.insert(sources.begin(), sources.end());
  }
  return inserted;
}

bool Store::contains(const Quad& q) const {
  bool found = false;
  const Term& s = q.triple().subject();
  const Term& o = q.triple().object();
  scan(&s, &q.triple().predicate(), &o, &q.graph(), [&](const Row&) { found = true; });
  return found;
}

std::vector<Quad> Store::match(const Term* s, const Iri* p, const Term* o,
                               const GraphName* g) const {
  std::vector<Quad> out;
  for_each_quad(s, p, o, g, [&](Quad q) { out.push_back(std::move(q)); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Quad> Store::quads() const {
  std::vector<Quad> out;
  out.reserve(gspo_.size());
  for (const Row& r : gspo_) out.push_back(decode(r));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GraphName> Store::graph_names() const {
  std::vector<GraphName> out;
  for (const auto& [g, count] : graph_sizes_) {
    out.push_back(g == 0 ? GraphName() : GraphName(terms_[g].iri()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Store::graph_size(const GraphName& g) const {
  auto it = graph_sizes_.find(graph_id(g));
  return it == graph_sizes_.end() ? 0 : it->second;
}

Graph Store::graph(const GraphName& g) const {
  Graph out;
  Id gi = graph_id(g);
  if (gi == kNoId) return out;
  detail::prefix_scan(gspo_, {gi, 0, 0, 0}, 1,
                      [&](const Row& r) { out.insert(decode_triple(r)); });
  return out;
}

StoreStats Store::stats() const {
  StoreStats st;
  st.total_triples = gspo_.size();
  for (const auto& [g, count] : graph_sizes_) {
    if (g != 0) ++st.graph_count;
  }
  for (const Iri& c : vocab::classes()) st.per_class[c.str()] = 0;

  std::map<Id, std::size_t> per_predicate;
  for (const Row& r : gspo_) ++per_predicate[r[2]];
  for (const auto& [p, count] : per_predicate) st.per_predicate[terms_[p].iri().str()] = count;

  Id type = lookup(Term(Iri(std::string(rdf::kType))));
  if (type != kNoId) {
    std::map<Id, std::set<Id>> instances;
    std::set<Id> typed;
    detail::prefix_scan(posg_, {type, 0, 0, 0}, 1, [&](const Row& r) {
      instances[r[1]].insert(r[2]);
      typed.insert(r[2]);
    });
    for (const auto& [cls, subjects] : instances) {
      if (terms_[cls].is_iri()) st.per_class[terms_[cls].iri().str()] = subjects.size();
    }
    st.entity_count = typed.size();
  }
  return st;
}

json stats_to_json(const StoreStats& stats) {
  json doc = json::object();
  doc["total_triples"] = stats.total_triples;
  doc["entity_count"] = stats.entity_count;
  doc["graph_count"] = stats.graph_count;
  doc["per_class"] = stats.per_class;
  doc["per_predicate"] = stats.per_predicate;
  return doc;
}

std::string stats_table(const StoreStats& stats) {
  std::ostringstream out;
  auto row = [&](std::string_view name, std::size_t value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%12zu", value);
    out << buf << "  " << name << "\n";
  };
  auto display = [](const std::string& iri) {
    std::string_view s = vocab::short_name_of(iri);
    return s.empty() ? iri : std::string(s);
  };
  row("triples", stats.total_triples);
  row("entities", stats.entity_count);
  row("named graphs", stats.graph_count);
  out << "classes\n";
  for (const auto& [cls, n] : stats.per_class) row(display(cls), n);
  out << "predicates\n";
  for (const auto& [p, n] : stats.per_predicate) row(display(p), n);
  return out.str();
}

void Store::persist(const fs::path& dir) const {
  fs::create_directories(dir / "graphs");
  std::map<Id, std::vector<Quad>> by_graph;
  for (const Row& r : gspo_) by_graph[r[0]].push_back(decode(r));

  json graphs = json::array();
  std::set<fs::path> written;
  for (const auto& [key, rec] : manifest_) {
    GraphName g;
    if (!key.empty()) g = Iri(key);
    const auto& qs = by_graph[graph_id(g)];
    write_file_atomic(dir / rec.file, serialize_nquads(qs));
    written.insert(fs::path(rec.file).lexically_normal());

    json entry = json::object();
    entry["graph"] = key.empty() ? json(nullptr) : json(key);
    entry["file"] = rec.file;
    entry["quad_count"] = rec.quad_count;
    entry["sources"] = rec.sources;
    entry["load_timestamps"] = rec.load_timestamps;
    graphs.push_back(std::move(entry));
  }
  for (const auto& entry : fs::directory_iterator(dir / "graphs")) {
    fs::path rel = fs::path("graphs") / entry.path().filename();
    if (entry.path().extension() == ".nq" && !written.contains(rel)) fs::remove(entry.path());
  }
  if (fs::exists(dir / "default.nq") && !written.contains("default.nq")) {
    fs::remove(dir / "default.nq");
  }
  json manifest = json::object();
  manifest["format"] = 1;
  manifest["graphs"] = std::move(graphs);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

Store Store::load(const fs::path& dir) {
  Store store;
  fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    bool has_data = fs::exists(dir / "default.nq");
    if (fs::is_directory(dir / "graphs")) {
      for (const auto& e : fs::directory_iterator(dir / "graphs")) {
        has_data = has_data || e.path().extension() == ".nq";
      }
    }
    if (has_data) throw Error("store " + dir.string() + " has graph files but no manifest");
    return store;
  }

  json manifest = json::parse(read_file(manifest_path), nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object() || !manifest.contains("graphs") ||
      !manifest["graphs"].is_array()) {
    throw Error("corrupt manifest " + manifest_path.string());
  }
  for (const json& entry : manifest["graphs"]) {
    try {
      GraphName g;
      if (!entry.at("graph").is_null()) g = Iri(entry.at("graph").get<std::string>());
      GraphRecord rec;
      rec.file = entry.at("file").get<std::string>();
      rec.quad_count = entry.at("quad_count").get<std::size_t>();
      rec.sources = entry.at("sources").get<std::set<std::string>>();
      rec.load_timestamps = entry.at("load_timestamps").get<std::vector<std::string>>();
      if (fs::path(rec.file).is_absolute() || rec.file.find("..") != std::string::npos) {
        throw Error("graph file escapes the store directory");
      }

      std::vector<Quad> qs = parse_nquads(read_file(dir / rec.file));
      for (const Quad& q : qs) {
        if (q.graph() != g) throw Error(rec.file + " holds a quad of another graph");
      }
      store.load_quads(qs);
      if (store.graph_size(g) != rec.quad_count) {
        throw Error(rec.file + " holds " + std::to_string(store.graph_size(g)) +
                    " quads, manifest says " + std::to_string(rec.quad_count));
      }
      store.manifest_[graph_key_of(g)] = std::move(rec);
    } catch (const json::exception& e) {
      throw Error("corrupt manifest " + manifest_path.string() + ": " + e.what());
    }
  }
  return store;
}

}  // namespace kgforge
