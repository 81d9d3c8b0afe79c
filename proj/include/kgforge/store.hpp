#pragma once

// Indexed quad store partitioned into named graphs, persisted as one
// canonical N-Quads file per graph plus a manifest.
//
// Quads are dictionary-encoded and kept in three permutations:
// (graph, s, p, o), (p, o, s, graph) and (o, s, p, graph). Deletion is
// deliberately absent.
//
// Thread safety: const member functions may run concurrently; a writer
// needs exclusive access.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/graph.hpp"
#include "kgforge/term.hpp"

namespace kgforge {

struct GraphRecord {
  std::string file;  // relative to the store directory
  std::size_t quad_count = 0;
  std::set<std::string> sources;
  std::vector<std::string> load_timestamps;

  friend bool operator==(const GraphRecord&, const GraphRecord&) = default;
};

struct StoreStats {
  std::size_t total_triples = 0;
  std::map<std::string, std::size_t> per_class;      // distinct typed subjects
  std::map<std::string, std::size_t> per_predicate;  // triples
  std::size_t graph_count = 0;                       // named graphs
  std::size_t entity_count = 0;                      // distinct typed subjects

  friend bool operator==(const StoreStats&, const StoreStats&) = default;
};

nlohmann::json stats_to_json(const StoreStats& stats);
std::string stats_table(const StoreStats& stats);

// Additional information for a load.
struct LoadContext {
  std::string timestamp;
  // Source record ids per graph; recorded in the manifest.
  std::map<GraphName, std::set<std::string>> sources;
};

// Key used for a graph in the manifest: the IRI, or "" for the default graph.
std::string graph_key_of(const GraphName& g);

class Store {
 public:
  using Id = std::uint32_t;
  using Row = std::array<Id, 4>;

  Store();

  // Set-union insert; returns the number of quads that were new. A graph's
  // load timestamp is recorded only if it received new quads.
  std::size_t load_quads(std::span<const Quad> quads, const LoadContext& ctx = {});

  std::size_t size() const noexcept { return gspo_.size(); }
  bool empty() const noexcept { return gspo_.empty(); }
  bool contains(const Quad& q) const;

  // Every quad matching the bound positions (null = wildcard). `graph`
  // null means any graph; pointing at nullopt selects the default graph.
  template <class Fn>
  void for_each_quad(const Term* s, const Iri* p, const Term* o, const GraphName* g,
                     Fn&& fn) const {
    scan(s, p, o, g, [&](const Row& gspo) { fn(decode(gspo)); });
  }

  std::vector<Quad> match(const Term* s, const Iri* p, const Term* o,
                          const GraphName* g) const;

  // All quads in canonical order.
  std::vector<Quad> quads() const;
  std::vector<GraphName> graph_names() const;
  std::size_t graph_size(const GraphName& g) const;
  Graph graph(const GraphName& g) const;

  const std::map<std::string, GraphRecord>& manifest() const noexcept { return manifest_; }

  StoreStats stats() const;

  // Writes graph files and manifest.json under `dir`; stale graph files are
  // removed. Throws IoError.
  void persist(const std::filesystem::path& dir) const;
  // An absent or empty directory gives an empty store. Throws IoError or
  // kgforge::Error on a corrupt manifest.
  static Store load(const std::filesystem::path& dir);

  friend bool operator==(const Store& a, const Store& b) {
    return a.quads() == b.quads() && a.manifest_ == b.manifest_;
  }

  // Triple-source view over one graph, or over the union of all graphs
  // when `graph` is null. The view must not outlive the store.
  class View {
   public:
    View(const Store& store, const GraphName* graph) : store_(store) {
      if (graph != nullptr) graph_ = *graph, scoped_ = true;
    }
    template <class Fn>
    void for_each_match(const Term* s, const Iri* p, const Term* o, Fn&& fn) const {
      store_.scan(s, p, o, scoped_ ? &graph_ : nullptr,
                  [&](const Row& r) { fn(store_.decode_triple(r)); });
    }

   private:
    const Store& store_;
    GraphName graph_;
    bool scoped_ = false;
  };

  View view() const { return View(*this, nullptr); }
  View view(const GraphName& g) const { return View(*this, &g); }

 private:
  static constexpr Id kNoId = 0xFFFFFFFFu;

  Id intern(const Term& t);
  Id lookup(const Term& t) const;
  Id graph_id(const GraphName& g) const;
  Quad decode(const Row& gspo) const;
  Triple decode_triple(const Row& gspo) const;

  // Calls fn(row in gspo order) for matches.
  template <class Fn>
  void scan(const Term* s, const Iri* p, const Term* o, const GraphName* g, Fn&& fn) const;

  std::vector<Term> terms_;
  std::unordered_map<Term, Id> ids_;
  std::set<Row> gspo_;
  std::set<Row> posg_;
  std::set<Row> ospg_;
  std::map<Id, std::size_t> graph_sizes_;
  std::map<std::string, GraphRecord> manifest_;
};

namespace detail {

// Visits rows of `index` whose first `n` components equal `key`'s.
template <class Fn>
void prefix_scan(const std::set<Store::Row>& index, const Store::Row& key, std::size_t n,
                 Fn&& fn) {
  Store::Row lo{0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) lo[i] = key[i];
  for (auto it = index.lower_bound(lo); it != index.end(); ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((*it)[i] != key[i]) return;
    }
    fn(*it);
  }
}

}  // namespace detail

template <class Fn>
void Store::scan(const Term* s, const Iri* p, const Term* o, const GraphName* g,
                 Fn&& fn) const {
  Id si = 0, pi = 0, oi = 0, gi = 0;
  if (s != nullptr && (si = lookup(*s)) == kNoId) return;
  if (p != nullptr && (pi = lookup(Term(*p))) == kNoId) return;
  if (o != nullptr && (oi = lookup(*o)) == kNoId) return;
  if (g != nullptr && (gi = graph_id(*g)) == kNoId) return;

  auto accept = [&](Id rg, Id rs, Id rp, Id ro) {
    return (s == nullptr || rs == si) && (p == nullptr || rp == pi) &&
           (o == nullptr || ro == oi) && (g == nullptr || rg == gi);
  };

  if (s != nullptr && g != nullptr) {
    std::size_t n = p != nullptr ? (o != nullptr ? 4 : 3) : 2;
    detail::prefix_scan(gspo_, {gi, si, pi, oi}, n, [&](const Row& r) {
      if (accept(r[0], r[1], r[2], r[3])) fn(r);
    });
  } else if (o != nullptr) {
    std::size_t n = s != nullptr ? (p != nullptr ? 3 : 2) : 1;
    detail::prefix_scan(ospg_, {oi, si, pi, gi}, n, [&](const Row& r) {
      if (accept(r[3], r[1], r[2], r[0])) fn(Row{r[3], r[1], r[2], r[0]});
    });
  } else if (s != nullptr) {
    for (const auto& [graph, count] : graph_sizes_) {
      std::size_t n = p != nullptr ? 3 : 2;
      detail::prefix_scan(gspo_, {graph, si, pi, 0}, n, [&](const Row& r) {
        if (accept(r[0], r[1], r[2], r[3])) fn(r);
      });
    }
  } else if (p != nullptr) {
    detail::prefix_scan(posg_, {pi, 0, 0, 0}, 1, [&](const Row& r) {
      if (accept(r[3], r[2], r[0], r[1])) fn(Row{r[3], r[2], r[0], r[1]});
    });
  } else if (g != nullptr) {
    detail::prefix_scan(gspo_, {gi, 0, 0, 0}, 1, fn);
  } else {
    for (const Row& r : gspo_) fn(r);
  }
}

}  // namespace kgforge
