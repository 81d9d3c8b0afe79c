#pragma once

// Query service over an immutable store snapshot.
//
//   GET/POST /sparql        SELECT/ASK -> SPARQL-JSON (or TSV on request),
//                           CONSTRUCT -> N-Triples
//   GET /stats              StoreStats as JSON
//   GET /export/YYYY/MM     one named graph as N-Quads
//
// Without GRAPH or default-graph-uri a query sees the union of all graphs.

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/bgp.hpp"
#include "kgforge/graph.hpp"
#include "kgforge/sparql.hpp"
#include "kgforge/store.hpp"

namespace httplib {
class Server;
}

namespace kgforge {

// schema, nfdicore, obo, rdf, rdfs, owl, xsd
const PrefixMap& default_query_prefixes();

struct SelectResults {
  std::vector<std::string> variables;
  std::vector<BindingSet> rows;
};

// `graph` overrides the query's scope when the query has no GRAPH clause.
SelectResults execute_select(const Store& store, const Query& q,
                             const GraphName* graph = nullptr);
Graph execute_construct(const Store& store, const Query& q, const GraphName* graph = nullptr);
bool execute_ask(const Store& store, const Query& q, const GraphName* graph = nullptr);

nlohmann::json select_results_json(const SelectResults& r);
nlohmann::json ask_json(bool value);
std::string select_results_tsv(const SelectResults& r);

struct EndpointRequest {
  std::string method = "GET";
  std::string path;
  std::multimap<std::string, std::string> params;  // query string and form body
  std::string body;
  std::string content_type;
  std::string accept;
};

struct EndpointResponse {
  int status = 200;
  std::string content_type;
  std::string body;
};

class Endpoint {
 public:
  explicit Endpoint(std::shared_ptr<const Store> snapshot,
                    PrefixMap prefixes = default_query_prefixes());

  // Read-only; safe to call concurrently with itself and with swaps.
  EndpointResponse handle(const EndpointRequest& req) const;

  // Requests arriving between begin_swap() and swap() get 503.
  void begin_swap();
  void swap(std::shared_ptr<const Store> next);
  std::shared_ptr<const Store> snapshot() const;

 private:
  EndpointResponse sparql(const Store& store, const EndpointRequest& req) const;
  EndpointResponse stats(const Store& store) const;
  EndpointResponse export_graph(const Store& store, const std::string& year,
                                const std::string& month) const;

  PrefixMap prefixes_;
  mutable std::mutex mu_;
  std::shared_ptr<const Store> snapshot_;
  std::atomic<bool> swapping_{false};
};

// HTTP front end. The endpoint must outlive the server.
class Server {
 public:
  explicit Server(const Endpoint& endpoint);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds to host:port (port 0 picks a free port) and returns the bound
  // port. Throws kgforge::Error on failure.
  int bind(const std::string& host, int port);
  // Serves on a background thread.
  void start();
  // Stops accepting, lets running requests finish and joins.
  void stop();

 private:
  const Endpoint& endpoint_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace kgforge
