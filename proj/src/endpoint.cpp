#include "kgforge/endpoint.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <httplib.h>

#include "kgforge/engine.hpp"
#include "kgforge/error.hpp"
#include "kgforge/ntriples.hpp"

namespace kgforge {

using nlohmann::json;

const PrefixMap& default_query_prefixes() {
  static const PrefixMap prefixes = {
      {"schema", "http://schema.org/"},
      {"nfdicore", "https://nfdi.fiz-karlsruhe.de/ontology/"},
      {"obo", "http://purl.obolibrary.org/obo/"},
      {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
      {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
      {"owl", "http://www.w3.org/2002/07/owl#"},
      {"xsd", "http://www.w3.org/2001/XMLSchema#"},
  };
  return prefixes;
}

namespace {

std::vector<BindingSet> solutions(const Store& store, const Query& q, const GraphName* graph) {
  std::vector<BindingSet> out;
  if (q.graph) {
    GraphName g = *q.graph;
    out = eval_bgp(store.view(g), q.where);
  } else if (graph != nullptr) {
    out = eval_bgp(store.view(*graph), q.where);
  } else {
    out = eval_bgp(store.view(), q.where);
  }
  apply_binds(out, q.binds);

  if (!q.order_by.empty()) {
    std::stable_sort(out.begin(), out.end(), [&](const BindingSet& a, const BindingSet& b) {
      for (const OrderKey& k : q.order_by) {
        auto ia = a.find(k.variable);
        auto ib = b.find(k.variable);
        bool has_a = ia != a.end(), has_b = ib != b.end();
        std::strong_ordering c = std::strong_ordering::equal;
        if (has_a != has_b) {
          c = has_a ? std::strong_ordering::greater : std::strong_ordering::less;
        } else if (has_a) {
          c = compare_terms(ia->second, ib->second);
        }
        if (c != 0) return k.descending ? c > 0 : c < 0;
      }
      return false;
    });
  }
  return out;
}

void slice(std::vector<BindingSet>& rows, const Query& q) {
  std::size_t offset = std::min(q.offset.value_or(0), rows.size());
  rows.erase(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(offset));
  if (q.limit && *q.limit < rows.size()) rows.resize(*q.limit);
}

}  // namespace

SelectResults execute_select(const Store& store, const Query& q, const GraphName* graph) {
  if (q.form != QueryForm::Select) throw Error("not a SELECT query");
  SelectResults r;
  std::vector<BindingSet> all = solutions(store, q, graph);

  if (q.count) {
    r.variables = {q.count->alias};
    std::size_t n = 0;
    if (!q.count->counted) {
      if (q.count->distinct) {
        std::set<BindingSet> distinct(all.begin(), all.end());
        n = distinct.size();
      } else {
        n = all.size();
      }
    } else {
      std::set<Term> values;
      for (const BindingSet& s : all) {
        auto it = s.find(*q.count->counted);
        if (it == s.end()) continue;
        ++n;
        values.insert(it->second);
      }
      if (q.count->distinct) n = values.size();
    }
    BindingSet row;
    row.emplace(q.count->alias, Literal(std::to_string(n), Iri(std::string(xsd::kInteger))));
    r.rows.push_back(std::move(row));
    slice(r.rows, q);
    return r;
  }

  if (q.select_all) {
    for (const std::string& v : pattern_variables(q.where)) {
      if (!v.starts_with(kBlankVariablePrefix)) r.variables.push_back(v);
    }
    for (const BindClause& b : q.binds) r.variables.push_back(b.variable);
  } else {
    r.variables = q.projection;
  }

  std::set<BindingSet> seen;
  for (BindingSet& s : all) {
    BindingSet row;
    for (const std::string& v : r.variables) {
      auto it = s.find(v);
      if (it != s.end()) row.emplace(v, std::move(it->second));
    }
    if (q.distinct && !seen.insert(row).second) continue;
    r.rows.push_back(std::move(row));
  }
  slice(r.rows, q);
  return r;
}

Graph execute_construct(const Store& store, const Query& q, const GraphName* graph) {
  if (q.form != QueryForm::Construct) throw Error("not a CONSTRUCT query");
  std::vector<BindingSet> all = solutions(store, q, graph);
  slice(all, q);
  return instantiate(q.construct_template, all);
}

bool execute_ask(const Store& store, const Query& q, const GraphName* graph) {
  if (q.form != QueryForm::Ask) throw Error("not an ASK query");
  return !solutions(store, q, graph).empty();
}

namespace {

json term_json(const Term& t) {
  if (t.is_iri()) return {{"type", "uri"}, {"value", t.iri().str()}};
  if (t.is_blank()) return {{"type", "bnode"}, {"value", t.blank().label()}};
  const Literal& l = t.literal();
  json j = {{"type", "literal"}, {"value", l.lexical()}};
  if (!l.language().empty()) {
    j["xml:lang"] = l.language();
  } else if (!l.is_plain_string()) {
    j["datatype"] = l.datatype().str();
  }
  return j;
}

std::string tsv_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\t') {
      out += "\\t";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

json select_results_json(const SelectResults& r) {
  json bindings = json::array();
  for (const BindingSet& row : r.rows) {
    json b = json::object();
    for (const auto& [name, value] : row) b[name] = term_json(value);
    bindings.push_back(std::move(b));
  }
  return {{"head", {{"vars", r.variables}}}, {"results", {{"bindings", std::move(bindings)}}}};
}

json ask_json(bool value) { return {{"head", json::object()}, {"boolean", value}}; }

std::string select_results_tsv(const SelectResults& r) {
  std::string out;
  for (std::size_t i = 0; i < r.variables.size(); ++i) {
    if (i) out += '\t';
    out += "?" + r.variables[i];
  }
  out += '\n';
  for (const BindingSet& row : r.rows) {
    for (std::size_t i = 0; i < r.variables.size(); ++i) {
      if (i) out += '\t';
      auto it = row.find(r.variables[i]);
      if (it != row.end()) out += tsv_escape(to_ntriples(it->second));
    }
    out += '\n';
  }
  return out;
}

// Endpoint

Endpoint::Endpoint(std::shared_ptr<const Store> snapshot, PrefixMap prefixes)
    : prefixes_(std::move(prefixes)), snapshot_(std::move(snapshot)) {
  if (!snapshot_) snapshot_ = std::make_shared<const Store>();
}

void Endpoint::begin_swap() { swapping_ = true; }

void Endpoint::swap(std::shared_ptr<const Store> next) {
  {
    std::lock_guard lock(mu_);
    snapshot_ = next ? std::move(next) : std::make_shared<const Store>();
  }
  swapping_ = false;
}

std::shared_ptr<const Store> Endpoint::snapshot() const {
  std::lock_guard lock(mu_);
  return snapshot_;
}

namespace {

EndpointResponse text(int status, std::string body) {
  return {status, "text/plain; charset=utf-8", std::move(body) + "\n"};
}

const std::string* param(const EndpointRequest& req, const std::string& name) {
  auto it = req.params.find(name);
  return it == req.params.end() ? nullptr : &it->second;
}

}  // namespace

EndpointResponse Endpoint::handle(const EndpointRequest& req) const {
  if (swapping_) return text(503, "store snapshot is being replaced; retry shortly");
  std::shared_ptr<const Store> store = snapshot();

  if (req.path == "/sparql") {
    if (req.method != "GET" && req.method != "POST") return text(405, "method not allowed");
    return sparql(*store, req);
  }
  if (req.path == "/stats") {
    if (req.method != "GET") return text(405, "method not allowed");
    return stats(*store);
  }
  static const std::regex export_path(R"(^/export/([0-9]{4})/([0-9]{2})$)");
  std::smatch m;
  if (std::regex_match(req.path, m, export_path)) {
    if (req.method != "GET") return text(405, "method not allowed");
    return export_graph(*store, m[1].str(), m[2].str());
  }
  return text(404, "not found: " + req.path);
}

EndpointResponse Endpoint::sparql(const Store& store, const EndpointRequest& req) const {
  std::string query_text;
  if (const std::string* q = param(req, "query")) {
    query_text = *q;
  } else if (req.method == "POST" && req.content_type.starts_with("application/sparql-query")) {
    query_text = req.body;
  } else {
    return text(400, "missing 'query' parameter");
  }

  Query q;
  try {
    q = parse_query(query_text, prefixes_);
  } catch (const Error& e) {
    return text(400, std::string("query parse error: ") + e.what());
  }

  GraphName graph;
  const GraphName* scope = nullptr;
  if (const std::string* g = param(req, "default-graph-uri")) {
    if (!Iri::is_valid(*g)) return text(400, "default-graph-uri is not an absolute IRI");
    graph = Iri(*g);
    scope = &graph;
  }

  try {
    bool tsv = req.accept.find("text/tab-separated-values") != std::string::npos;
    switch (q.form) {
      case QueryForm::Select: {
        SelectResults r = execute_select(store, q, scope);
        if (tsv) return {200, "text/tab-separated-values; charset=utf-8", select_results_tsv(r)};
        return {200, "application/sparql-results+json", select_results_json(r).dump() + "\n"};
      }
      case QueryForm::Ask:
        return {200, "application/sparql-results+json",
                ask_json(execute_ask(store, q, scope)).dump() + "\n"};
      case QueryForm::Construct:
        return {200, "application/n-triples",
                serialize_ntriples(execute_construct(store, q, scope))};
    }
  } catch (const Error& e) {
    return text(400, std::string("query evaluation error: ") + e.what());
  }
  return text(500, "unreachable");
}

EndpointResponse Endpoint::stats(const Store& store) const {
  return {200, "application/json", stats_to_json(store.stats()).dump(2) + "\n"};
}

EndpointResponse Endpoint::export_graph(const Store& store, const std::string& year,
                                        const std::string& month) const {
  std::string file = "graphs/" + year + "-" + month + ".nq";
  for (const auto& [key, rec] : store.manifest()) {
    if (rec.file != file || key.empty()) continue;
    GraphName g = Iri(key);
    std::vector<Quad> quads = store.match(nullptr, nullptr, nullptr, &g);
    return {200, "application/n-quads", serialize_nquads(quads)};
  }
  return text(404, "no graph for " + year + "/" + month);
}

// Server

Server::Server(const Endpoint& endpoint)
    : endpoint_(endpoint), server_(std::make_unique<httplib::Server>()) {
  auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
    EndpointRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.params.emplace(k, v);
    r.body = req.body;
    r.content_type = req.get_header_value("Content-Type");
    r.accept = req.get_header_value("Accept");
    EndpointResponse out = endpoint_.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server_->Get(R"(/.*)", adapt);
  server_->Post(R"(/.*)", adapt);
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Server::start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Server::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace kgforge
