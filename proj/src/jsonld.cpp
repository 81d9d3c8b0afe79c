#include "kgforge/jsonld.hpp"

#include <cctype>
#include <charconv>

#include "kgforge/digest.hpp"
#include "kgforge/error.hpp"

namespace kgforge {

using nlohmann::json;

namespace {

bool is_schema_org_context_url(std::string_view url) {
  return url == "https://schema.org" || url == "https://schema.org/" ||
         url == "http://schema.org" || url == "http://schema.org/";
}

bool ends_with_delimiter(std::string_view iri) {
  return !iri.empty() && (iri.back() == '/' || iri.back() == '#');
}

}  // namespace

const JsonLdContext& JsonLdContext::schema_org() {
  static const JsonLdContext ctx = [] {
    JsonLdContext c;
    c.vocab_ = "http://schema.org/";
    c.prefixes_["schema"] = "http://schema.org/";
    c.prefixes_["xsd"] = "http://www.w3.org/2001/XMLSchema#";
    return c;
  }();
  return ctx;
}

JsonLdContext JsonLdContext::parse(const json& context) {
  if (context.is_string()) {
    if (is_schema_org_context_url(context.get<std::string>())) return schema_org();
    throw Error("remote @context '" + context.get<std::string>() + "' is not supported");
  }
  if (context.is_array()) {
    JsonLdContext merged_ctx;
    for (const json& item : context) merged_ctx = merged_ctx.merged(parse(item));
    return merged_ctx;
  }
  if (!context.is_object()) throw Error("@context must be an object");

  JsonLdContext c;
  // Prefixes first so term definitions may use them regardless of key order.
  for (const auto& [key, value] : context.items()) {
    if (!key.empty() && key[0] == '@') continue;
    if (value.is_string() && key.find(':') == std::string::npos &&
        ends_with_delimiter(value.get<std::string>()) &&
        Iri::is_valid(value.get<std::string>())) {
      c.prefixes_[key] = value.get<std::string>();
    }
  }
  for (const auto& [key, value] : context.items()) {
    if (key == "@vocab") {
      if (!value.is_string() || !Iri::is_valid(value.get<std::string>())) {
        throw Error("@vocab must be an absolute IRI");
      }
      c.vocab_ = value.get<std::string>();
      continue;
    }
    if (!key.empty() && key[0] == '@') {
      throw Error("unsupported keyword " + key + " in @context");
    }
    if (c.prefixes_.contains(key)) continue;

    TermDefinition def;
    std::string target;
    if (value.is_string()) {
      target = value.get<std::string>();
    } else if (value.is_object()) {
      for (const auto& [k, v] : value.items()) {
        if (k == "@id" && v.is_string()) {
          target = v.get<std::string>();
        } else if (k == "@type" && v == "@id") {
          def.coerce_to_id = true;
        } else {
          throw Error("unsupported term definition for '" + key + "'");
        }
      }
    } else {
      throw Error("unsupported term definition for '" + key + "'");
    }
    if (auto expanded = c.expand_compact(target)) {
      def.iri = *expanded;
    } else if (Iri::is_valid(target)) {
      def.iri = target;
    } else if (c.vocab_ && target.find(':') == std::string::npos &&
               Iri::is_valid(*c.vocab_ + target)) {
      def.iri = *c.vocab_ + target;
    } else {
      throw Error("term '" + key + "' maps to a relative IRI '" + target + "'");
    }
    c.terms_[key] = std::move(def);
  }
  return c;
}

JsonLdContext JsonLdContext::merged(const JsonLdContext& overlay) const {
  JsonLdContext out = *this;
  for (const auto& [k, v] : overlay.terms_) out.terms_[k] = v;
  for (const auto& [k, v] : overlay.prefixes_) out.prefixes_[k] = v;
  if (overlay.vocab_) out.vocab_ = overlay.vocab_;
  return out;
}

const JsonLdContext::TermDefinition* JsonLdContext::find_term(std::string_view term) const {
  auto it = terms_.find(std::string(term));
  return it == terms_.end() ? nullptr : &it->second;
}

std::optional<std::string> JsonLdContext::expand_compact(std::string_view value) const {
  std::size_t colon = value.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  std::string_view suffix = value.substr(colon + 1);
  if (suffix.starts_with("//")) return std::nullopt;
  auto it = prefixes_.find(std::string(value.substr(0, colon)));
  if (it == prefixes_.end()) return std::nullopt;
  return it->second + std::string(suffix);
}

std::string JsonLdContext::expand_vocab(std::string_view term) const {
  if (const auto* def = find_term(term)) return def->iri;
  if (auto compact = expand_compact(term)) return *compact;
  if (term.find(':') != std::string_view::npos && Iri::is_valid(term)) {
    return std::string(term);
  }
  if (vocab_) {
    std::string iri = *vocab_ + std::string(term);
    if (Iri::is_valid(iri)) return iri;
  }
  throw Error("term '" + std::string(term) + "' has no mapping in the context");
}

std::string JsonLdContext::expand_id(std::string_view id) const {
  if (auto compact = expand_compact(id)) return *compact;
  if (Iri::is_valid(id)) return std::string(id);
  throw Error("@id '" + std::string(id) + "' is not an absolute IRI");
}

RawRecord parse_record_envelope(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error("record envelope is not a JSON object");
  }
  auto field = [&](const char* name) -> std::string {
    auto it = doc.find(name);
    if (it == doc.end() || !it->is_string() || it->get<std::string>().empty()) {
      throw Error(std::string("record envelope lacks string field '") + name + "'");
    }
    return it->get<std::string>();
  };
  RawRecord r;
  r.source_id = field("source_id");
  r.submission_date = Date::parse(field("submission_date"));
  if (auto it = doc.find("suffix"); it != doc.end() && it->is_string()) {
    r.suffix = it->get<std::string>();
  }
  auto payload = doc.find("payload");
  if (payload == doc.end() || !(payload->is_object() || payload->is_array())) {
    throw Error("record envelope lacks an object or array 'payload'");
  }
  r.payload = *payload;
  return r;
}

json record_envelope(const RawRecord& record) {
  json doc = json::object();
  doc["source_id"] = record.source_id;
  doc["submission_date"] = record.submission_date.str();
  if (!record.suffix.empty()) doc["suffix"] = record.suffix;
  doc["payload"] = record.payload;
  return doc;
}

namespace {

bool is_alnum_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string label_segment(std::string_view key) {
  if (is_alnum_key(key)) return std::string(key);
  return "k" + to_hex(fnv1a64(key), 8);
}

std::string decimal_lexical(double value) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (res.ec != std::errc()) throw Error("number out of range");
  std::string out(buf, res.ptr);
  if (out.find('.') == std::string::npos) out += ".0";
  return out;
}

class Converter {
 public:
  Converter(Graph& graph, JsonLdContext context)
      : graph_(graph), root_context_(std::move(context)) {}

  void convert_root(const json& payload) {
    if (payload.is_array()) {
      for (std::size_t i = 0; i < payload.size(); ++i) {
        if (!payload[i].is_object()) {
          throw Error("top-level array elements must be objects");
        }
        node(payload[i], root_context_, "b_" + std::to_string(i));
      }
    } else if (payload.is_object()) {
      if (!payload.empty()) node(payload, root_context_, "b");
    } else {
      throw Error("payload must be a JSON object or array of objects");
    }
  }

 private:
  static void reject_keyword(const std::string& key) {
    throw Error("unsupported keyword " + key);
  }

  // Returns the subject term of the node object.
  Term node(const json& obj, const JsonLdContext& outer, const std::string& path) {
    JsonLdContext ctx = outer;
    if (auto it = obj.find("@context"); it != obj.end()) {
      ctx = outer.merged(JsonLdContext::parse(*it));
    }
    for (const auto& [key, value] : obj.items()) {
      if (!key.empty() && key[0] == '@' && key != "@context" && key != "@id" &&
          key != "@type") {
        reject_keyword(key);
      }
    }

    std::optional<Term> subject;
    if (auto it = obj.find("@id"); it != obj.end()) {
      if (!it->is_string()) throw Error("@id must be a string");
      subject = id_term(it->get<std::string>(), ctx);
    } else {
      subject = Term(BlankNode(path));
    }

    if (auto it = obj.find("@type"); it != obj.end()) {
      auto add_type = [&](const json& t) {
        if (!t.is_string()) throw Error("@type values must be strings");
        graph_.insert(Triple(*subject, Iri(std::string(rdf::kType)),
                             Iri(ctx.expand_vocab(t.get<std::string>()))));
      };
      if (it->is_array()) {
        for (const json& t : *it) add_type(t);
      } else {
        add_type(*it);
      }
    }

    for (const auto& [key, value] : obj.items()) {
      if (!key.empty() && key[0] == '@') continue;
      Iri predicate(ctx.expand_vocab(key));
      const auto* def = ctx.find_term(key);
      bool coerce = def != nullptr && def->coerce_to_id;
      std::string base = path + "_" + label_segment(key);
      if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          emit(*subject, predicate, value[i], ctx, coerce, base + "_" + std::to_string(i));
        }
      } else {
        emit(*subject, predicate, value, ctx, coerce, base + "_0");
      }
    }
    return *subject;
  }

  Term id_term(const std::string& id, const JsonLdContext& ctx) {
    if (id.starts_with("_:")) return BlankNode(id.substr(2));
    return Iri(ctx.expand_id(id));
  }

  void emit(const Term& subject, const Iri& predicate, const json& value,
            const JsonLdContext& ctx, bool coerce, const std::string& path) {
    switch (value.type()) {
      case json::value_t::null:
        return;
      case json::value_t::string:
        if (coerce) {
          graph_.insert(Triple(subject, predicate, id_term(value.get<std::string>(), ctx)));
        } else {
          graph_.insert(Triple(subject, predicate, Literal(value.get<std::string>())));
        }
        return;
      case json::value_t::boolean:
        graph_.insert(Triple(subject, predicate,
                             Literal(value.get<bool>() ? "true" : "false",
                                     Iri(std::string(xsd::kBoolean)))));
        return;
      case json::value_t::number_integer:
      case json::value_t::number_unsigned:
        graph_.insert(Triple(subject, predicate,
                             Literal(value.dump(), Iri(std::string(xsd::kInteger)))));
        return;
      case json::value_t::number_float:
        graph_.insert(Triple(subject, predicate,
                             Literal(decimal_lexical(value.get<double>()),
                                     Iri(std::string(xsd::kDecimal)))));
        return;
      case json::value_t::array:
        for (std::size_t i = 0; i < value.size(); ++i) {
          emit(subject, predicate, value[i], ctx, coerce, path + "_" + std::to_string(i));
        }
        return;
      case json::value_t::object:
        if (value.contains("@value")) {
          graph_.insert(Triple(subject, predicate, value_object(value, ctx)));
        } else {
          graph_.insert(Triple(subject, predicate, node(value, ctx, path)));
        }
        return;
      default:
        throw Error("unsupported JSON value");
    }
  }

  Literal value_object(const json& value, const JsonLdContext& ctx) {
    std::optional<std::string> language;
    std::optional<std::string> datatype;
    for (const auto& [key, v] : value.items()) {
      if (key == "@value") continue;
      if (key == "@language" && v.is_string()) {
        language = v.get<std::string>();
      } else if (key == "@type" && v.is_string()) {
        datatype = ctx.expand_vocab(v.get<std::string>());
      } else if (!key.empty() && key[0] == '@') {
        reject_keyword(key);
      } else {
        throw Error("value object has unexpected key '" + key + "'");
      }
    }
    const json& raw = value["@value"];
    std::string lexical;
    std::string implied = std::string(xsd::kString);
    if (raw.is_string()) {
      lexical = raw.get<std::string>();
    } else if (raw.is_boolean()) {
      lexical = raw.get<bool>() ? "true" : "false";
      implied = std::string(xsd::kBoolean);
    } else if (raw.is_number_integer()) {
      lexical = raw.dump();
      implied = std::string(xsd::kInteger);
    } else if (raw.is_number_float()) {
      lexical = decimal_lexical(raw.get<double>());
      implied = std::string(xsd::kDecimal);
    } else {
      throw Error("@value must be a scalar");
    }
    if (language) {
      if (datatype) throw Error("value object has both @language and @type");
      return Literal::lang(std::move(lexical), *language);
    }
    return Literal(std::move(lexical), Iri(datatype ? *datatype : implied));
  }

  Graph& graph_;
  JsonLdContext root_context_;
};

}  // namespace

Graph to_rdf(const json& payload, const JsonLdContext& context) {
  Graph g;
  Converter(g, context).convert_root(payload);
  return g;
}

Graph to_rdf(const RawRecord& record, const JsonLdContext& context) {
  return to_rdf(record.payload, context);
}

Graph relabel_blank_nodes(const Graph& graph, std::string_view record_scope) {
  std::string prefix = "r" + to_hex(fnv1a64(record_scope)) + "_";
  auto relabel = [&](const Term& t) -> Term {
    if (!t.is_blank()) return t;
    return BlankNode(prefix + t.blank().label());
  };
  Graph out;
  for (const Triple& t : graph) {
    out.insert(Triple(relabel(t.subject()), t.predicate(), relabel(t.object())));
  }
  return out;
}

}  // namespace kgforge
