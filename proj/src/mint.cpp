#include "kgforge/mint.hpp"

#include <cstdio>

#include "kgforge/digest.hpp"
#include "kgforge/engine.hpp"
#include "kgforge/error.hpp"
#include "detail/utf8.hpp"

namespace kgforge {

std::string Uuid::str() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) out += '-';
    out += kHex[bytes[i] >> 4];
    out += kHex[bytes[i] & 0xF];
  }
  return out;
}

Uuid Uuid::parse(std::string_view text) {
  Uuid u;
  std::size_t n = 0;
  bool ok = text.size() == 36;
  for (std::size_t i = 0; ok && i < text.size(); ++i) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      ok = text[i] == '-';
      continue;
    }
    int hi = detail::hex_value(text[i]);
    int lo = i + 1 < text.size() ? detail::hex_value(text[i + 1]) : -1;
    if (hi < 0 || lo < 0) {
      ok = false;
      break;
    }
    u.bytes[n++] = static_cast<std::uint8_t>(hi * 16 + lo);
    ++i;
  }
  if (!ok || n != 16) throw Error("invalid UUID '" + std::string(text) + "'");
  return u;
}

Uuid uuid_v5(const Uuid& name_space, std::string_view name) {
  std::string data(name_space.bytes.begin(), name_space.bytes.end());
  data.append(name);
  auto digest = sha1(data);
  Uuid u;
  std::copy_n(digest.begin(), 16, u.bytes.begin());
  u.bytes[6] = static_cast<std::uint8_t>((u.bytes[6] & 0x0F) | 0x50);
  u.bytes[8] = static_cast<std::uint8_t>((u.bytes[8] & 0x3F) | 0x80);
  return u;
}

const Uuid& url_namespace() {
  static const Uuid ns = Uuid::parse("6ba7b811-9dad-11d1-80b4-00c04fd430c8");
  return ns;
}

void MintConfig::check() const {
  if (base.empty() || base.back() != '/' || !Iri::is_valid(base)) {
    throw Error("mint base must be an absolute IRI ending in '/': '" + base + "'");
  }
}

std::string_view strategy_name(MintStrategy s) {
  return s == MintStrategy::Uuid ? "uuid" : "literal-encoded";
}

MintStrategy parse_strategy(std::string_view name) {
  if (name == "literal-encoded") return MintStrategy::LiteralEncoded;
  if (name == "uuid") return MintStrategy::Uuid;
  throw Error("unknown mint strategy '" + std::string(name) + "'");
}

std::string_view granularity_name(GraphGranularity g) {
  return g == GraphGranularity::Day ? "day" : "month";
}

GraphGranularity parse_granularity(std::string_view name) {
  if (name == "month") return GraphGranularity::Month;
  if (name == "day") return GraphGranularity::Day;
  throw Error("unknown graph granularity '" + std::string(name) + "'");
}

Iri mint_node_iri(const MintConfig& cfg, std::string_view lexical) {
  if (lexical.empty()) throw Error("cannot mint a node IRI from an empty lexical");
  if (cfg.strategy == MintStrategy::Uuid) {
    return Iri(cfg.node_base() + uuid_v5(cfg.uuid_namespace, lexical).str());
  }
  return Iri(cfg.node_base() + encode_for_uri(lexical));
}

namespace {

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

}  // namespace

Iri mint_resource_iri(const MintConfig& cfg, int year, int month,
                      std::string_view source_id, std::string_view suffix) {
  if (month < 1 || month > 12) {
    throw Error("invalid month " + std::to_string(month));
  }
  if (year < 1 || year > 9999) throw Error("invalid year " + std::to_string(year));
  if (source_id.empty()) throw Error("empty source id");
  std::string iri = cfg.base + "resources/" + std::to_string(year) + "/" +
                    two_digits(month) + "/" + std::string(source_id);
  if (!suffix.empty()) iri += "/" + encode_for_uri(suffix);
  if (!Iri::is_valid(iri)) {
    throw Error("source id '" + std::string(source_id) + "' is not usable in an IRI");
  }
  return Iri(std::move(iri));
}

Iri mint_graph_iri(const MintConfig& cfg, const Date& date) {
  if (!date.valid()) throw Error("invalid date " + date.str());
  std::string iri = cfg.base + "graphs/" + std::to_string(date.year) + "/" + two_digits(date.month);
  if (cfg.granularity == GraphGranularity::Day) iri += "/" + two_digits(date.day);
  return Iri(std::move(iri));
}

std::string graph_key(const MintConfig& cfg, const Date& date) {
  std::string s = date.str();
  return cfg.granularity == GraphGranularity::Day ? s : s.substr(0, 7);
}

std::optional<std::string> percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    if (i + 2 >= s.size()) return std::nullopt;
    int hi = detail::hex_value(s[i + 1]);
    int lo = detail::hex_value(s[i + 2]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

Term remint_node(const MintConfig& cfg, const Term& term) {
  if (cfg.strategy != MintStrategy::Uuid || !term.is_iri()) return term;
  const std::string& value = term.iri().str();
  std::string prefix = cfg.node_base();
  if (!value.starts_with(prefix)) return term;
  std::string_view segment = std::string_view(value).substr(prefix.size());
  if (segment.empty() || segment.find('/') != std::string_view::npos) return term;
  auto lexical = percent_decode(segment);
  if (!lexical || lexical->empty()) return term;
  return mint_node_iri(cfg, *lexical);
}

}  // namespace kgforge
