#include "kgforge/vocab.hpp"

#include <array>

#include "kgforge/error.hpp"

namespace kgforge::vocab {

namespace {

using K = Kind;

constexpr std::array kEntries = {
    // NFDICore
    Entry{"nfdicore:NFDI_0000009", "dataset", K::Class},
    Entry{"nfdicore:NFDI_0000004", "person", K::Class},
    Entry{"nfdicore:NFDI_0000003", "organization", K::Class},
    Entry{"nfdicore:NFDI_0000014", "publishing process", K::Class},
    Entry{"nfdicore:NFDI_0000223", "URL node", K::Class},
    Entry{"nfdicore:NFDI_0001027", "has creator", K::Property},
    Entry{"nfdicore:NFDI_0000191", "has publisher", K::Property},
    Entry{"nfdicore:NFDI_0001006", "identifier", K::Property},
    Entry{"nfdicore:NFDI_0000142", "license", K::Property},
    Entry{"nfdicore:NFDI_0000216", "measurement technique", K::Property},
    Entry{"nfdicore:NFDI_0001023", "is output of study", K::Property},
    Entry{"nfdicore:NFDI_0000207", "has standard", K::Property},
    // IAO
    Entry{"obo:IAO_0000109", "measurement datum", K::Class},
    Entry{"obo:IAO_0000003", "measurement unit label", K::Class},
    Entry{"obo:IAO_0000235", "denoted by", K::Property},
    Entry{"obo:IAO_0000004", "has measurement value", K::Property},
    Entry{"obo:IAO_0000039", "has measurement unit label", K::Property},
    Entry{"obo:IAO_0000221", "is quality measurement of", K::Property},
    // BFO
    Entry{"obo:BFO_0000015", "process", K::Class},
    Entry{"obo:BFO_0000019", "quality", K::Class},
    Entry{"obo:BFO_0000023", "role", K::Class},
    Entry{"obo:BFO_0000038", "one-dimensional temporal region", K::Class},
    Entry{"obo:BFO_0000178", "has continuant part", K::Property},
    Entry{"obo:BFO_0000117", "has occurrent part", K::Property},
    Entry{"obo:BFO_0000199", "occupies temporal region", K::Property},
    Entry{"obo:BFO_0000057", "has participant", K::Property},
    Entry{"obo:BFO_0000055", "realizes", K::Property},
    Entry{"obo:BFO_0000053", "bearer of", K::Property},
    // ChEBI
    Entry{"obo:CHEBI_59999", "chemical substance", K::Class},
    Entry{"obo:CHEBI_23367", "molecular entity", K::Class},
    // schema.org source terms
    Entry{"schema:Dataset", "Dataset", K::Class},
    Entry{"schema:Person", "Person", K::Class},
    Entry{"schema:Organization", "Organization", K::Class},
    Entry{"schema:Study", "Study", K::Class},
    Entry{"schema:ChemicalSubstance", "ChemicalSubstance", K::Class},
    Entry{"schema:MolecularEntity", "MolecularEntity", K::Class},
    Entry{"schema:creator", "creator", K::Property},
    Entry{"schema:publisher", "publisher", K::Property},
    Entry{"schema:description", "description", K::Property},
    Entry{"schema:identifier", "identifier", K::Property},
    Entry{"schema:license", "license", K::Property},
    Entry{"schema:measurementTechnique", "measurementTechnique", K::Property},
    Entry{"schema:name", "name", K::Property},
    Entry{"schema:url", "url", K::Property},
    Entry{"schema:includedInDataCatalog", "includedInDataCatalog", K::Property},
    Entry{"schema:isPartOf", "isPartOf", K::Property},
    Entry{"schema:datePublished", "datePublished", K::Property},
    Entry{"schema:schemaVersion", "schemaVersion", K::Property},
    Entry{"schema:about", "about", K::Property},
    Entry{"schema:hasBioChemEntityPart", "hasBioChemEntityPart", K::Property},
    Entry{"schema:inChIKey", "inChIKey", K::Property},
    Entry{"schema:molecularFormula", "molecularFormula", K::Property},
    Entry{"schema:molecularWeight", "molecularWeight", K::Property},
    Entry{"schema:image", "image", K::Property},
};

struct Alias {
  std::string_view alias;
  std::string_view target;
};

constexpr std::array kAliases = {
    Alias{"bfo:has_participant", "obo:BFO_0000057"},
    Alias{"bfo:realizes", "obo:BFO_0000055"},
    Alias{"bfo:bearer_of", "obo:BFO_0000053"},
};

std::string expand(std::string_view short_name) {
  std::size_t colon = short_name.find(':');
  std::string_view prefix = short_name.substr(0, colon);
  std::string_view local = short_name.substr(colon + 1);
  std::string_view ns = prefix == "schema"     ? kSchemaNs
                        : prefix == "nfdicore" ? kNfdicoreNs
                                               : kOboNs;
  return std::string(ns) + std::string(local);
}

bool in_table_namespace(std::string_view iri) {
  return iri.starts_with(kSchemaNs) || iri.starts_with(kNfdicoreNs) ||
         iri.starts_with(kOboNs);
}

}  // namespace

std::span<const Entry> entries() { return kEntries; }

Iri resolve(std::string_view short_name) {
  for (const Alias& a : kAliases) {
    if (a.alias == short_name) return resolve(a.target);
  }
  for (const Entry& e : kEntries) {
    if (e.short_name == short_name) return Iri(expand(e.short_name));
  }
  throw Error("unknown vocabulary term '" + std::string(short_name) + "'");
}

std::string_view short_name_of(std::string_view iri) {
  for (const Entry& e : kEntries) {
    if (expand(e.short_name) == iri) return e.short_name;
  }
  return {};
}

std::vector<std::string> unknown_terms(const std::vector<Iri>& iris) {
  std::vector<std::string> unknown;
  for (const Iri& iri : iris) {
    if (in_table_namespace(iri.str()) && short_name_of(iri.str()).empty()) {
      unknown.push_back(iri.str());
    }
  }
  return unknown;
}

std::vector<Iri> classes() {
  std::vector<Iri> out;
  for (const Entry& e : kEntries) {
    if (e.kind == Kind::Class) out.emplace_back(expand(e.short_name));
  }
  return out;
}

Graph as_graph() {
  static const Iri owl_class("http://www.w3.org/2002/07/owl#Class");
  static const Iri owl_property("http://www.w3.org/2002/07/owl#ObjectProperty");
  static const Iri rdfs_label("http://www.w3.org/2000/01/rdf-schema#label");
  Graph g;
  for (const Entry& e : kEntries) {
    Iri subject(expand(e.short_name));
    g.insert(Triple(subject, rdf_type(),
                    e.kind == Kind::Class ? owl_class : owl_property));
    g.insert(Triple(subject, rdfs_label, Literal(std::string(e.label))));
  }
  return g;
}

}  // namespace kgforge::vocab
