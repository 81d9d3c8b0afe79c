#pragma once

// Ontology identifiers used by the shipped rules, shapes and statistics.
//
// The relations printed as bfo:has_participant, bfo:realizes and
// bfo:bearer_of are mapped to their OBO relation IRIs BFO_0000057,
// BFO_0000055 and BFO_0000053; the short names resolve through the same
// table as the numeric ones.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/graph.hpp"
#include "kgforge/term.hpp"

namespace kgforge::vocab {

inline constexpr std::string_view kSchemaNs = "http://schema.org/";
inline constexpr std::string_view kNfdicoreNs =
    "https://nfdi.fiz-karlsruhe.de/ontology/";
inline constexpr std::string_view kOboNs = "http://purl.obolibrary.org/obo/";

enum class Kind { Class, Property };

struct Entry {
  std::string_view short_name;  // e.g. "nfdicore:NFDI_0000009"
  std::string_view label;
  Kind kind;
};

// Every entry of the table, in table order.
std::span<const Entry> entries();

// Expanded IRI of a short name ("nfdicore:NFDI_0000009",
// "bfo:has_participant", ...). Throws kgforge::Error for unknown names.
Iri resolve(std::string_view short_name);

// Short name of a known IRI, or empty if the IRI is not in the table.
std::string_view short_name_of(std::string_view iri);

// IRIs under the schema/nfdicore/obo namespaces that the table does not
// know. Used to fail fast when a rule or shape references a typo'd term.
std::vector<std::string> unknown_terms(const std::vector<Iri>& iris);

// Class IRIs of the table, in table order.
std::vector<Iri> classes();

// Builds the table as Turtle-subset triples (rdf:type owl:Class /
// owl:ObjectProperty and rdfs:label) for comparison with the shipped file.
Graph as_graph();

// Named constants.
namespace nfdicore {
inline const Iri& Dataset() { static const Iri v("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0000009"); return v; }
inline const Iri& Person() { static const Iri v("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0000004"); return v; }
inline const Iri& Organization() { static const Iri v("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0000003"); return v; }
inline const Iri& PublishingProcess() { static const Iri v("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0000014"); return v; }
inline const Iri& UrlNode() { static const Iri v("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0000223"); return v; }
inline const Iri& hasCreator() { static const Iri v("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0001027"); return v; }
inline const Iri& hasPublisher() { static const Iri v("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0000191"); return v; }
inline const Iri& identifier() { static const Iri v("https://nfdi.fiz-karlsruhe.de/ontology/NFDI_0001006"); return v; }
}  // namespace nfdicore

namespace obo {
inline const Iri& Process() { static const Iri v("http://purl.obolibrary.org/obo/BFO_0000015"); return v; }
inline const Iri& ChemicalSubstance() { static const Iri v("http://purl.obolibrary.org/obo/CHEBI_59999"); return v; }
inline const Iri& MolecularEntity() { static const Iri v("http://purl.obolibrary.org/obo/CHEBI_23367"); return v; }
inline const Iri& MeasurementDatum() { static const Iri v("http://purl.obolibrary.org/obo/IAO_0000109"); return v; }
inline const Iri& MeasurementUnit() { static const Iri v("http://purl.obolibrary.org/obo/IAO_0000003"); return v; }
inline const Iri& denotedBy() { static const Iri v("http://purl.obolibrary.org/obo/IAO_0000235"); return v; }
inline const Iri& hasParticipant() { static const Iri v("http://purl.obolibrary.org/obo/BFO_0000057"); return v; }
inline const Iri& realizes() { static const Iri v("http://purl.obolibrary.org/obo/BFO_0000055"); return v; }
inline const Iri& bearerOf() { static const Iri v("http://purl.obolibrary.org/obo/BFO_0000053"); return v; }
inline const Iri& occupiesTemporalRegion() { static const Iri v("http://purl.obolibrary.org/obo/BFO_0000199"); return v; }
inline const Iri& hasMeasurementUnitLabel() { static const Iri v("http://purl.obolibrary.org/obo/IAO_0000039"); return v; }
}  // namespace obo

inline const Iri& rdf_type() { static const Iri v{std::string(rdf::kType)}; return v; }

}  // namespace kgforge::vocab
