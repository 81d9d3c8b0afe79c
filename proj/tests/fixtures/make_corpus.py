#!/usr/bin/env python3
# Synthetic fixture corpus: 50 record envelopes shaped like repository
# harvests, plus the expected store contents computed directly from the
# record data (no SPARQL involved) and seeded-fault graphs for the
# validator.  All names, keys and values are made up.
#
#   python3 make_corpus.py [outdir]      (default: next to this script)

import json
import os
import random
import sys
from urllib.parse import quote

BASE = "https://ditrare.ise.fiz-karlsruhe.de/chemotion-kg/"
NODES = BASE + "nodes/"
SCHEMA = "http://schema.org/"
NFDI = "https://nfdi.fiz-karlsruhe.de/ontology/"
OBO = "http://purl.obolibrary.org/obo/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
XSD = "http://www.w3.org/2001/XMLSchema#"
REPO = "https://www.chemotion-repository.net"

TECHNIQUES = ["Raman", "IR", "MS", "1H NMR", "13C NMR"]
CREATORS = [
    ("https://orcid.org/0000-0001-5550-0001", "Ada Müller"),
    ("https://orcid.org/0000-0001-5550-0002", "Chen Wei"),
    ("https://orcid.org/0000-0001-5550-0003", "José Álvarez"),
    ("https://orcid.org/0000-0001-5550-0004", "Ingrid Østergaard"),
    ("https://orcid.org/0000-0001-5550-0005", "Sam Okafor"),
]
PUBLISHER = (REPO, "Chemotion Repository")
LICENSE = "https://creativecommons.org/licenses/by-sa/4.0/"
CATALOG = REPO + "/catalog"
STANDARD = "https://bioschemas.org/profiles/Study/0.3-DRAFT"
UNIT = NODES + quote("g/mol", safe="")

FORMULAS = ["C6H12O6", "C2H6O", "C8H10N4O2", "C9H8O4", "C7H8",
            "CH4O", "C3H6O", "C6H6", "C10H8", "C2H4O2"]


def fnv1a64(s):
    h = 0xcbf29ce484222325
    for b in s.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001b3) & 0xffffffffffffffff
    return h


def node(text):
    return NODES + quote(text, safe="")


def iri(s):
    return ("iri", s)


def lit(s, dt=XSD + "string"):
    return ("lit", s, dt)


def bnode(label):
    return ("bnode", label)


def term_nt(t):
    if t[0] == "iri":
        return "<" + t[1] + ">"
    if t[0] == "bnode":
        return "_:" + t[1]
    esc = t[1].replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r")
    if t[2] == XSD + "string":
        return '"' + esc + '"'
    return '"' + esc + '"^^<' + t[2] + ">"


def molecules():
    rng = random.Random(20140517)
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    keys = ["VRYFQVRFMNXTJS-UHFFFAOYSA-N"]
    while len(keys) < 10:
        k = ("".join(rng.choice(letters) for _ in range(14)) + "-" +
             "".join(rng.choice(letters) for _ in range(8)) + "SA-N")
        if k not in keys:
            keys.append(k)
    out = []
    for n, key in enumerate(keys):
        weight = round(rng.uniform(30, 400), 2)
        if weight == int(weight):
            weight += 0.01
        out.append({
            "key": key,
            "name": f"Compound {n + 1:02d}",
            "formula": FORMULAS[n],
            "weight": weight,
            "image": f"{REPO}/images/molecules/{key}.svg",
        })
    return out


def record_date(i):
    if i == 0:
        return 2014, 5, 17
    return 2014, 6 + (i - 1) // 7, 10 + (i - 1) % 7


def build_record(i, mols):
    mol = mols[i // 5]
    tech = TECHNIQUES[i % 5]
    creator = CREATORS[i % 5]
    y, m, d = record_date(i)
    date = f"{y:04d}-{m:02d}-{d:02d}"
    key = mol["key"]
    tech_seg = quote(tech, safe="")
    payload = {
        "@context": "https://schema.org/",
        "@type": "Dataset",
        "name": f"{tech} spectrum of {mol['name']}",
        "description": f"{tech} measurement of {mol['name']} ({mol['formula']}), dataset {i:03d}.",
        "identifier": f"10.14272/{key}/{tech}",
        "url": f"{REPO}/inchikey/{key}/{tech_seg}",
        "license": {"@id": LICENSE},
        "measurementTechnique": tech,
        "creator": {"@id": creator[0], "@type": "Person", "name": creator[1]},
        "publisher": {"@id": PUBLISHER[0], "@type": "Organization", "name": PUBLISHER[1]},
        "includedInDataCatalog": {"@id": CATALOG},
        "isPartOf": {
            "@id": f"{REPO}/study/{key}/{tech_seg}",
            "@type": "Study",
            "datePublished": date,
            "schemaVersion": {"@id": STANDARD},
            "about": {
                "@id": f"{REPO}/inchikey/{key}",
                "@type": "ChemicalSubstance",
                "name": mol["name"],
                "hasBioChemEntityPart": {
                    "@id": f"{REPO}/molecule/{key}",
                    "@type": "MolecularEntity",
                    "inChIKey": key,
                    "molecularFormula": mol["formula"],
                    "molecularWeight": mol["weight"],
                    "image": mol["image"],
                },
            },
        },
        "variableMeasured": {"@type": "PropertyValue", "name": tech},
    }
    envelope = {
        "source_id": f"10.14272/{key}",
        "submission_date": date,
        "suffix": tech,
        "payload": payload,
    }
    return envelope


def resource_iri(env):
    y, m, _ = (int(x) for x in env["submission_date"].split("-"))
    iri_ = f"{BASE}resources/{y:04d}/{m:02d}/{env['source_id']}"
    if env.get("suffix"):
        iri_ += "/" + quote(env["suffix"], safe="")
    return iri_


def graph_iri(env):
    y, m, _ = (int(x) for x in env["submission_date"].split("-"))
    return f"{BASE}graphs/{y:04d}/{m:02d}"


def source_triples(env):
    p = env["payload"]
    ds = iri(resource_iri(env))
    scope = env["source_id"] + "#" + env.get("suffix", "")
    pv = bnode("r" + format(fnv1a64(scope), "016x") + "_b_variableMeasured_0")
    S = lambda local: iri(SCHEMA + local)
    T = iri(RDF_TYPE)
    cr, pub, st = p["creator"], p["publisher"], p["isPartOf"]
    sub = st["about"]
    mol = sub["hasBioChemEntityPart"]
    return {
        "dataset": [
            (ds, T, S("Dataset")),
            (ds, S("name"), lit(p["name"])),
            (ds, S("description"), lit(p["description"])),
            (ds, S("identifier"), lit(p["identifier"])),
            (ds, S("url"), lit(p["url"])),
            (ds, S("license"), iri(LICENSE)),
            (ds, S("measurementTechnique"), lit(p["measurementTechnique"])),
            (ds, S("creator"), iri(cr["@id"])),
            (ds, S("publisher"), iri(pub["@id"])),
            (ds, S("includedInDataCatalog"), iri(CATALOG)),
            (ds, S("isPartOf"), iri(st["@id"])),
            (ds, S("variableMeasured"), pv),
            (pv, T, S("PropertyValue")),
            (pv, S("name"), lit(p["variableMeasured"]["name"])),
        ],
        "creator": [
            (iri(cr["@id"]), T, S("Person")),
            (iri(cr["@id"]), S("name"), lit(cr["name"])),
        ],
        "publisher": [
            (iri(pub["@id"]), T, S("Organization")),
            (iri(pub["@id"]), S("name"), lit(pub["name"])),
        ],
        "study": [
            (iri(st["@id"]), T, S("Study")),
            (iri(st["@id"]), S("datePublished"), lit(st["datePublished"])),
            (iri(st["@id"]), S("schemaVersion"), iri(STANDARD)),
            (iri(st["@id"]), S("about"), iri(sub["@id"])),
        ],
        "substance": [
            (iri(sub["@id"]), T, S("ChemicalSubstance")),
            (iri(sub["@id"]), S("name"), lit(sub["name"])),
            (iri(sub["@id"]), S("hasBioChemEntityPart"), iri(mol["@id"])),
            (iri(mol["@id"]), T, S("MolecularEntity")),
            (iri(mol["@id"]), S("inChIKey"), lit(mol["inChIKey"])),
            (iri(mol["@id"]), S("molecularFormula"), lit(mol["molecularFormula"])),
            (iri(mol["@id"]), S("molecularWeight"), lit(repr(mol["molecularWeight"]), XSD + "decimal")),
            (iri(mol["@id"]), S("image"), lit(mol["image"])),
        ],
    }


def rule_outputs(env):
    """Per-rule output triples, instantiated by hand from the templates."""
    p = env["payload"]
    ds = iri(resource_iri(env))
    T = iri(RDF_TYPE)
    N = lambda local: iri(NFDI + local)
    O = lambda local: iri(OBO + local)
    cr, pub, st = p["creator"]["@id"], p["publisher"]["@id"], p["isPartOf"]
    sub = st["about"]
    mol = sub["hasBioChemEntityPart"]
    out = {}
    out["creator"] = [
        (iri(cr), T, N("NFDI_0000004")),
        (iri(cr), O("IAO_0000235"), iri(node(p["creator"]["name"]))),
        (iri(cr), O("BFO_0000053"), iri(node("creator-role " + cr))),
        (iri(node("creator-role " + cr)), T, O("BFO_0000023")),
        (iri(node("creation " + ds[1])), T, O("BFO_0000015")),
        (iri(node("creation " + ds[1])), O("BFO_0000057"), iri(cr)),
        (iri(node("creation " + ds[1])), O("BFO_0000055"), iri(node("creator-role " + cr))),
    ]
    out["dataset"] = [
        (ds, T, N("NFDI_0000009")),
        (ds, N("NFDI_0001027"), iri(cr)),
        (ds, N("NFDI_0000191"), iri(pub)),
        (ds, O("IAO_0000235"), iri(node(p["description"]))),
        (ds, N("NFDI_0001006"), iri(node(p["identifier"]))),
        (ds, N("NFDI_0000142"), iri(LICENSE)),
        (ds, N("NFDI_0000216"), lit(p["measurementTechnique"])),
        (ds, O("IAO_0000235"), iri(node(p["name"]))),
        (ds, O("IAO_0000235"), iri(node(p["url"]))),
        (ds, N("NFDI_0001023"), iri(st["@id"])),
        (ds, O("BFO_0000178"), iri(CATALOG)),
    ]
    publishing = iri(node("publishing " + st["@id"]))
    period = iri(node("period " + st["datePublished"]))
    prole = iri(node("publisher-role " + pub))
    out["study"] = [
        (iri(st["@id"]), T, O("BFO_0000015")),
        (iri(st["@id"]), N("NFDI_0000207"), iri(STANDARD)),
        (iri(st["@id"]), O("BFO_0000117"), publishing),
        (publishing, T, N("NFDI_0000014")),
        (publishing, O("BFO_0000199"), period),
        (publishing, O("BFO_0000057"), iri(pub)),
        (publishing, O("BFO_0000055"), prole),
        (period, T, O("BFO_0000038")),
        (period, iri(SCHEMA + "datePublished"), lit(st["datePublished"])),
        (iri(pub), T, N("NFDI_0000003")),
        (iri(pub), O("BFO_0000053"), prole),
        (prole, T, O("BFO_0000023")),
    ]
    m = iri(mol["@id"])
    weight = iri(node("molecular-weight " + mol["@id"]))
    datum = iri(node("molecular-weight-datum " + mol["@id"]))
    image = iri(node(mol["image"]))
    out["substance"] = [
        (iri(st["@id"]), O("BFO_0000057"), iri(sub["@id"])),
        (iri(sub["@id"]), T, O("CHEBI_59999")),
        (iri(sub["@id"]), O("BFO_0000178"), m),
        (m, T, O("CHEBI_23367")),
        (m, N("NFDI_0001006"), iri(node(mol["inChIKey"]))),
        (m, O("IAO_0000235"), image),
        (m, O("BFO_0000053"), weight),
        (image, T, N("NFDI_0000223")),
        (weight, T, O("BFO_0000019")),
        (datum, T, O("IAO_0000109")),
        (datum, O("IAO_0000221"), weight),
        (datum, O("IAO_0000004"), lit(repr(mol["molecularWeight"]), XSD + "decimal")),
        (datum, O("IAO_0000039"), iri(UNIT)),
        (iri(UNIT), T, O("IAO_0000003")),
    ]
    return out


def write_triples(path, triples):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for t in sorted(set(triples), key=lambda t: tuple(term_nt(x) for x in t)):
            f.write(" ".join(term_nt(x) for x in t) + " .\n")


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
    corpus = os.path.join(outdir, "corpus")
    records_dir = os.path.join(corpus, "records")
    os.makedirs(records_dir, exist_ok=True)
    for f in os.listdir(records_dir):
        if f.endswith(".json"):
            os.remove(os.path.join(records_dir, f))

    mols = molecules()
    quads = set()
    source_count = 0
    rule_counts = {"creator": 0, "dataset": 0, "study": 0, "substance": 0}
    graph_sources = {}
    record0 = None
    for i in range(50):
        env = build_record(i, mols)
        with open(os.path.join(records_dir, f"record-{i:03d}.json"), "w", encoding="utf-8") as f:
            json.dump(env, f, ensure_ascii=False, indent=2)
            f.write("\n")
        g = graph_iri(env)
        src = {t for part in source_triples(env).values() for t in part}
        rules = rule_outputs(env)
        source_count += len(src)
        combined = set(src)
        for name, triples in rules.items():
            rule_counts[name] += len(set(triples))
            combined |= set(triples)
        for t in combined:
            quads.add(t + (g,))
        graph_sources.setdefault(g, []).append(env["source_id"] + "#" + env["suffix"])
        if i == 0:
            record0 = combined

    with open(os.path.join(corpus, "expected.nq"), "w", encoding="utf-8", newline="\n") as f:
        for q in sorted(quads, key=lambda q: tuple(term_nt(x) if isinstance(x, tuple) else x for x in q)):
            f.write(" ".join(term_nt(x) for x in q[:3]) + " <" + q[3] + "> .\n")

    per_graph = {}
    for q in quads:
        per_graph[q[3]] = per_graph.get(q[3], 0) + 1
    per_class = {}
    typed = set()
    seen = set()
    for q in quads:
        if q[1] == iri(RDF_TYPE) and q[2][0] == "iri":
            typed.add(q[0])
            if (q[0], q[2]) not in seen:
                seen.add((q[0], q[2]))
                per_class[q[2][1]] = per_class.get(q[2][1], 0) + 1
    expected = {
        "records": 50,
        "source_triples": source_count,
        "rule_triples": rule_counts,
        "transformed_triples": source_count + sum(rule_counts.values()),
        "staged_quads": len(quads),
        "graphs": {g: {"quads": n, "records": len(graph_sources[g])} for g, n in sorted(per_graph.items())},
        "per_class": dict(sorted(per_class.items())),
        "entity_count": len(typed),
    }
    with open(os.path.join(corpus, "expected.json"), "w", encoding="utf-8") as f:
        json.dump(expected, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")

    # Record 0 on its own, and with one triple of a design pattern removed.
    faults = os.path.join(outdir, "faults")
    os.makedirs(faults, exist_ok=True)
    write_triples(os.path.join(faults, "record0.nt"), record0)
    pub = PUBLISHER[0]
    drops = {
        "par.nt": (iri(pub), iri(OBO + "BFO_0000053"), iri(node("publisher-role " + pub))),
        "unit.nt": (iri(node("molecular-weight-datum " + REPO + "/molecule/" + mols[0]["key"])),
                    iri(OBO + "IAO_0000039"), iri(UNIT)),
        "temporal.nt": (iri(node("publishing " + REPO + "/study/" + mols[0]["key"] + "/Raman")),
                        iri(OBO + "BFO_0000199"), iri(node("period 2014-05-17"))),
    }
    for name, t in drops.items():
        assert t in record0, name
        write_triples(os.path.join(faults, name), record0 - {t})


if __name__ == "__main__":
    main()
