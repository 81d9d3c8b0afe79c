#include "kgforge/validator.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "kgforge/bgp.hpp"
#include "kgforge/error.hpp"
#include "kgforge/io.hpp"
#include "kgforge/ntriples.hpp"
#include "kgforge/vocab.hpp"

namespace kgforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view severity_name(Severity s) {
  return s == Severity::Warning ? "warning" : "violation";
}

std::size_t ValidationReport::violations() const noexcept {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
    return f.severity == Severity::Violation;
  }));
}

std::size_t ValidationReport::warnings() const noexcept {
  return findings.size() - violations();
}

namespace {

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

// Text after the first word, with a trailing comment removed.
std::string rest_of_line(std::string_view line, std::string_view keyword) {
  std::size_t at = line.find(keyword);
  std::string_view rest = line.substr(at + keyword.size());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i] == '#' && (i == 0 || rest[i - 1] == ' ' || rest[i - 1] == '\t')) {
      rest = rest.substr(0, i);
      break;
    }
  }
  return std::string(rest);
}

class ShapeParser {
 public:
  explicit ShapeParser(std::string_view name) : name_(name) {}

  ShapeSet parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no_;
      handle(line);
      pos = eol + 1;
    }
    if (shape_ || pattern_) fail("missing 'end'");
    return std::move(set_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(std::string(name_) + ": " + message, line_no_);
  }

  Iri iri(const std::string& word) const {
    if (word.size() > 2 && word.front() == '<' && word.back() == '>') {
      std::string value = word.substr(1, word.size() - 2);
      if (!Iri::is_valid(value)) fail("invalid IRI " + word);
      return Iri(value);
    }
    std::size_t colon = word.find(':');
    if (colon == std::string::npos) fail("expected IRI, found '" + word + "'");
    auto it = prefixes_.find(word.substr(0, colon));
    if (it == prefixes_.end()) fail("unknown prefix '" + word.substr(0, colon + 1) + "'");
    std::string value = it->second + word.substr(colon + 1);
    if (!Iri::is_valid(value)) fail("invalid IRI <" + value + ">");
    return Iri(value);
  }

  std::size_t count(const std::string& word) const {
    std::size_t v = 0;
    auto res = std::from_chars(word.data(), word.data() + word.size(), v);
    if (res.ec != std::errc() || res.ptr != word.data() + word.size()) {
      fail("expected a count, found '" + word + "'");
    }
    return v;
  }

  Severity severity(const std::string& word) const {
    if (word == "violation") return Severity::Violation;
    if (word == "warning") return Severity::Warning;
    fail("unknown severity '" + word + "'");
  }

  TriplePattern triple_pattern(const std::string& text) const {
    Query q;
    try {
      q = parse_query("SELECT * WHERE { " + text + " }", prefixes_);
    } catch (const ParseError& e) {
      fail(e.message());
    }
    if (q.where.size() != 1 || !q.binds.empty()) fail("expected exactly one triple pattern");
    return q.where.front();
  }

  void handle(std::string_view line) {
    std::vector<std::string> words = split_words(line);
    if (words.empty()) return;
    const std::string& kw = words[0];

    if (kw == "prefix") {
      if (shape_ || pattern_) fail("'prefix' inside a block");
      if (words.size() != 3 || words[1].empty() || words[1].back() != ':') {
        fail("expected: prefix name: <iri>");
      }
      prefixes_[words[1].substr(0, words[1].size() - 1)] = iri(words[2]).str();
    } else if (kw == "shape" || kw == "pattern") {
      if (shape_ || pattern_) fail("nested '" + kw + "'");
      if (words.size() != 2) fail("expected: " + kw + " Name");
      if (!names_.insert(words[1]).second) fail("duplicate name '" + words[1] + "'");
      if (kw == "shape") {
        shape_ = Shape{words[1], Iri(std::string(rdf::kType)), {}};
        has_target_ = false;
      } else {
        pattern_ = PatternRule{};
        pattern_->name = words[1];
      }
    } else if (kw == "end") {
      finish_block();
    } else if (shape_) {
      shape_line(words);
    } else if (pattern_) {
      pattern_line(line, words);
    } else {
      fail("unexpected '" + kw + "' outside a block");
    }
  }

  void shape_line(const std::vector<std::string>& words) {
    const std::string& kw = words[0];
    if (kw == "target") {
      if (words.size() != 2 || has_target_) fail("expected a single: target <class>");
      shape_->target_class = iri(words[1]);
      has_target_ = true;
      return;
    }
    if (kw != "property") fail("unexpected '" + kw + "' in shape");
    if (words.size() < 2) fail("property needs a path");
    PropertyConstraint pc{iri(words[1]), 0, std::nullopt, ValueKind::Any, std::nullopt,
                          Severity::Violation};
    for (std::size_t i = 2; i < words.size(); i += 2) {
      if (i + 1 >= words.size()) fail("'" + words[i] + "' needs a value");
      const std::string& key = words[i];
      const std::string& value = words[i + 1];
      if (key == "min") {
        pc.min_count = count(value);
      } else if (key == "max") {
        pc.max_count = count(value);
      } else if (key == "kind") {
        if (value == "iri") {
          pc.kind = ValueKind::Iri;
        } else if (value == "literal") {
          pc.kind = ValueKind::Literal;
        } else if (value == "any") {
          pc.kind = ValueKind::Any;
        } else {
          fail("unknown kind '" + value + "'");
        }
      } else if (key == "class") {
        pc.value_class = iri(value);
      } else if (key == "severity") {
        pc.severity = severity(value);
      } else {
        fail("unknown property option '" + key + "'");
      }
    }
    if (pc.max_count && *pc.max_count < pc.min_count) fail("max is below min");
    shape_->properties.push_back(std::move(pc));
  }

  void pattern_line(std::string_view line, const std::vector<std::string>& words) {
    const std::string& kw = words[0];
    if (kw == "when") {
      if (!pattern_->consequent.empty()) fail("'when' after 'then'");
      pattern_->antecedent.push_back(triple_pattern(rest_of_line(line, "when")));
    } else if (kw == "then") {
      pattern_->consequent.push_back(triple_pattern(rest_of_line(line, "then")));
    } else if (kw == "focus") {
      if (words.size() != 2 || words[1].size() < 2 || words[1][0] != '?') {
        fail("expected: focus ?var");
      }
      pattern_->focus = words[1].substr(1);
    } else if (kw == "severity") {
      if (words.size() != 2) fail("expected: severity violation|warning");
      pattern_->severity = severity(words[1]);
    } else {
      fail("unexpected '" + kw + "' in pattern");
    }
  }

  void finish_block() {
    if (shape_) {
      if (!has_target_) fail("shape '" + shape_->name + "' has no target");
      set_.shapes.push_back(std::move(*shape_));
      shape_.reset();
    } else if (pattern_) {
      if (pattern_->antecedent.empty() || pattern_->consequent.empty()) {
        fail("pattern '" + pattern_->name + "' needs 'when' and 'then' lines");
      }
      auto vars = pattern_variables(pattern_->antecedent);
      if (vars.empty()) fail("pattern '" + pattern_->name + "' has no antecedent variable");
      if (pattern_->focus.empty()) {
        pattern_->focus = vars.front();
      } else if (std::find(vars.begin(), vars.end(), pattern_->focus) == vars.end()) {
        fail("focus ?" + pattern_->focus + " is not an antecedent variable");
      }
      set_.patterns.push_back(std::move(*pattern_));
      pattern_.reset();
    } else {
      fail("'end' without a block");
    }
  }

  std::string_view name_;
  std::size_t line_no_ = 0;
  PrefixMap prefixes_;
  std::set<std::string> names_;
  std::optional<Shape> shape_;
  bool has_target_ = false;
  std::optional<PatternRule> pattern_;
  ShapeSet set_;
};

void sort_findings(std::vector<Finding>& findings) {
  std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.rule, a.focus, a.message) < std::tie(b.rule, b.focus, b.message);
  });
  findings.erase(std::unique(findings.begin(), findings.end()), findings.end());
}

std::string display(const Iri& iri) {
  std::string_view s = vocab::short_name_of(iri.str());
  return s.empty() ? to_ntriples(iri) : std::string(s);
}

std::string pattern_text(const TriplePattern& p) {
  auto one = [](const PatternTerm& pt) -> std::string {
    if (const auto* v = std::get_if<Variable>(&pt)) return "?" + v->name;
    const Term& t = std::get<Term>(pt);
    if (t.is_iri()) return display(t.iri());
    return to_ntriples(t);
  };
  return one(p.subject) + " " + one(p.predicate) + " " + one(p.object);
}

}  // namespace

ShapeSet parse_shapes(std::string_view text, std::string_view name) {
  return ShapeParser(name).parse(text);
}

ShapeSet load_shapes_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("shapes directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".shapes") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  ShapeSet all;
  std::set<std::string> names;
  for (const fs::path& f : files) {
    ShapeSet one = parse_shapes(read_file(f), f.filename().string());
    for (Shape& s : one.shapes) {
      if (!names.insert(s.name).second) throw Error("duplicate shape name '" + s.name + "'");
      all.shapes.push_back(std::move(s));
    }
    for (PatternRule& p : one.patterns) {
      if (!names.insert(p.name).second) throw Error("duplicate pattern name '" + p.name + "'");
      all.patterns.push_back(std::move(p));
    }
  }
  return all;
}

std::vector<Iri> shape_iris(const ShapeSet& set) {
  std::vector<Iri> out;
  for (const Shape& s : set.shapes) {
    out.push_back(s.target_class);
    for (const PropertyConstraint& pc : s.properties) {
      out.push_back(pc.path);
      if (pc.value_class) out.push_back(*pc.value_class);
    }
  }
  auto add = [&](const std::vector<TriplePattern>& ps) {
    for (const TriplePattern& p : ps) {
      for (const PatternTerm* pt : {&p.subject, &p.predicate, &p.object}) {
        if (const auto* t = std::get_if<Term>(pt); t != nullptr && t->is_iri()) {
          out.push_back(t->iri());
        }
      }
    }
  };
  for (const PatternRule& r : set.patterns) {
    add(r.antecedent);
    add(r.consequent);
  }
  return out;
}

ValidationReport validate_shapes(const Graph& g, const std::vector<Shape>& shapes) {
  ValidationReport report;
  const Iri type(std::string(rdf::kType));
  for (const Shape& shape : shapes) {
    std::set<Term> focus_nodes;
    Term target(shape.target_class);
    g.for_each_match(nullptr, &type, &target,
                     [&](const Triple& t) { focus_nodes.insert(t.subject()); });
    for (const Term& focus : focus_nodes) {
      for (const PropertyConstraint& pc : shape.properties) {
        std::size_t n = 0;
        auto add = [&](std::string message) {
          report.findings.push_back(
              Finding{shape.name, to_ntriples(focus), std::move(message), pc.severity});
        };
        g.for_each_match(&focus, &pc.path, nullptr, [&](const Triple& t) {
          ++n;
          const Term& v = t.object();
          if (pc.kind == ValueKind::Iri && v.is_literal()) {
            add(display(pc.path) + " value " + to_ntriples(v) + " is not an IRI");
          } else if (pc.kind == ValueKind::Literal && !v.is_literal()) {
            add(display(pc.path) + " value " + to_ntriples(v) + " is not a literal");
          }
          if (pc.value_class) {
            bool typed = false;
            Term cls(*pc.value_class);
            if (!v.is_literal()) {
              g.for_each_match(&v, &type, &cls, [&](const Triple&) { typed = true; });
            }
            if (!typed) {
              add(display(pc.path) + " value " + to_ntriples(v) + " is not a " +
                  display(*pc.value_class));
            }
          }
        });
        if (n < pc.min_count) {
          add(display(pc.path) + " has " + std::to_string(n) + " values, at least " +
              std::to_string(pc.min_count) + " required");
        }
        if (pc.max_count && n > *pc.max_count) {
          add(display(pc.path) + " has " + std::to_string(n) + " values, at most " +
              std::to_string(*pc.max_count) + " allowed");
        }
      }
    }
  }
  sort_findings(report.findings);
  return report;
}

ValidationReport validate_patterns(const Graph& g, const std::vector<PatternRule>& rules) {
  ValidationReport report;
  for (const PatternRule& rule : rules) {
    std::string expected;
    for (const TriplePattern& p : rule.consequent) {
      if (!expected.empty()) expected += " . ";
      expected += pattern_text(p);
    }
    for (const BindingSet& solution : eval_bgp(g, rule.antecedent)) {
      if (!eval_bgp(g, rule.consequent, solution).empty()) continue;
      std::string context;
      for (const auto& [name, value] : solution) {
        if (name.starts_with(kBlankVariablePrefix)) continue;
        if (!context.empty()) context += ", ";
        context += "?" + name + "=" + to_ntriples(value);
      }
      report.findings.push_back(Finding{rule.name, to_ntriples(solution.at(rule.focus)),
                                        "missing " + expected + " for " + context,
                                        rule.severity});
    }
  }
  sort_findings(report.findings);
  return report;
}

ValidationReport validate(const Graph& g, const ShapeSet& set) {
  ValidationReport a = validate_shapes(g, set.shapes);
  ValidationReport b = validate_patterns(g, set.patterns);
  a.findings.insert(a.findings.end(), b.findings.begin(), b.findings.end());
  sort_findings(a.findings);
  return a;
}

json report_to_json(const ValidationReport& report) {
  json findings = json::array();
  for (const Finding& f : report.findings) {
    findings.push_back({{"rule", f.rule},
                        {"focus", f.focus},
                        {"message", f.message},
                        {"severity", std::string(severity_name(f.severity))}});
  }
  return {{"conforms", report.conforms()},
          {"violations", report.violations()},
          {"warnings", report.warnings()},
          {"findings", std::move(findings)}};
}

std::string report_table(const ValidationReport& report) {
  std::ostringstream out;
  out << "violations: " << report.violations() << ", warnings: " << report.warnings() << "\n";
  for (const Finding& f : report.findings) {
    out << severity_name(f.severity) << "\t" << f.rule << "\t" << f.focus << "\t" << f.message
        << "\n";
  }
  return out.str();
}

}  // namespace kgforge
