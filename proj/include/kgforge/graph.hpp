#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <set>

#include "kgforge/term.hpp"

namespace kgforge {

// A set of triples. Iteration is in canonical (subject, predicate, object)
// order.
class Graph {
 public:
  using const_iterator = std::set<Triple, std::less<>>::const_iterator;

  Graph() = default;
  Graph(std::initializer_list<Triple> triples) : triples_(triples) {}

  // Returns true if the triple was not already present.
  bool insert(Triple triple) { return triples_.insert(std::move(triple)).second; }
  void merge(const Graph& other) {
    triples_.insert(other.triples_.begin(), other.triples_.end());
  }
  bool contains(const Triple& triple) const { return triples_.contains(triple); }
  bool erase(const Triple& triple) { return triples_.erase(triple) > 0; }

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  const_iterator begin() const noexcept { return triples_.begin(); }
  const_iterator end() const noexcept { return triples_.end(); }

  // Calls `fn(triple)` for every triple matching the bound positions; a null
  // pointer is a wildcard. A bound subject narrows the scan to that
  // subject's range of the ordered set.
  template <class Fn>
  void for_each_match(const Term* subject, const Iri* predicate,
                      const Term* object, Fn&& fn) const {
    auto matches = [&](const Triple& t) {
      return (predicate == nullptr || t.predicate() == *predicate) &&
             (object == nullptr || t.object() == *object);
    };
    if (subject == nullptr) {
      for (const auto& t : triples_) {
        if (matches(t)) fn(t);
      }
      return;
    }
    for (auto it = lower_bound_subject(*subject);
         it != triples_.end() && it->subject() == *subject; ++it) {
      if (matches(*it)) fn(*it);
    }
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  const_iterator lower_bound_subject(const Term& subject) const;

  std::set<Triple, std::less<>> triples_;
};

}  // namespace kgforge
