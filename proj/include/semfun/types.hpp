#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "semfun/common.hpp"

namespace semfun {

/// Dense index into the vocabulary.
using PredicateId = std::int32_t;
/// Dense index into a model's link-label table.
using LinkLabelId = std::int32_t;

inline constexpr PredicateId kNoPredicate = -1;

/// Dimensionality and fixed cardinality of the binary entity space.
struct SpaceConfig {
  int n_dims = 0;
  int cardinality = 0;

  void validate() const {
    if (n_dims <= 0 || cardinality <= 0 || cardinality >= n_dims) {
      throw std::invalid_argument("space config requires 0 < cardinality < n_dims");
    }
  }
};

/// Sparse binary vector with a fixed number of active dimensions, kept as a
/// strictly increasing index list.
struct EntityVector {
  std::vector<int> active;

  int cardinality() const { return static_cast<int>(active.size()); }

  bool contains(int dim) const {
    return std::binary_search(active.begin(), active.end(), dim);
  }

  /// Applies a swap: dimension `off` leaves, `on` enters; order is kept.
  void swap_dims(int off, int on) {
    auto it = std::lower_bound(active.begin(), active.end(), off);
    active.erase(it);
    active.insert(std::lower_bound(active.begin(), active.end(), on), on);
  }

  Vector indicator(int n_dims) const {
    Vector x = Vector::Zero(n_dims);
    for (int d : active) x[d] = 1.0;
    return x;
  }

  /// Lexicographically first cardinality-c vector: {0, ..., c-1}.
  static EntityVector first(int c) {
    EntityVector x;
    x.active.resize(c);
    for (int i = 0; i < c; ++i) x.active[i] = i;
    return x;
  }

  /// Advances to the next cardinality-preserving combination in [0, n_dims).
  /// Returns false (and resets to first) after the last one.
  bool next_combination(int n_dims) {
    int c = cardinality();
    int i = c - 1;
    while (i >= 0 && active[i] == n_dims - c + i) --i;
    if (i < 0) {
      *this = first(c);
      return false;
    }
    ++active[i];
    for (int j = i + 1; j < c; ++j) active[j] = active[j - 1] + 1;
    return true;
  }

  bool operator==(const EntityVector& other) const = default;
};

/// Directed labelled link between two node slots of a graph or situation.
struct Link {
  int src = 0;
  LinkLabelId label = 0;
  int tgt = 0;

  bool operator==(const Link& other) const = default;
};

/// Abstract graph structure: node count plus labelled links, no predicates.
struct GraphShape {
  int n_nodes = 0;
  std::vector<Link> links;

  bool operator==(const GraphShape& other) const = default;
};

/// One training observation: a predicate per node plus the argument links.
struct GraphToken {
  std::vector<PredicateId> nodes;
  std::vector<Link> links;

  int n_nodes() const { return static_cast<int>(nodes.size()); }

  GraphShape shape() const {
    return GraphShape{n_nodes(), links};
  }
};

/// A state of affairs: one entity vector per node plus the links.
struct Situation {
  std::vector<EntityVector> entities;
  std::vector<Link> links;

  int n_nodes() const { return static_cast<int>(entities.size()); }
};

/// Registry of link-label names; ids are dense and stable per model.
class LabelTable {
 public:
  LabelTable() = default;

  /// Canonical two-label table used by SVO corpora.
  static LabelTable svo() {
    LabelTable t;
    t.add("ARG1");
    t.add("ARG2");
    return t;
  }

  LinkLabelId add(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    auto id = static_cast<LinkLabelId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  /// Returns the id for `name`, or -1 when absent.
  LinkLabelId find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? LinkLabelId{-1} : it->second;
  }

  LinkLabelId require(const std::string& name) const {
    LinkLabelId id = find(name);
    if (id < 0) throw DataError("unknown link label: " + name);
    return id;
  }

  const std::string& name(LinkLabelId id) const { return names_.at(id); }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const LabelTable& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, LinkLabelId> index_;
};

}  // namespace semfun
