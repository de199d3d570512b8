#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semfun/common.hpp"
#include "semfun/types.hpp"

namespace semfun {

/// Immutable predicate inventory with counts.  Ids are assigned by descending
/// count, ties broken lexicographically, so identical corpora always produce
/// identical vocabularies.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Builds from unordered (word, count) pairs; sorts into canonical id order.
  static Vocabulary from_counts(std::vector<std::pair<std::string, std::int64_t>> counts);

  int size() const { return static_cast<int>(words_.size()); }
  std::int64_t total_count() const { return total_; }

  /// Returns the id for `word`, or kNoPredicate when out of vocabulary.
  PredicateId find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? kNoPredicate : it->second;
  }

  PredicateId require(const std::string& word) const {
    PredicateId id = find(word);
    if (id < 0) throw DataError("out-of-vocabulary predicate: " + word);
    return id;
  }

  const std::string& word(PredicateId id) const { return words_.at(id); }
  std::int64_t count(PredicateId id) const { return counts_.at(id); }

  /// Relative frequency f_c = count_c / total_count.
  double frequency(PredicateId id) const {
    return static_cast<double>(counts_.at(id)) / static_cast<double>(total_);
  }

  /// All relative frequencies as a dense vector (sums to 1).
  Vector frequencies() const;

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, PredicateId> index_;
  std::int64_t total_ = 0;
};

}  // namespace semfun
