#include "semfun/vocabulary.hpp"

#include <algorithm>
#include <fstream>

namespace semfun {

Vocabulary Vocabulary::from_counts(std::vector<std::pair<std::string, std::int64_t>> counts) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  v.words_.reserve(counts.size());
  v.counts_.reserve(counts.size());
  for (auto& [word, count] : counts) {
    if (count < 0) throw DataError("negative count for predicate: " + word);
    if (word.empty()) throw DataError("empty predicate string");
    v.index_.emplace(word, static_cast<PredicateId>(v.words_.size()));
    v.words_.push_back(std::move(word));
    v.counts_.push_back(count);
    v.total_ += count;
  }
  if (!v.words_.empty() && v.total_ == 0) {
    throw DataError("vocabulary counts sum to zero; frequencies would be undefined");
  }
  return v;
}

Vector Vocabulary::frequencies() const {
  Vector f(size());
  for (int c = 0; c < size(); ++c) f[c] = frequency(c);
  return f;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open vocabulary file for writing: " + path.string());
  for (int c = 0; c < size(); ++c) {
    out << words_[c] << '\t' << counts_[c] << '\n';
  }
  if (!out) throw DataError("failed writing vocabulary file: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path.string());
  Vocabulary v;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("vocabulary line " + std::to_string(line_no) + ": expected predicate<TAB>count");
    }
    std::string word = line.substr(0, tab);
    std::int64_t count = 0;
    try {
      count = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError("vocabulary line " + std::to_string(line_no) + ": bad count");
    }
    if (word.empty() || count < 0 || v.index_.count(word)) {
      throw DataError("vocabulary line " + std::to_string(line_no) + ": invalid entry");
    }
    v.index_.emplace(word, static_cast<PredicateId>(v.words_.size()));
    v.words_.push_back(std::move(word));
    v.counts_.push_back(count);
    v.total_ += count;
  }
  if (!v.words_.empty() && v.total_ == 0) {
    throw DataError("vocabulary counts sum to zero in " + path.string());
  }
  return v;
}

}  // namespace semfun
