#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "semfun/model.hpp"

namespace semfun {

/// Word pairs with human gold similarity scores.
struct PairDataset {
  struct Pair {
    std::string word1;
    std::string word2;
    double gold = 0.0;
  };
  std::vector<Pair> pairs;
  std::string name;
};

/// Reads `word1<TAB>word2<TAB>gold` lines; duplicate unordered pairs error.
PairDataset load_pairs(const std::filesystem::path& path);

/// Converts the common SimLex-999 distribution layout (header line;
/// word1 word2 POS score ... columns) to the canonical pair TSV.
/// `pos_filter` keeps only rows with that POS tag when non-empty.
void convert_simlex(const std::filesystem::path& input, const std::filesystem::path& output,
                    const std::string& pos_filter = "");

/// Spearman rank correlation with fractional (average) ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Cosine over predicate parameter vectors; the bias joins the weight vector
/// as an extra coordinate unless include_bias is false.
double predicate_cosine(PredicateId c1, PredicateId c2, const Model& model,
                        bool include_bias = true);

struct EvalReport {
  std::string dataset;
  double spearman_rho = 0.0;
  int covered_pairs = 0;
  int skipped_pairs = 0;
  struct PairScore {
    std::string word1;
    std::string word2;
    double gold = 0.0;
    double score = 0.0;
    bool covered = false;
  };
  std::vector<PairScore> scores;

  std::string summary() const;
  std::string to_json() const;
};

/// Scores every pair with predicate_cosine, skipping pairs with an
/// out-of-vocabulary word, and correlates against gold.
EvalReport evaluate(const Model& model, const PairDataset& dataset, bool include_bias = true);

}  // namespace semfun
