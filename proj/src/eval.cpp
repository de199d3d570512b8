#include "semfun/eval.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace semfun {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::pair<std::string, std::string> unordered_key(const std::string& a, const std::string& b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

/// Fractional ranks: ties share the average of the rank positions they span.
std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

PairDataset load_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pair dataset: " + path.string());
  PairDataset dataset;
  dataset.name = path.stem().string();
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw DataError("pair file line " + std::to_string(line_no) +
                      ": expected word1<TAB>word2<TAB>score");
    }
    double gold = 0.0;
    try {
      std::size_t consumed = 0;
      gold = std::stod(fields[2], &consumed);
      if (consumed != fields[2].size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw DataError("pair file line " + std::to_string(line_no) + ": bad score '" + fields[2] +
                      "'");
    }
    if (!std::isfinite(gold)) {
      throw DataError("pair file line " + std::to_string(line_no) + ": non-finite score");
    }
    if (!seen.insert(unordered_key(fields[0], fields[1])).second) {
      throw DataError("pair file line " + std::to_string(line_no) + ": duplicate pair " +
                      fields[0] + " / " + fields[1]);
    }
    dataset.pairs.push_back({fields[0], fields[1], gold});
  }
  return dataset;
}

void convert_simlex(const std::filesystem::path& input, const std::filesystem::path& output,
                    const std::string& pos_filter) {
  std::ifstream in(input);
  if (!in) throw DataError("cannot open file: " + input.string());
  std::ofstream out(output);
  if (!out) throw DataError("cannot open file for writing: " + output.string());
  std::string line;
  std::int64_t line_no = 0;
  std::int64_t written = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;  // header
    auto fields = split_tabs(line);
    if (fields.size() < 4) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected word1 word2 POS score columns");
    }
    if (!pos_filter.empty() && fields[2] != pos_filter) continue;
    out << fields[0] << '\t' << fields[1] << '\t' << fields[3] << '\n';
    ++written;
  }
  if (written == 0) throw DataError("no rows converted from " + input.string());
  if (!out) throw DataError("failed writing: " + output.string());
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("spearman: need at least 2 observations");
  auto rx = fractional_ranks(x);
  auto ry = fractional_ranks(y);
  const auto n = static_cast<double>(x.size());
  double mean = (n + 1.0) / 2.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = rx[i] - mean;
    double dy = ry[i] - mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw NumericError("spearman: zero rank variance (all values tied)");
  }
  return sxy / std::sqrt(sxx * syy);
}

double predicate_cosine(PredicateId c1, PredicateId c2, const Model& model, bool include_bias) {
  double dot = model.pred_w.col(c1).dot(model.pred_w.col(c2));
  double n1 = model.pred_w.col(c1).squaredNorm();
  double n2 = model.pred_w.col(c2).squaredNorm();
  if (include_bias) {
    dot += model.pred_b[c1] * model.pred_b[c2];
    n1 += model.pred_b[c1] * model.pred_b[c1];
    n2 += model.pred_b[c2] * model.pred_b[c2];
  }
  if (n1 <= 0.0 || n2 <= 0.0) {
    throw NumericError("cosine undefined for zero parameter vector");
  }
  return dot / std::sqrt(n1 * n2);
}

EvalReport evaluate(const Model& model, const PairDataset& dataset, bool include_bias) {
  EvalReport report;
  report.dataset = dataset.name;
  std::vector<double> gold;
  std::vector<double> score;
  for (const auto& pair : dataset.pairs) {
    EvalReport::PairScore ps;
    ps.word1 = pair.word1;
    ps.word2 = pair.word2;
    ps.gold = pair.gold;
    PredicateId c1 = model.vocab.find(pair.word1);
    PredicateId c2 = model.vocab.find(pair.word2);
    if (c1 == kNoPredicate || c2 == kNoPredicate) {
      ps.covered = false;
      ++report.skipped_pairs;
    } else {
      ps.covered = true;
      ps.score = predicate_cosine(c1, c2, model, include_bias);
      gold.push_back(pair.gold);
      score.push_back(ps.score);
      ++report.covered_pairs;
    }
    report.scores.push_back(std::move(ps));
  }
  if (report.covered_pairs < 2) {
    throw DataError("fewer than 2 pairs covered by the vocabulary; cannot correlate");
  }
  report.spearman_rho = spearman(score, gold);
  return report;
}

std::string EvalReport::summary() const {
  std::ostringstream out;
  out << "dataset: " << dataset << '\n';
  out << "covered pairs: " << covered_pairs << '\n';
  out << "skipped pairs: " << skipped_pairs << '\n';
  out << "spearman rho: " << spearman_rho << '\n';
  return out.str();
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  j["spearman_rho"] = spearman_rho;
  j["covered_pairs"] = covered_pairs;
  j["skipped_pairs"] = skipped_pairs;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& ps : scores) {
    nlohmann::ordered_json p;
    p["word1"] = ps.word1;
    p["word2"] = ps.word2;
    p["gold"] = ps.gold;
    p["covered"] = ps.covered;
    if (ps.covered) p["score"] = ps.score;
    pairs.push_back(std::move(p));
  }
  j["pairs"] = std::move(pairs);
  return j.dump(1, '\t');
}

}  // namespace semfun
