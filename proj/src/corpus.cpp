#include "semfun/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace semfun {
namespace {

using json = nlohmann::json;

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

[[noreturn]] void line_error(std::int64_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path.string());
  return in;
}

}  // namespace

std::optional<TripleRecord> parse_triple_line(const std::string& text, std::int64_t line_no) {
  if (!text.empty() && text[0] == '#') return std::nullopt;
  auto fields = split_tabs(text);
  if (fields.size() != 3) {
    line_error(line_no, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
  }
  TripleRecord rec;
  rec.line = line_no;
  rec.verb = fields[0];
  if (rec.verb.empty() || rec.verb == "_") line_error(line_no, "missing verb");
  if (fields[1].empty() || fields[2].empty()) line_error(line_no, "empty argument field");
  if (fields[1] == "_" && fields[2] == "_") line_error(line_no, "both arguments missing");
  if (fields[1] != "_") rec.arg1 = fields[1];
  if (fields[2] != "_") rec.arg2 = fields[2];
  return rec;
}

void for_each_triple(const std::filesystem::path& path,
                     const std::function<void(const TripleRecord&)>& fn) {
  auto in = open_input(path);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto rec = parse_triple_line(line, line_no)) fn(*rec);
  }
}

std::vector<TripleRecord> load_triples(const std::filesystem::path& path) {
  std::vector<TripleRecord> out;
  for_each_triple(path, [&](const TripleRecord& rec) { out.push_back(rec); });
  return out;
}

RawGraph to_raw_graph(const TripleRecord& record) {
  RawGraph g;
  g.line = record.line;
  g.nodes.push_back(record.verb);
  if (!record.arg1.empty()) {
    g.links.push_back({0, "ARG1", static_cast<int>(g.nodes.size())});
    g.nodes.push_back(record.arg1);
  }
  if (!record.arg2.empty()) {
    g.links.push_back({0, "ARG2", static_cast<int>(g.nodes.size())});
    g.nodes.push_back(record.arg2);
  }
  return g;
}

void for_each_graph_jsonl(const std::filesystem::path& path,
                          const std::function<void(const RawGraph&)>& fn) {
  auto in = open_input(path);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      line_error(line_no, std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
      line_error(line_no, "expected object with a \"nodes\" array");
    }
    RawGraph g;
    g.line = line_no;
    for (const auto& node : j["nodes"]) {
      if (!node.is_string() || node.get<std::string>().empty()) {
        line_error(line_no, "nodes must be non-empty strings");
      }
      g.nodes.push_back(node.get<std::string>());
    }
    if (g.nodes.empty()) line_error(line_no, "graph has no nodes");
    if (j.contains("links")) {
      if (!j["links"].is_array()) line_error(line_no, "\"links\" must be an array");
      for (const auto& link : j["links"]) {
        if (!link.is_array() || link.size() != 3 || !link[0].is_number_integer() ||
            !link[1].is_string() || !link[2].is_number_integer()) {
          line_error(line_no, "links must be [src, \"LABEL\", tgt] triples");
        }
        RawGraph::RawLink l{link[0].get<int>(), link[1].get<std::string>(), link[2].get<int>()};
        int n = static_cast<int>(g.nodes.size());
        if (l.src < 0 || l.src >= n || l.tgt < 0 || l.tgt >= n) {
          line_error(line_no, "link endpoint out of range");
        }
        if (l.src == l.tgt) line_error(line_no, "self-links are not allowed");
        if (l.label.empty()) line_error(line_no, "empty link label");
        g.links.push_back(std::move(l));
      }
    }
    fn(g);
  }
}

std::vector<RawGraph> load_graphs_jsonl(const std::filesystem::path& path) {
  std::vector<RawGraph> out;
  for_each_graph_jsonl(path, [&](const RawGraph& g) { out.push_back(g); });
  return out;
}

std::vector<RawGraph> load_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string first_line;
  bool jsonl = false;
  while (std::getline(in, first_line)) {
    if (first_line.empty() || first_line[0] == '#') continue;
    jsonl = first_line[0] == '{';
    break;
  }
  in.close();
  if (jsonl) return load_graphs_jsonl(path);
  std::vector<RawGraph> out;
  for_each_triple(path, [&](const TripleRecord& rec) { out.push_back(to_raw_graph(rec)); });
  return out;
}

void write_triples(const std::filesystem::path& path, const std::vector<RawGraph>& graphs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path.string());
  for (const auto& g : graphs) {
    std::string arg1 = "_";
    std::string arg2 = "_";
    for (const auto& l : g.links) {
      if (l.src != 0) throw DataError("graph is not an SVO triple; write as JSON lines instead");
      if (l.label == "ARG1") {
        arg1 = g.nodes.at(l.tgt);
      } else if (l.label == "ARG2") {
        arg2 = g.nodes.at(l.tgt);
      } else {
        throw DataError("graph is not an SVO triple; write as JSON lines instead");
      }
    }
    out << g.nodes.at(0) << '\t' << arg1 << '\t' << arg2 << '\n';
  }
  if (!out) throw DataError("failed writing: " + path.string());
}

void write_graphs_jsonl(const std::filesystem::path& path, const std::vector<RawGraph>& graphs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path.string());
  for (const auto& g : graphs) {
    json j;
    j["nodes"] = g.nodes;
    auto links = json::array();
    for (const auto& l : g.links) links.push_back(json::array({l.src, l.label, l.tgt}));
    j["links"] = links;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("failed writing: " + path.string());
}

VocabularyBuild build_vocabulary(const std::vector<RawGraph>& graphs, int min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::vector<bool> alive(graphs.size(), true);
  std::unordered_map<std::string, std::int64_t> counts;
  int rounds = 0;
  while (true) {
    ++rounds;
    counts.clear();
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      if (!alive[i]) continue;
      for (const auto& node : graphs[i].nodes) ++counts[node];
    }
    if (counts.empty()) throw DataError("no situations survive rare-predicate filtering");
    bool changed = false;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      if (!alive[i]) continue;
      for (const auto& node : graphs[i].nodes) {
        if (counts[node] < min_count) {
          alive[i] = false;
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }

  VocabularyBuild result;
  result.rounds = rounds;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (alive[i]) {
      result.kept.push_back(graphs[i]);
    } else {
      ++result.dropped_tokens;
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> pairs(counts.begin(), counts.end());
  result.vocabulary = Vocabulary::from_counts(std::move(pairs));
  return result;
}

LabelTable collect_labels(const std::vector<RawGraph>& graphs) {
  std::unordered_set<std::string> seen;
  for (const auto& g : graphs) {
    for (const auto& l : g.links) seen.insert(l.label);
  }
  std::vector<std::string> sorted(seen.begin(), seen.end());
  std::sort(sorted.begin(), sorted.end());
  LabelTable table;
  for (const auto& name : sorted) table.add(name);
  return table;
}

std::optional<GraphToken> tokenize(const RawGraph& graph, const Vocabulary& vocab,
                                   const LabelTable& labels) {
  GraphToken token;
  token.nodes.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) {
    PredicateId id = vocab.find(node);
    if (id == kNoPredicate) return std::nullopt;
    token.nodes.push_back(id);
  }
  token.links.reserve(graph.links.size());
  for (const auto& l : graph.links) {
    token.links.push_back({l.src, labels.require(l.label), l.tgt});
  }
  return token;
}

TokenizedCorpus tokenize_all(const std::vector<RawGraph>& graphs, const Vocabulary& vocab,
                             const LabelTable& labels) {
  TokenizedCorpus out;
  out.tokens.reserve(graphs.size());
  for (const auto& g : graphs) {
    if (auto token = tokenize(g, vocab, labels)) {
      out.tokens.push_back(std::move(*token));
    } else {
      ++out.skipped;
    }
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<RawGraph>& graphs) {
  CorpusStats stats;
  std::unordered_set<std::string> types;
  for (const auto& g : graphs) {
    ++stats.tokens;
    for (const auto& node : g.nodes) types.insert(node);
    int arg1 = 0;
    int arg2 = 0;
    bool exotic = false;
    for (const auto& l : g.links) {
      if (l.label == "ARG1") {
        ++arg1;
      } else if (l.label == "ARG2") {
        ++arg2;
      } else {
        exotic = true;
      }
    }
    if (!exotic && arg1 == 1 && arg2 == 1) {
      ++stats.both_args;
    } else if (!exotic && arg1 == 1 && arg2 == 0) {
      ++stats.arg1_only;
    } else if (!exotic && arg1 == 0 && arg2 == 1) {
      ++stats.arg2_only;
    } else {
      ++stats.other;
    }
  }
  stats.types = static_cast<std::int64_t>(types.size());
  return stats;
}

std::string CorpusStats::table() const {
  std::ostringstream out;
  out << "situation type\tinstances\n";
  out << "both arguments\t" << both_args << '\n';
  out << "ARG1 only\t" << arg1_only << '\n';
  out << "ARG2 only\t" << arg2_only << '\n';
  if (other > 0) out << "other\t" << other << '\n';
  out << "total\t" << tokens << '\n';
  out << "distinct predicates\t" << types << '\n';
  return out.str();
}

}  // namespace semfun
