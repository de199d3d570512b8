#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semfun/types.hpp"
#include "semfun/vocabulary.hpp"

namespace semfun {

/// One parsed input record before vocabulary lookup: surface predicate
/// strings per node plus links with surface label names.
struct RawGraph {
  std::vector<std::string> nodes;
  struct RawLink {
    int src = 0;
    std::string label;
    int tgt = 0;
    bool operator==(const RawLink&) const = default;
  };
  std::vector<RawLink> links;
  std::int64_t line = 0;  // 1-based source line, for error reporting

  bool operator==(const RawGraph& other) const {
    return nodes == other.nodes && links == other.links;
  }
};

/// Raw SVO triple; empty string marks an absent argument.
struct TripleRecord {
  std::string verb;
  std::string arg1;
  std::string arg2;
  std::int64_t line = 0;
};

/// Parses one line of the triples format.  Returns nullopt for comment lines.
std::optional<TripleRecord> parse_triple_line(const std::string& text, std::int64_t line_no);

/// Streams tab-separated `verb arg1 arg2` records ( `_` = absent, `#` = comment).
void for_each_triple(const std::filesystem::path& path,
                     const std::function<void(const TripleRecord&)>& fn);
std::vector<TripleRecord> load_triples(const std::filesystem::path& path);

RawGraph to_raw_graph(const TripleRecord& record);

/// Streams JSON-lines graphs: {"nodes": [...], "links": [[src, "LABEL", tgt], ...]}.
void for_each_graph_jsonl(const std::filesystem::path& path,
                          const std::function<void(const RawGraph&)>& fn);
std::vector<RawGraph> load_graphs_jsonl(const std::filesystem::path& path);

/// Loads either format, sniffing JSON lines by a leading '{'.
std::vector<RawGraph> load_corpus(const std::filesystem::path& path);

void write_triples(const std::filesystem::path& path, const std::vector<RawGraph>& graphs);
void write_graphs_jsonl(const std::filesystem::path& path, const std::vector<RawGraph>& graphs);

struct VocabularyBuild {
  Vocabulary vocabulary;
  std::vector<RawGraph> kept;    // surviving tokens, input order
  std::int64_t dropped_tokens = 0;
  int rounds = 0;  // fixed-point iterations run
};

/// Removes situations containing rare predicates, recounting until every
/// surviving predicate occurs at least `min_count` times in the survivors.
VocabularyBuild build_vocabulary(const std::vector<RawGraph>& graphs, int min_count);

/// Collects every link label name used by `graphs`, in sorted order.
LabelTable collect_labels(const std::vector<RawGraph>& graphs);

/// Maps surface strings to ids.  Returns nullopt (a skip, not an error) when
/// any node predicate is out of vocabulary.
std::optional<GraphToken> tokenize(const RawGraph& graph, const Vocabulary& vocab,
                                   const LabelTable& labels);

struct TokenizedCorpus {
  std::vector<GraphToken> tokens;
  std::int64_t skipped = 0;
};

TokenizedCorpus tokenize_all(const std::vector<RawGraph>& graphs, const Vocabulary& vocab,
                             const LabelTable& labels);

/// Situation-shape counts in the style of a corpus summary table.
struct CorpusStats {
  std::int64_t both_args = 0;
  std::int64_t arg1_only = 0;
  std::int64_t arg2_only = 0;
  std::int64_t other = 0;
  std::int64_t tokens = 0;
  std::int64_t types = 0;

  std::string table() const;
};

CorpusStats corpus_stats(const std::vector<RawGraph>& graphs);

}  // namespace semfun
