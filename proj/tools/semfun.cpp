// semfun: train and query semantic-function models over dependency-graph
// corpora.  Subcommands: preprocess, train, eval, query, sample,
// convert-pairs.  Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numeric failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "semfun/cardinality.hpp"
#include "semfun/corpus.hpp"
#include "semfun/enumeration.hpp"
#include "semfun/eval.hpp"
#include "semfun/mcmc.hpp"
#include "semfun/model.hpp"
#include "semfun/model_io.hpp"
#include "semfun/rng.hpp"
#include "semfun/trainer.hpp"

namespace {

using namespace semfun;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

void print_seed(std::uint64_t seed) { std::cerr << "seed: " << seed << "\n"; }

// ---------------------------------------------------------------------------
// Config file: flat `key = value` lines with '#' comments.  Values are
// expanded to --key=value tokens placed before the flags the user typed, and
// every option takes the last occurrence, so the precedence is
// command line > config file > built-in default.

std::vector<std::string> expand_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw DataError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    if (key == "config") {
      throw DataError("config line " + std::to_string(line_no) + ": config files cannot nest");
    }
    for (auto& ch : key) {
      if (ch == '_') ch = '-';
    }
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

/// Rewrites argv so config-file tokens come right after the subcommand name,
/// before the user's own flags.
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw DataError("--config needs a file path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  if (rest.empty()) throw DataError("--config requires a subcommand");
  std::vector<std::string> out;
  out.push_back(rest[0]);  // subcommand name
  for (auto& token : expand_config_file(config_path)) out.push_back(std::move(token));
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string input;
  std::string tokens_out;
  std::string vocab_out;
  std::string stats_out;
  int min_count = 5;
};

int run_preprocess(const PreprocessArgs& args) {
  auto raw = load_corpus(args.input);
  auto build = build_vocabulary(raw, args.min_count);
  bool svo = true;
  for (const auto& g : build.kept) {
    for (const auto& l : g.links) {
      if (l.src != 0 || (l.label != "ARG1" && l.label != "ARG2")) svo = false;
    }
  }
  if (svo) {
    write_triples(args.tokens_out, build.kept);
  } else {
    write_graphs_jsonl(args.tokens_out, build.kept);
  }
  build.vocabulary.save(args.vocab_out);

  auto stats = corpus_stats(build.kept);
  std::string table = stats.table();
  std::cout << table;
  std::cout << "dropped situations\t" << build.dropped_tokens << "\n";
  std::cout << "filter rounds\t" << build.rounds << "\n";
  if (!args.stats_out.empty()) {
    std::ofstream out(args.stats_out);
    if (!out) throw DataError("cannot open stats file for writing: " + args.stats_out);
    out << table;
    out << "dropped situations\t" << build.dropped_tokens << "\n";
    out << "filter rounds\t" << build.rounds << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string tokens;
  std::string vocab;
  std::string out;
  std::string resume;
  std::string init = "random";
  std::string pretrained;
  std::string progress;
  int checkpoint_every = 0;
  Hyperparams hp;
};

Matrix load_pretrained_vectors(const std::string& path, const Vocabulary& vocab, int n_dims) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pre-trained vectors: " + path);
  Matrix vectors(n_dims, vocab.size());
  std::vector<bool> seen(vocab.size(), false);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("vectors line " + std::to_string(line_no) +
                      ": expected predicate<TAB>values");
    }
    std::string word = line.substr(0, tab);
    PredicateId id = vocab.find(word);
    if (id == kNoPredicate) continue;  // extra predicates are ignored
    std::istringstream values(line.substr(tab + 1));
    for (int i = 0; i < n_dims; ++i) {
      double v = 0.0;
      if (!(values >> v)) {
        throw DataError("vectors line " + std::to_string(line_no) + ": expected " +
                        std::to_string(n_dims) + " values");
      }
      vectors(i, id) = v;
    }
    double extra = 0.0;
    if (values >> extra) {
      throw DataError("vectors line " + std::to_string(line_no) + ": expected " +
                      std::to_string(n_dims) + " values");
    }
    seen[id] = true;
  }
  for (int c = 0; c < vocab.size(); ++c) {
    if (!seen[c]) throw DataError("no pre-trained vector for predicate: " + vocab.word(c));
  }
  return vectors;
}

int run_train(const TrainArgs& args) {
  auto raw = load_corpus(args.tokens);
  auto vocab = Vocabulary::load(args.vocab);
  auto labels = collect_labels(raw);
  auto tokenized = tokenize_all(raw, vocab, labels);
  if (tokenized.skipped > 0) {
    std::cerr << "skipped " << tokenized.skipped << " out-of-vocabulary situations\n";
  }

  ProgressSink sink;
  std::ofstream progress_file;
  if (args.progress == "-") {
    sink = [](const BatchDiagnostics& d) { std::cout << d.line() << "\n"; };
  } else if (!args.progress.empty()) {
    progress_file.open(args.progress);
    if (!progress_file) throw DataError("cannot open progress file: " + args.progress);
    sink = [&progress_file](const BatchDiagnostics& d) { progress_file << d.line() << "\n"; };
  }

  TrainState state;
  std::int64_t target_epochs = 0;
  if (!args.resume.empty()) {
    state = load_checkpoint(args.resume);
    target_epochs = std::max<std::int64_t>(args.hp.epochs, state.epochs_done);
    state.hp.epochs = static_cast<int>(target_epochs);
    state.hp.threads = args.hp.threads;
    print_seed(state.hp.seed);
  } else {
    print_seed(args.hp.seed);
    Model model;
    if (args.init == "random") {
      Rng rng(derive_seed(args.hp.seed, {1}));
      model = init_random(args.hp.space(), vocab, labels, rng);
    } else if (args.init == "pretrained") {
      if (args.pretrained.empty()) {
        throw std::invalid_argument("--init pretrained requires --pretrained <path>");
      }
      Matrix vectors = load_pretrained_vectors(args.pretrained, vocab, args.hp.n_dims);
      model = init_from_pretrained(vectors, tokenized.tokens, args.hp.space(), vocab, labels);
    } else {
      throw std::invalid_argument("--init must be 'random' or 'pretrained'");
    }
    state = init_train_state(std::move(model), tokenized.tokens, args.hp);
    target_epochs = args.hp.epochs;
  }

  if (args.checkpoint_every > 0) {
    while (state.epochs_done < target_epochs) {
      auto next = std::min<std::int64_t>(state.epochs_done + args.checkpoint_every, target_epochs);
      train_epochs(state, tokenized.tokens, next, sink);
      save_checkpoint(state, args.out);
      std::cerr << "checkpoint at epoch " << state.epochs_done << ": " << args.out << "\n";
    }
  } else {
    train_epochs(state, tokenized.tokens, target_epochs, sink);
  }
  save_checkpoint(state, args.out);
  std::cerr << "wrote model to " << args.out << " (epochs " << state.epochs_done << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string model;
  std::string pairs;
  std::string out;
  bool json = false;
  bool weights_only = false;
};

int run_eval(const EvalArgs& args) {
  Model model = load_model(args.model);
  auto dataset = load_pairs(args.pairs);
  auto report = evaluate(model, dataset, !args.weights_only);
  std::string text = args.json ? report.to_json() + "\n" : report.summary();
  std::cout << text;
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw DataError("cannot open report file for writing: " + args.out);
    out << text;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// query

struct QueryArgs {
  std::string model;
  std::vector<std::string> query;
  std::int64_t samples = 0;
  std::int64_t burnin = 1000;
  int steps_per_variable = 5;
  int top = 10;
  std::uint64_t seed = 0;
  bool weights_only = false;
};

void print_ranked(const Model& model, const Vector& scores, int top) {
  std::vector<int> order(model.n_preds());
  for (int c = 0; c < model.n_preds(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  for (int rank = 0; rank < std::min<int>(top, model.n_preds()); ++rank) {
    std::printf("%s\t%.6f\n", model.vocab.word(order[rank]).c_str(), scores[order[rank]]);
  }
}

int run_query(const QueryArgs& args) {
  Model model = load_model(args.model);
  const auto& q = args.query;
  if (q.empty()) throw std::invalid_argument("query expects: sim|neighbors|fill ...");

  if (q[0] == "sim") {
    if (q.size() != 3) throw std::invalid_argument("usage: query ... sim <word1> <word2>");
    std::printf("%.6f\n", predicate_cosine(model.vocab.require(q[1]), model.vocab.require(q[2]),
                                           model, !args.weights_only));
    return kExitOk;
  }

  if (q[0] == "neighbors") {
    if (q.size() != 3) throw std::invalid_argument("usage: query ... neighbors <word> <k>");
    PredicateId c = model.vocab.require(q[1]);
    int k = 0;
    try {
      k = std::stoi(q[2]);
    } catch (const std::exception&) {
      throw std::invalid_argument("neighbors: k must be an integer");
    }
    Vector scores(model.n_preds());
    for (int other = 0; other < model.n_preds(); ++other) {
      scores[other] = other == c ? -2.0  // rank the query word itself last
                                 : predicate_cosine(c, other, model, !args.weights_only);
    }
    print_ranked(model, scores, std::min(k, model.n_preds() - 1));
    return kExitOk;
  }

  if (q[0] == "fill") {
    if (q.size() < 3) {
      throw std::invalid_argument("usage: query ... fill <verb> ROLE=<word>|ROLE=? ...");
    }
    GraphToken token;
    token.nodes.push_back(model.vocab.require(q[1]));
    int unobserved = -1;
    for (std::size_t i = 2; i < q.size(); ++i) {
      auto eq = q[i].find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("fill arguments look like ARG1=dog or ARG2=?");
      }
      std::string role = q[i].substr(0, eq);
      std::string word = q[i].substr(eq + 1);
      LinkLabelId label = model.labels.require(role);
      int slot = token.n_nodes();
      if (word == "?") {
        if (unobserved >= 0) throw std::invalid_argument("fill takes exactly one '?' role");
        unobserved = slot;
        token.nodes.push_back(0);  // placeholder, never read
      } else {
        token.nodes.push_back(model.vocab.require(word));
      }
      token.links.push_back({0, label, slot});
    }
    if (unobserved < 0) throw std::invalid_argument("fill needs one role set to '?'");
    PosteriorOptions options;
    options.n_samples = args.samples;
    options.burnin = args.burnin;
    options.steps_per_variable = args.steps_per_variable;
    options.seed = args.seed;
    if (args.samples > 0) print_seed(args.seed);
    Vector posterior = posterior_over_slot(model, token, unobserved, options);
    print_ranked(model, posterior, args.top);
    return kExitOk;
  }

  throw std::invalid_argument("unknown query form: " + q[0]);
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
  std::string model;
  std::string shape = "svo";
  int burnin = 100;
  int count = 10;
  std::uint64_t seed = 0;
};

int run_sample(const SampleArgs& args) {
  Model model = load_model(args.model);
  GraphShape shape;
  if (args.shape == "svo") {
    shape = {3, {{0, model.labels.require("ARG1"), 1}, {0, model.labels.require("ARG2"), 2}}};
  } else if (args.shape == "sv") {
    shape = {2, {{0, model.labels.require("ARG1"), 1}}};
  } else if (args.shape == "vo") {
    shape = {2, {{0, model.labels.require("ARG2"), 1}}};
  } else {
    throw std::invalid_argument("unknown shape '" + args.shape + "' (expected svo, sv, or vo)");
  }
  print_seed(args.seed);

  Rng rng(derive_seed(args.seed, {0x5a3}));
  const CardinalityTable flat(Vector::Zero(model.n_dims()), model.cardinality());
  Situation situation;
  situation.links = shape.links;
  for (int k = 0; k < shape.n_nodes; ++k) situation.entities.push_back(flat.sample(rng));
  for (int sweep = 0; sweep < args.burnin; ++sweep) {
    resample_situation_sweep(situation, model, rng);
  }

  for (int i = 0; i < args.count; ++i) {
    resample_situation_sweep(situation, model, rng);
    std::vector<std::string> words;
    for (int k = 0; k < shape.n_nodes; ++k) {
      Vector choice = predicate_choice(situation.entities[k], model);
      double u = rng.uniform01();
      double acc = 0.0;
      PredicateId picked = model.n_preds() - 1;
      for (int c = 0; c < model.n_preds(); ++c) {
        acc += choice[c];
        if (u < acc) {
          picked = c;
          break;
        }
      }
      words.push_back(model.vocab.word(picked));
    }
    if (args.shape == "svo") {
      std::printf("%s\t%s\t%s\n", words[0].c_str(), words[1].c_str(), words[2].c_str());
    } else if (args.shape == "sv") {
      std::printf("%s\t%s\t_\n", words[0].c_str(), words[1].c_str());
    } else {
      std::printf("%s\t_\t%s\n", words[0].c_str(), words[1].c_str());
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// convert-pairs

struct ConvertArgs {
  std::string input;
  std::string output;
  std::string pos;
};

int run_convert(const ConvertArgs& args) {
  convert_simlex(args.input, args.output, args.pos);
  return kExitOk;
}

// ---------------------------------------------------------------------------

void add_hyperparam_flags(CLI::App* cmd, Hyperparams& hp, bool& exact_zx) {
  cmd->add_option("--n-dims", hp.n_dims, "Entity space dimensionality N")->capture_default_str();
  cmd->add_option("--cardinality", hp.cardinality, "Active units per entity C")
      ->capture_default_str();
  cmd->add_option("--learning-rate", hp.learning_rate, "AdaGrad learning rate")
      ->capture_default_str();
  cmd->add_option("--adagrad-decay", hp.adagrad_decay,
                  "Exponential decay of squared-gradient sums, 1 = none")
      ->capture_default_str();
  cmd->add_option("--adagrad-epsilon", hp.adagrad_epsilon, "AdaGrad denominator floor")
      ->capture_default_str();
  cmd->add_option("--l1", hp.l1, "L1 regularisation strength")->capture_default_str();
  cmd->add_option("--l2", hp.l2, "L2 regularisation strength")->capture_default_str();
  cmd->add_option("--batch-size", hp.batch_size, "Tokens per gradient update")
      ->capture_default_str();
  cmd->add_option("--particles", hp.n_particles, "Fantasy particles for the negative phase")
      ->capture_default_str();
  cmd->add_option("--particle-sweeps", hp.particle_sweeps_per_batch,
                  "Exact resampling sweeps per particle per batch")
      ->capture_default_str();
  cmd->add_option("--steps-per-variable", hp.steps_per_variable,
                  "MH steps per latent variable per sweep")
      ->capture_default_str();
  cmd->add_option("--z-ratio-k", hp.z_ratio_k,
                  "Constant k in the averaged-predicate normaliser ratio")
      ->capture_default_str();
  cmd->add_option("--epochs", hp.epochs, "Training epochs (total, including resumed ones)")
      ->capture_default_str();
  cmd->add_option("--seed", hp.seed, "Master seed for all random streams")->capture_default_str();
  cmd->add_option("--threads", hp.threads, "Worker threads (any count gives identical results)")
      ->capture_default_str();
  cmd->add_flag("--exact-zx", exact_zx,
                "Use the exact predicate-choice normaliser instead of the averaged-predicate "
                "approximation (small vocabularies only)");
}

std::string config_sink;  // --config is handled before parsing; this absorbs it

void add_config_flag(CLI::App* cmd) {
  cmd->add_option("--config", config_sink, "Flat key = value config file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic-function models over dependency-graph corpora"};
  app.name("semfun");
  app.require_subcommand(1);
  app.get_formatter()->column_width(34);

  PreprocessArgs pre;
  auto* cmd_pre = app.add_subcommand(
      "preprocess", "Filter a corpus, build the vocabulary, report statistics");
  cmd_pre->option_defaults()->take_last();
  cmd_pre->add_option("--input", pre.input, "Corpus file: SVO triples TSV or JSON lines")
      ->required();
  cmd_pre->add_option("--tokens-out", pre.tokens_out, "Filtered token file to write")->required();
  cmd_pre->add_option("--vocab-out", pre.vocab_out, "Vocabulary file to write")->required();
  cmd_pre->add_option("--stats-out", pre.stats_out, "Also write the statistics table here");
  cmd_pre->add_option("--min-count", pre.min_count,
                      "Drop situations with predicates rarer than this (fixed point)")
      ->capture_default_str();
  add_config_flag(cmd_pre);

  TrainArgs train_args;
  bool train_exact_zx = false;
  auto* cmd_train = app.add_subcommand("train", "Train a model on a preprocessed corpus");
  cmd_train->option_defaults()->take_last();
  cmd_train->add_option("--tokens", train_args.tokens, "Preprocessed token file")->required();
  cmd_train->add_option("--vocab", train_args.vocab, "Vocabulary file")->required();
  cmd_train->add_option("--out", train_args.out, "Model checkpoint path to write")->required();
  cmd_train->add_option("--resume", train_args.resume,
                        "Resume from this checkpoint (hyperparameters come from it)");
  cmd_train->add_option("--init", train_args.init, "Initialisation: random or pretrained")
      ->capture_default_str();
  cmd_train->add_option("--pretrained", train_args.pretrained,
                        "Pre-trained vectors (predicate<TAB>v1 ... vN) for --init pretrained");
  cmd_train->add_option("--progress", train_args.progress,
                        "Write per-batch diagnostics here ('-' for stdout)");
  cmd_train->add_option("--checkpoint-every", train_args.checkpoint_every,
                        "Save a checkpoint every this many epochs (0 = only at the end)")
      ->capture_default_str();
  add_hyperparam_flags(cmd_train, train_args.hp, train_exact_zx);
  add_config_flag(cmd_train);

  EvalArgs eval_args;
  auto* cmd_eval = app.add_subcommand("eval", "Word-similarity evaluation of a trained model");
  cmd_eval->option_defaults()->take_last();
  cmd_eval->add_option("--model", eval_args.model, "Model file")->required();
  cmd_eval->add_option("--pairs", eval_args.pairs, "Pair dataset: word1<TAB>word2<TAB>gold")
      ->required();
  cmd_eval->add_option("--out", eval_args.out, "Also write the report here");
  cmd_eval->add_flag("--json", eval_args.json, "Emit the machine-readable JSON report");
  cmd_eval->add_flag("--weights-only", eval_args.weights_only,
                     "Cosine over weights only, without the bias coordinate");
  add_config_flag(cmd_eval);

  QueryArgs query_args;
  auto* cmd_query = app.add_subcommand(
      "query", "Query a model: sim <w1> <w2> | neighbors <w> <k> | fill <verb> ROLE=w ROLE=?");
  cmd_query->option_defaults()->take_last();
  cmd_query->add_option("--model", query_args.model, "Model file")->required();
  cmd_query->add_option("query", query_args.query, "Query words")->expected(-1);
  cmd_query->add_option("--samples", query_args.samples,
                        "Monte Carlo samples for fill when enumeration is infeasible")
      ->capture_default_str();
  cmd_query->add_option("--burnin", query_args.burnin, "Burn-in sweeps before fill sampling")
      ->capture_default_str();
  cmd_query->add_option("--steps-per-variable", query_args.steps_per_variable,
                        "MH steps per observed slot per sweep in fill sampling")
      ->capture_default_str();
  cmd_query->add_option("--top", query_args.top, "Rows to print for ranked output")
      ->capture_default_str();
  cmd_query->add_option("--seed", query_args.seed, "Seed for fill sampling")
      ->capture_default_str();
  cmd_query->add_flag("--weights-only", query_args.weights_only,
                      "Cosine over weights only, without the bias coordinate");
  add_config_flag(cmd_query);

  SampleArgs sample_args;
  auto* cmd_sample =
      app.add_subcommand("sample", "Sample situations from the model and lexicalise them");
  cmd_sample->option_defaults()->take_last();
  cmd_sample->add_option("--model", sample_args.model, "Model file")->required();
  cmd_sample->add_option("--shape", sample_args.shape, "Graph shape: svo, sv, or vo")
      ->capture_default_str();
  cmd_sample->add_option("--burnin", sample_args.burnin, "Sweeps before the first sample")
      ->capture_default_str();
  cmd_sample->add_option("--count", sample_args.count, "Samples to emit (one sweep apart)")
      ->capture_default_str();
  cmd_sample->add_option("--seed", sample_args.seed, "Seed for the particle chain")
      ->capture_default_str();
  add_config_flag(cmd_sample);

  ConvertArgs convert_args;
  auto* cmd_convert = app.add_subcommand(
      "convert-pairs", "Convert a SimLex-style pair file to the canonical TSV");
  cmd_convert->option_defaults()->take_last();
  cmd_convert
      ->add_option("--input", convert_args.input, "Source file (header; word1 word2 POS score)")
      ->required();
  cmd_convert->add_option("--output", convert_args.output, "Canonical TSV to write")->required();
  cmd_convert->add_option("--pos", convert_args.pos, "Keep only rows with this POS tag");
  add_config_flag(cmd_convert);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = apply_config(args);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }

  try {
    std::vector<std::string> parse_args(args.rbegin(), args.rend());
    app.parse(std::move(parse_args));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_pre->parsed()) return run_preprocess(pre);
    if (cmd_train->parsed()) {
      train_args.hp.zx_mode = train_exact_zx ? ZxMode::kExact : ZxMode::kApprox;
      return run_train(train_args);
    }
    if (cmd_eval->parsed()) return run_eval(eval_args);
    if (cmd_query->parsed()) return run_query(query_args);
    if (cmd_sample->parsed()) return run_sample(sample_args);
    if (cmd_convert->parsed()) return run_convert(convert_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
