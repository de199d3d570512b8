#include "semfun/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "semfun/cardinality.hpp"

namespace semfun {
namespace {

// Stream-derivation tags; changing these invalidates reproducibility of
// existing seeds, so they are fixed constants.
constexpr std::uint64_t kTagModelInit = 1;
constexpr std::uint64_t kTagShuffle = 2;
constexpr std::uint64_t kTagLatentSweep = 3;
constexpr std::uint64_t kTagParticleSweep = 4;
constexpr std::uint64_t kTagLatentInit = 5;
constexpr std::uint64_t kTagParticleInit = 6;

/// Runs fn(0..n) across up to `threads` workers with disjoint outputs; the
/// split cannot affect results, only timing.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::int64_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string shape_key(const GraphShape& shape) {
  std::ostringstream out;
  out << shape.n_nodes;
  for (const auto& l : shape.links) out << '|' << l.src << ':' << l.label << '>' << l.tgt;
  return out.str();
}

EntityVector uniform_entity(const CardinalityTable& flat, Rng& rng) { return flat.sample(rng); }

}  // namespace

void Hyperparams::validate() const {
  space().validate();
  if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
  if (adagrad_decay <= 0 || adagrad_decay > 1) {
    throw std::invalid_argument("adagrad_decay must be in (0, 1]");
  }
  if (adagrad_epsilon <= 0) throw std::invalid_argument("adagrad_epsilon must be positive");
  if (l1 < 0 || l2 < 0) throw std::invalid_argument("regularisation strengths must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
  if (particle_sweeps_per_batch < 1) {
    throw std::invalid_argument("particle_sweeps_per_batch must be >= 1");
  }
  if (steps_per_variable < 1) throw std::invalid_argument("steps_per_variable must be >= 1");
  if (z_ratio_k <= 0) throw std::invalid_argument("z_ratio_k must be positive");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

ParamTensors ParamTensors::zeros_like(const Model& model) {
  ParamTensors t;
  t.link_w.assign(model.n_labels(), Matrix::Zero(model.n_dims(), model.n_dims()));
  t.dim_bias = Vector::Zero(model.n_dims());
  t.pred_w = Matrix::Zero(model.n_dims(), model.n_preds());
  t.pred_b = Vector::Zero(model.n_preds());
  return t;
}

void ParamTensors::set_zero() {
  for (auto& w : link_w) w.setZero();
  dim_bias.setZero();
  pred_w.setZero();
  pred_b.setZero();
}

bool ParamTensors::all_finite() const {
  for (const auto& w : link_w) {
    if (!w.allFinite()) return false;
  }
  return dim_bias.allFinite() && pred_w.allFinite() && pred_b.allFinite();
}

void add_background_gradient(const Situation& situation, GradientAccumulator& acc, double weight) {
  for (const auto& link : situation.links) {
    Matrix& w = acc.link_w[link.label];
    for (int i : situation.entities[link.src].active) {
      for (int j : situation.entities[link.tgt].active) w(i, j) += weight;
    }
  }
  for (const auto& entity : situation.entities) {
    for (int i : entity.active) acc.dim_bias[i] -= weight;
  }
}

void add_predicate_gradient(const EntityVector& x, PredicateId c, const Model& model,
                            GradientAccumulator& acc, double weight) {
  double slack = weight * (1.0 - truth_probability(x, c, model));
  for (int i : x.active) acc.pred_w(i, c) += slack;
  acc.pred_b[c] -= slack;
}

void positive_gradients(const GraphToken& token, const LatentState& latent, const Model& model,
                        GradientAccumulator& acc, double weight) {
  Situation situation{latent.entities, token.links};
  add_background_gradient(situation, acc, weight);
  for (int slot = 0; slot < token.n_nodes(); ++slot) {
    add_predicate_gradient(latent.entities[slot], token.nodes[slot], model, acc, weight);
    add_predicate_gradient(latent.entities[slot], latent.neg_predicates[slot], model, acc,
                           -weight);
  }
}

void negative_gradients(const std::vector<Situation>& particles, const Model& model,
                        GradientAccumulator& acc, double weight) {
  (void)model;
  for (const auto& particle : particles) {
    add_background_gradient(particle, acc, -weight);
  }
}

void apply_update(Model& model, const GradientAccumulator& acc, AdaGradState& adagrad,
                  const Hyperparams& hp) {
  if (!acc.all_finite()) {
    throw NumericError("non-finite gradient; aborting update");
  }
  auto step = [&](auto& theta, const auto& grad, auto& accum, bool clamp) {
    auto g = (grad.array() - hp.l2 * theta.array() - hp.l1 * theta.array().sign()).eval();
    accum.array() = hp.adagrad_decay * accum.array() + g * g;
    theta.array() += hp.learning_rate * g / (accum.array().sqrt() + hp.adagrad_epsilon);
    if (clamp) theta.array() = theta.array().max(0.0);
  };
  for (int l = 0; l < model.n_labels(); ++l) {
    step(model.link_w[l], acc.link_w[l], adagrad.link_w[l], true);
  }
  step(model.dim_bias, acc.dim_bias, adagrad.dim_bias, false);
  step(model.pred_w, acc.pred_w, adagrad.pred_w, false);
  step(model.pred_b, acc.pred_b, adagrad.pred_b, false);
}

Model init_random(SpaceConfig space, const Vocabulary& vocab, const LabelTable& labels, Rng& rng) {
  Model m = Model::zeros(space, labels, vocab);
  const int n = space.n_dims;
  for (auto& w : m.link_w) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) w(i, j) = std::abs(0.1 * rng.normal());
    }
  }
  for (int c = 0; c < m.n_preds(); ++c) {
    for (int i = 0; i < n; ++i) m.pred_w(i, c) = rng.normal();
    m.pred_b[c] = space.cardinality * m.pred_w.col(c).mean();
  }
  return m;
}

Model init_from_pretrained(const Matrix& vectors, const std::vector<GraphToken>& corpus,
                           SpaceConfig space, const Vocabulary& vocab, const LabelTable& labels) {
  space.validate();
  if (vectors.rows() != space.n_dims || vectors.cols() != vocab.size()) {
    throw std::invalid_argument("pre-trained vectors have wrong shape");
  }
  if ((vectors.array() < 0.0).any()) {
    throw std::invalid_argument("pre-trained vectors must be non-negative");
  }
  Model m = Model::zeros(space, labels, vocab);
  m.pred_w = vectors;
  for (int c = 0; c < m.n_preds(); ++c) {
    m.pred_b[c] = space.cardinality * m.pred_w.col(c).mean();
  }

  // Mean-field entity vector per predicate, then soft co-occurrence counts
  // per link label, then positive PMI.
  Matrix mean_field(space.n_dims, vocab.size());
  for (int c = 0; c < m.n_preds(); ++c) {
    mean_field.col(c) = cardinality_marginals(vectors.col(c), space.cardinality);
  }
  std::vector<Matrix> counts(labels.size(), Matrix::Zero(space.n_dims, space.n_dims));
  for (const auto& token : corpus) {
    for (const auto& link : token.links) {
      counts[link.label] += mean_field.col(token.nodes[link.src]) *
                            mean_field.col(token.nodes[link.tgt]).transpose();
    }
  }
  for (int l = 0; l < labels.size(); ++l) {
    const Matrix& n = counts[l];
    double total = n.sum();
    if (total <= 0.0) continue;
    Vector row = n.rowwise().sum();
    Vector col = n.colwise().sum().transpose();
    Matrix& w = m.link_w[l];
    for (int i = 0; i < space.n_dims; ++i) {
      for (int j = 0; j < space.n_dims; ++j) {
        if (n(i, j) <= 0.0 || row[i] <= 0.0 || col[j] <= 0.0) continue;
        double pmi = std::log(n(i, j) * total / (row[i] * col[j]));
        w(i, j) = std::max(0.0, pmi);
      }
    }
  }
  return m;
}

std::string BatchDiagnostics::line() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%lld %lld %.6g %.6g %.6g %.6g %.6g",
                static_cast<long long>(epoch), static_cast<long long>(batch), entity_acceptance,
                pred_acceptance, mean_truth, link_norm, pred_norm);
  return buf;
}

std::uint64_t corpus_digest(const std::vector<GraphToken>& tokens) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::int64_t>(tokens.size()));
  for (const auto& t : tokens) {
    mix(t.n_nodes());
    for (auto n : t.nodes) mix(n);
    mix(static_cast<std::int64_t>(t.links.size()));
    for (const auto& l : t.links) {
      mix(l.src);
      mix(l.label);
      mix(l.tgt);
    }
  }
  return h;
}

TrainState init_train_state(Model model, const std::vector<GraphToken>& tokens,
                            const Hyperparams& hp) {
  hp.validate();
  model.validate();
  if (tokens.empty()) throw std::invalid_argument("training corpus is empty");

  TrainState state;
  state.hp = hp;
  state.n_tokens = static_cast<std::int64_t>(tokens.size());
  state.corpus_digest = corpus_digest(tokens);
  state.adagrad = ParamTensors::zeros_like(model);

  const CardinalityTable flat(Vector::Zero(hp.n_dims), hp.cardinality);

  state.latents.resize(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Rng rng(derive_seed(hp.seed, {kTagLatentInit, i}));
    LatentState& latent = state.latents[i];
    latent.entities.reserve(tokens[i].n_nodes());
    latent.neg_predicates.reserve(tokens[i].n_nodes());
    for (int k = 0; k < tokens[i].n_nodes(); ++k) {
      latent.entities.push_back(uniform_entity(flat, rng));
      latent.neg_predicates.push_back(sample_unigram(model, rng.uniform01()));
    }
  }

  // Fantasy-particle shapes follow the observed shape distribution.
  std::map<std::string, std::pair<GraphShape, std::int64_t>> shapes;
  for (const auto& t : tokens) {
    auto shape = t.shape();
    auto it = shapes.emplace(shape_key(shape), std::make_pair(shape, 0)).first;
    ++it->second.second;
  }
  std::vector<std::pair<GraphShape, double>> shape_cdf;
  double acc = 0.0;
  for (const auto& [key, entry] : shapes) {
    acc += static_cast<double>(entry.second) / static_cast<double>(tokens.size());
    shape_cdf.emplace_back(entry.first, acc);
  }
  shape_cdf.back().second = 1.0;

  state.particles.resize(hp.n_particles);
  for (int p = 0; p < hp.n_particles; ++p) {
    Rng rng(derive_seed(hp.seed, {kTagParticleInit, static_cast<std::uint64_t>(p)}));
    double u = rng.uniform01();
    const GraphShape* shape = &shape_cdf.back().first;
    for (const auto& [candidate, cum] : shape_cdf) {
      if (u < cum) {
        shape = &candidate;
        break;
      }
    }
    Situation& particle = state.particles[p];
    particle.links = shape->links;
    particle.entities.clear();
    for (int k = 0; k < shape->n_nodes; ++k) particle.entities.push_back(uniform_entity(flat, rng));
  }

  state.model = std::move(model);
  return state;
}

void train_epochs(TrainState& state, const std::vector<GraphToken>& tokens,
                  std::int64_t target_epochs, const ProgressSink& progress) {
  const Hyperparams& hp = state.hp;
  hp.validate();
  if (static_cast<std::int64_t>(tokens.size()) != state.n_tokens ||
      corpus_digest(tokens) != state.corpus_digest) {
    throw DataError("training corpus does not match the one this state was built from");
  }

  const auto n = static_cast<std::int64_t>(tokens.size());
  std::vector<std::int64_t> order(n);

  for (std::int64_t epoch = state.epochs_done; epoch < target_epochs; ++epoch) {
    for (std::int64_t i = 0; i < n; ++i) order[i] = i;
    Rng shuffle_rng(derive_seed(hp.seed, {kTagShuffle, static_cast<std::uint64_t>(epoch)}));
    for (std::int64_t i = n - 1; i > 0; --i) {
      std::int64_t j = shuffle_rng.uniform_int(static_cast<int>(i + 1));
      std::swap(order[i], order[j]);
    }

    const std::int64_t n_batches = (n + hp.batch_size - 1) / hp.batch_size;
    GradientAccumulator acc = ParamTensors::zeros_like(state.model);
    for (std::int64_t batch = 0; batch < n_batches; ++batch) {
      const std::int64_t begin = batch * hp.batch_size;
      const std::int64_t count = std::min<std::int64_t>(hp.batch_size, n - begin);

      const AveragePredicate avg = average_predicate(state.model, hp.z_ratio_k);

      // Latent sweeps: disjoint per-token state, one derived stream each.
      std::vector<MhStats> stats(count);
      parallel_for(count, hp.threads, [&](std::int64_t bi) {
        const std::int64_t tid = order[begin + bi];
        Rng rng(derive_seed(hp.seed, {kTagLatentSweep, static_cast<std::uint64_t>(epoch),
                                      static_cast<std::uint64_t>(tid)}));
        sweep_token(tokens[tid], state.latents[tid], state.model, avg, hp.steps_per_variable,
                    hp.zx_mode, rng, &stats[bi]);
      });

      parallel_for(hp.n_particles, hp.threads, [&](std::int64_t p) {
        Rng rng(derive_seed(hp.seed, {kTagParticleSweep, static_cast<std::uint64_t>(epoch),
                                      static_cast<std::uint64_t>(batch),
                                      static_cast<std::uint64_t>(p)}));
        for (int s = 0; s < hp.particle_sweeps_per_batch; ++s) {
          resample_situation_sweep(state.particles[p], state.model, rng);
        }
      });

      // Deterministic reduction: batch order, then particles.
      acc.set_zero();
      MhStats batch_stats;
      double truth_sum = 0.0;
      std::int64_t truth_count = 0;
      for (std::int64_t bi = 0; bi < count; ++bi) {
        const std::int64_t tid = order[begin + bi];
        positive_gradients(tokens[tid], state.latents[tid], state.model, acc, 1.0);
        batch_stats += stats[bi];
        for (int slot = 0; slot < tokens[tid].n_nodes(); ++slot) {
          truth_sum += truth_probability(state.latents[tid].entities[slot],
                                         tokens[tid].nodes[slot], state.model);
          ++truth_count;
        }
      }
      negative_gradients(state.particles, state.model, acc,
                         static_cast<double>(count) / hp.n_particles);
      apply_update(state.model, acc, state.adagrad, hp);

      if (progress) {
        BatchDiagnostics diag;
        diag.epoch = epoch;
        diag.batch = batch;
        diag.entity_acceptance = batch_stats.entity_rate();
        diag.pred_acceptance = batch_stats.pred_rate();
        diag.mean_truth = truth_count ? truth_sum / truth_count : 0.0;
        double link_sq = 0.0;
        for (const auto& w : state.model.link_w) link_sq += w.squaredNorm();
        diag.link_norm = std::sqrt(link_sq);
        diag.pred_norm = state.model.pred_w.norm();
        progress(diag);
      }
    }
    state.epochs_done = epoch + 1;
  }
}

Model train(const std::vector<GraphToken>& tokens, const Vocabulary& vocab,
            const LabelTable& labels, const Hyperparams& hp, const ProgressSink& progress) {
  hp.validate();
  Rng rng(derive_seed(hp.seed, {kTagModelInit}));
  Model model = init_random(hp.space(), vocab, labels, rng);
  TrainState state = init_train_state(std::move(model), tokens, hp);
  train_epochs(state, tokens, hp.epochs, progress);
  return std::move(state.model);
}

}  // namespace semfun
