#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "semfun/mcmc.hpp"
#include "semfun/model.hpp"
#include "semfun/rng.hpp"
#include "semfun/types.hpp"
#include "semfun/vocabulary.hpp"

namespace semfun {

struct Hyperparams {
  int n_dims = 400;
  int cardinality = 40;
  double learning_rate = 0.1;
  double adagrad_decay = 0.9;     // rho in (0, 1]; 1 = classic AdaGrad
  double adagrad_epsilon = 1e-8;
  double l1 = 1e-6;
  double l2 = 1e-4;
  int batch_size = 100;
  int n_particles = 50;
  int particle_sweeps_per_batch = 1;
  int steps_per_variable = 1;
  double z_ratio_k = 1.0;
  int epochs = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  // Exact predicate-choice normaliser instead of the averaged-predicate
  // approximation; affordable only for small vocabularies.
  ZxMode zx_mode = ZxMode::kApprox;

  void validate() const;

  SpaceConfig space() const { return SpaceConfig{n_dims, cardinality}; }
};

/// One array per model parameter group, shared by gradient accumulators and
/// AdaGrad state.
struct ParamTensors {
  std::vector<Matrix> link_w;
  Vector dim_bias;
  Matrix pred_w;
  Vector pred_b;

  static ParamTensors zeros_like(const Model& model);
  void set_zero();
  bool all_finite() const;
};

using GradientAccumulator = ParamTensors;
using AdaGradState = ParamTensors;

/// Gradient of -E^b(situation) w.r.t. link weights and dimension biases,
/// scaled by `weight` and added to `acc`.
void add_background_gradient(const Situation& situation, GradientAccumulator& acc, double weight);

/// Gradient of the predicate-energy term (1 - t_c(x)) d(-E^p(x,c)), scaled by
/// `weight` and added to `acc`.
void add_predicate_gradient(const EntityVector& x, PredicateId c, const Model& model,
                            GradientAccumulator& acc, double weight);

/// Data-conditioned gradient terms for one token at one latent sample:
/// background links/biases, observed-predicate term, minus the
/// latent-predicate term.
void positive_gradients(const GraphToken& token, const LatentState& latent, const Model& model,
                        GradientAccumulator& acc, double weight = 1.0);

/// Model-expectation background term estimated from fantasy particles; each
/// particle's contribution is subtracted with the given weight (callers pass
/// batch_tokens / n_particles to put both phases on the per-token scale).
void negative_gradients(const std::vector<Situation>& particles, const Model& model,
                        GradientAccumulator& acc, double weight);

/// AdaGrad-with-decay ascent step with L1/L2 regularisation and
/// non-negativity projection of link weights.  Throws NumericError on
/// non-finite gradients.
void apply_update(Model& model, const GradientAccumulator& acc, AdaGradState& adagrad,
                  const Hyperparams& hp);

Model init_random(SpaceConfig space, const Vocabulary& vocab, const LabelTable& labels, Rng& rng);

/// Pre-trained initialisation: predicate weights from `vectors` (an N x |V|
/// non-negative matrix), link weights from positive PMI of mean-field
/// co-occurrences across the corpus links.
Model init_from_pretrained(const Matrix& vectors, const std::vector<GraphToken>& corpus,
                           SpaceConfig space, const Vocabulary& vocab, const LabelTable& labels);

struct BatchDiagnostics {
  std::int64_t epoch = 0;
  std::int64_t batch = 0;
  double entity_acceptance = 0.0;
  double pred_acceptance = 0.0;
  double mean_truth = 0.0;   // mean t_c(x) over observed predicates in the batch
  double link_norm = 0.0;    // Frobenius norm over all link matrices
  double pred_norm = 0.0;    // Frobenius norm of predicate weights

  std::string line() const;  // "epoch batch acc_entity acc_pred mean_truth link_norm pred_norm"
};

using ProgressSink = std::function<void(const BatchDiagnostics&)>;

/// Everything that persists across batches; checkpoints serialise this.
struct TrainState {
  Model model;
  AdaGradState adagrad;
  std::vector<LatentState> latents;  // one per corpus token, persistent chains
  std::vector<Situation> particles;  // persistent fantasy chains
  Hyperparams hp;
  std::int64_t epochs_done = 0;
  std::uint64_t corpus_digest = 0;
  std::int64_t n_tokens = 0;
};

/// FNV-1a digest of the token list; guards resume against corpus mismatch.
std::uint64_t corpus_digest(const std::vector<GraphToken>& tokens);

/// Builds initial latent states and fantasy particles (shapes drawn from the
/// corpus shape distribution) around an initial model.
TrainState init_train_state(Model model, const std::vector<GraphToken>& tokens,
                            const Hyperparams& hp);

/// Runs epochs [state.epochs_done, target_epochs).  Deterministic for a
/// fixed seed and any thread count.
void train_epochs(TrainState& state, const std::vector<GraphToken>& tokens,
                  std::int64_t target_epochs, const ProgressSink& progress = nullptr);

/// Random-init convenience wrapper: init, train hp.epochs epochs, return model.
Model train(const std::vector<GraphToken>& tokens, const Vocabulary& vocab,
            const LabelTable& labels, const Hyperparams& hp,
            const ProgressSink& progress = nullptr);

}  // namespace semfun
