#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "semfun/model.hpp"
#include "semfun/trainer.hpp"
#include "semfun/types.hpp"

namespace semfun {

inline constexpr double kDefaultEnumerationGuard = 1e7;

/// (N choose C)^K, the joint configuration count for K entity slots.
double joint_configuration_count(SpaceConfig space, int n_slots);

/// Throws std::invalid_argument when enumerating `n_slots` entities would
/// exceed `max_configs` joint configurations.
void check_enumeration_guard(SpaceConfig space, int n_slots, double max_configs);

/// Exact background partition function Z for one graph shape, by full
/// enumeration in log space.
double log_exact_partition(const Model& model, const GraphShape& shape,
                           double max_configs = kDefaultEnumerationGuard);
double exact_partition(const Model& model, const GraphShape& shape,
                       double max_configs = kDefaultEnumerationGuard);

/// Exact log P(observed predicates of `token`), marginalising entities.
double exact_token_log_likelihood(const Model& model, const GraphToken& token,
                                  double max_configs = kDefaultEnumerationGuard);
double exact_token_likelihood(const Model& model, const GraphToken& token,
                              double max_configs = kDefaultEnumerationGuard);

struct PosteriorOptions {
  double max_configs = kDefaultEnumerationGuard;
  // Sampling fallback, used when enumeration would exceed the guard.
  // n_samples = 0 means enumeration only.
  std::int64_t n_samples = 0;
  std::int64_t burnin = 1000;
  int steps_per_variable = 5;
  std::uint64_t seed = 0;
};

/// Posterior distribution over the predicate at `slot`, conditioning on the
/// predicates observed at every other node of the token and marginalising
/// all entities.  Exact by enumeration when feasible, otherwise by MCMC over
/// the entity posterior (exact normaliser, exact conditional draws at the
/// unobserved slot).
Vector posterior_over_slot(const Model& model, const GraphToken& token, int slot,
                           const PosteriorOptions& options = {});

/// The four-term likelihood gradient with every expectation computed by
/// enumeration instead of sampling.  Shares the per-sample accumulation code
/// with the trainer, so it checks exactly what training estimates.
GradientAccumulator exact_gradient(const Model& model, const GraphToken& token,
                                   double max_configs = kDefaultEnumerationGuard);

/// Enumeration with per-space caching: single-entity tables (truth values,
/// choice normalisers) and per-shape partition functions are built once and
/// reused across tokens.  Worth it when scoring many tokens on a small space.
class ExactEvaluator {
 public:
  ExactEvaluator(const Model& model, double max_configs = kDefaultEnumerationGuard);

  double token_log_likelihood(const GraphToken& token);
  double mean_log_likelihood(const std::vector<GraphToken>& tokens);

  int n_configs() const { return static_cast<int>(configs_.size()); }

 private:
  double log_partition(const GraphShape& shape);
  const Model& model_;
  double max_configs_;
  std::vector<EntityVector> configs_;
  Matrix log_choice_;   // |V| x S: log P(c | x_s)
  Vector bias_sum_;     // S: b . x_s
  std::vector<Matrix> link_term_;  // per label: S x S matrix x_a^T W x_b
  std::vector<std::pair<GraphShape, double>> shape_cache_;
};

}  // namespace semfun
