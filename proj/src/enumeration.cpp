#include "semfun/enumeration.hpp"

#include <algorithm>
#include <cmath>

#include "semfun/cardinality.hpp"
#include "semfun/mcmc.hpp"
#include "semfun/rng.hpp"

namespace semfun {
namespace {

/// Calls fn(entities) for every joint assignment of `n_slots` entities.
template <typename Fn>
void for_each_joint_config(SpaceConfig space, int n_slots, Fn&& fn) {
  std::vector<EntityVector> slots(n_slots, EntityVector::first(space.cardinality));
  while (true) {
    fn(slots);
    int k = n_slots - 1;
    while (k >= 0 && !slots[k].next_combination(space.n_dims)) --k;
    if (k < 0) break;
  }
}

std::vector<EntityVector> all_configs(SpaceConfig space) {
  std::vector<EntityVector> configs;
  EntityVector x = EntityVector::first(space.cardinality);
  do {
    configs.push_back(x);
  } while (x.next_combination(space.n_dims));
  return configs;
}

}  // namespace

double joint_configuration_count(SpaceConfig space, int n_slots) {
  double per_slot = 1.0;
  for (int i = 0; i < space.cardinality; ++i) {
    per_slot *= static_cast<double>(space.n_dims - i) / static_cast<double>(i + 1);
  }
  return std::pow(per_slot, n_slots);
}

void check_enumeration_guard(SpaceConfig space, int n_slots, double max_configs) {
  double count = joint_configuration_count(space, n_slots);
  if (!(count <= max_configs)) {
    throw std::invalid_argument("enumeration would visit " + std::to_string(count) +
                                " joint configurations (guard " + std::to_string(max_configs) +
                                ")");
  }
}

double log_exact_partition(const Model& model, const GraphShape& shape, double max_configs) {
  check_enumeration_guard(model.space, shape.n_nodes, max_configs);
  LogSumAccumulator z;
  for_each_joint_config(model.space, shape.n_nodes, [&](const std::vector<EntityVector>& slots) {
    Situation s{slots, shape.links};
    z.add(-background_energy(s, model));
  });
  return z.value();
}

double exact_partition(const Model& model, const GraphShape& shape, double max_configs) {
  return std::exp(log_exact_partition(model, shape, max_configs));
}

double exact_token_log_likelihood(const Model& model, const GraphToken& token,
                                  double max_configs) {
  check_enumeration_guard(model.space, token.n_nodes(), max_configs);
  LogSumAccumulator z;
  LogSumAccumulator joint;
  for_each_joint_config(model.space, token.n_nodes(), [&](const std::vector<EntityVector>& slots) {
    Situation s{slots, token.links};
    double neg_energy = -background_energy(s, model);
    z.add(neg_energy);
    double log_obs = 0.0;
    for (int slot = 0; slot < token.n_nodes(); ++slot) {
      log_obs += model.log_freq[token.nodes[slot]] +
                 log_truth_probability(slots[slot], token.nodes[slot], model) -
                 log_predicate_norm(slots[slot], model);
    }
    joint.add(neg_energy + log_obs);
  });
  return joint.value() - z.value();
}

double exact_token_likelihood(const Model& model, const GraphToken& token, double max_configs) {
  return std::exp(exact_token_log_likelihood(model, token, max_configs));
}

Vector posterior_over_slot(const Model& model, const GraphToken& token, int slot,
                           const PosteriorOptions& options) {
  if (slot < 0 || slot >= token.n_nodes()) throw std::invalid_argument("slot out of range");
  const int n_slots = token.n_nodes();
  const int n_preds = model.n_preds();

  if (joint_configuration_count(model.space, n_slots) <= options.max_configs) {
    // Exact: accumulate the posterior mass of each configuration of the
    // unobserved slot, then average the choice distribution under it.
    LogSumAccumulator total;
    std::vector<LogSumAccumulator> slot_mass;
    std::vector<EntityVector> slot_configs = all_configs(model.space);
    slot_mass.resize(slot_configs.size());
    for_each_joint_config(
        model.space, n_slots, [&](const std::vector<EntityVector>& slots) {
          Situation s{slots, token.links};
          double log_w = -background_energy(s, model);
          for (int k = 0; k < n_slots; ++k) {
            if (k == slot) continue;
            log_w += model.log_freq[token.nodes[k]] +
                     log_truth_probability(slots[k], token.nodes[k], model) -
                     log_predicate_norm(slots[k], model);
          }
          total.add(log_w);
          // Identify the unobserved slot's configuration by position in the
          // lexicographic order.
          auto it = std::lower_bound(slot_configs.begin(), slot_configs.end(), slots[slot],
                                     [](const EntityVector& a, const EntityVector& b) {
                                       return a.active < b.active;
                                     });
          slot_mass[it - slot_configs.begin()].add(log_w);
        });
    Vector posterior = Vector::Zero(n_preds);
    for (std::size_t a = 0; a < slot_configs.size(); ++a) {
      double mass = std::exp(slot_mass[a].value() - total.value());
      if (mass <= 0.0) continue;
      posterior += mass * predicate_choice(slot_configs[a], model);
    }
    return posterior / posterior.sum();
  }

  if (options.n_samples <= 0) {
    throw std::invalid_argument(
        "enumeration guard exceeded and no sampling budget given (set n_samples)");
  }

  // Sampling fallback: MH over entities at observed slots (exact choice
  // normaliser), exact conditional draws at the unobserved slot, averaging
  // the choice distribution there.
  Rng rng(derive_seed(options.seed, {0x906u, static_cast<std::uint64_t>(slot)}));
  LatentState state;
  const CardinalityTable flat(Vector::Zero(model.n_dims()), model.cardinality());
  for (int k = 0; k < n_slots; ++k) {
    state.entities.push_back(flat.sample(rng));
    state.neg_predicates.push_back(0);
  }
  AveragePredicate avg = average_predicate(model);
  Vector posterior = Vector::Zero(n_preds);
  Situation situation{state.entities, token.links};
  for (std::int64_t it = 0; it < options.burnin + options.n_samples; ++it) {
    for (int k = 0; k < n_slots; ++k) {
      if (k == slot) continue;
      for (int s = 0; s < options.steps_per_variable; ++s) {
        mh_entity_step(k, token, state, model, avg, ZxMode::kExact, rng);
      }
    }
    situation.entities = state.entities;
    state.entities[slot] =
        sample_cardinality(potentials_for_slot(slot, situation, model), model.cardinality(), rng);
    if (it >= options.burnin) posterior += predicate_choice(state.entities[slot], model);
  }
  return posterior / posterior.sum();
}

GradientAccumulator exact_gradient(const Model& model, const GraphToken& token,
                                   double max_configs) {
  check_enumeration_guard(model.space, token.n_nodes(), max_configs);
  const int n_slots = token.n_nodes();

  // First pass: total weights for the conditional and background measures.
  LogSumAccumulator log_z;
  LogSumAccumulator log_obs_total;
  for_each_joint_config(model.space, n_slots, [&](const std::vector<EntityVector>& slots) {
    Situation s{slots, token.links};
    double neg_energy = -background_energy(s, model);
    log_z.add(neg_energy);
    double log_obs = neg_energy;
    for (int k = 0; k < n_slots; ++k) {
      log_obs += model.log_freq[token.nodes[k]] +
                 log_truth_probability(slots[k], token.nodes[k], model) -
                 log_predicate_norm(slots[k], model);
    }
    log_obs_total.add(log_obs);
  });

  GradientAccumulator acc = ParamTensors::zeros_like(model);
  for_each_joint_config(model.space, n_slots, [&](const std::vector<EntityVector>& slots) {
    Situation s{slots, token.links};
    double neg_energy = -background_energy(s, model);
    double log_obs = neg_energy;
    for (int k = 0; k < n_slots; ++k) {
      log_obs += model.log_freq[token.nodes[k]] +
                 log_truth_probability(slots[k], token.nodes[k], model) -
                 log_predicate_norm(slots[k], model);
    }
    // Posterior weight P(s | observed predicates).
    double w_cond = std::exp(log_obs - log_obs_total.value());
    add_background_gradient(s, acc, w_cond);
    for (int k = 0; k < n_slots; ++k) {
      add_predicate_gradient(slots[k], token.nodes[k], model, acc, w_cond);
      Vector choice = predicate_choice(slots[k], model);
      for (int c = 0; c < model.n_preds(); ++c) {
        add_predicate_gradient(slots[k], c, model, acc, -w_cond * choice[c]);
      }
    }
    // Background weight P(s).
    double w_bg = std::exp(neg_energy - log_z.value());
    add_background_gradient(s, acc, -w_bg);
  });
  return acc;
}

ExactEvaluator::ExactEvaluator(const Model& model, double max_configs)
    : model_(model), max_configs_(max_configs) {
  check_enumeration_guard(model.space, 1, max_configs);
  configs_ = all_configs(model.space);
  const auto s = static_cast<int>(configs_.size());

  Matrix indicators(model.n_dims(), s);
  for (int a = 0; a < s; ++a) indicators.col(a) = configs_[a].indicator(model.n_dims());

  bias_sum_ = indicators.transpose() * model.dim_bias;

  Matrix logits = model.pred_w.transpose() * indicators;  // |V| x S
  logits.colwise() -= model.pred_b;
  log_choice_ = logits.array().unaryExpr([](double z) { return log_sigmoid(z); }).matrix();
  log_choice_.colwise() += model.log_freq;
  for (int a = 0; a < s; ++a) {
    double shift = log_choice_.col(a).maxCoeff();
    double log_zx = shift + std::log((log_choice_.col(a).array() - shift).exp().sum());
    log_choice_.col(a).array() -= log_zx;
  }

  link_term_.reserve(model.n_labels());
  for (int l = 0; l < model.n_labels(); ++l) {
    link_term_.push_back(indicators.transpose() * model.link_w[l] * indicators);
  }
}

double ExactEvaluator::log_partition(const GraphShape& shape) {
  for (const auto& [cached_shape, value] : shape_cache_) {
    if (cached_shape == shape) return value;
  }
  check_enumeration_guard(model_.space, shape.n_nodes, max_configs_);
  const auto s = static_cast<std::int64_t>(configs_.size());
  LogSumAccumulator z;
  std::vector<int> idx(shape.n_nodes, 0);
  while (true) {
    double neg_energy = 0.0;
    for (const auto& link : shape.links) neg_energy += link_term_[link.label](idx[link.src], idx[link.tgt]);
    for (int k = 0; k < shape.n_nodes; ++k) neg_energy -= bias_sum_[idx[k]];
    z.add(neg_energy);
    int k = shape.n_nodes - 1;
    while (k >= 0 && ++idx[k] == s) idx[k--] = 0;
    if (k < 0) break;
  }
  shape_cache_.emplace_back(shape, z.value());
  return z.value();
}

double ExactEvaluator::token_log_likelihood(const GraphToken& token) {
  double log_z = log_partition(token.shape());
  const auto s = static_cast<std::int64_t>(configs_.size());
  LogSumAccumulator joint;
  std::vector<int> idx(token.n_nodes(), 0);
  while (true) {
    double log_w = 0.0;
    for (const auto& link : token.links) log_w += link_term_[link.label](idx[link.src], idx[link.tgt]);
    for (int k = 0; k < token.n_nodes(); ++k) {
      log_w += -bias_sum_[idx[k]] + log_choice_(token.nodes[k], idx[k]);
    }
    joint.add(log_w);
    int k = token.n_nodes() - 1;
    while (k >= 0 && ++idx[k] == s) idx[k--] = 0;
    if (k < 0) break;
  }
  return joint.value() - log_z;
}

double ExactEvaluator::mean_log_likelihood(const std::vector<GraphToken>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("no tokens to evaluate");
  double total = 0.0;
  for (const auto& t : tokens) total += token_log_likelihood(t);
  return total / static_cast<double>(tokens.size());
}

}  // namespace semfun
