#include "semfun/mcmc.hpp"

#include <cmath>

namespace semfun {
namespace {

/// Conditional log-potential of dimension `dim` for the entity at `slot`:
/// incident link contributions minus the dimension bias, neighbours fixed.
double slot_potential(int dim, int slot, const std::vector<Link>& links,
                      const std::vector<EntityVector>& entities, const Model& model) {
  double theta = -model.dim_bias[dim];
  for (const auto& link : links) {
    const Matrix& w = model.link_w[link.label];
    if (link.src == slot && link.tgt != slot) {
      for (int j : entities[link.tgt].active) theta += w(dim, j);
    } else if (link.tgt == slot && link.src != slot) {
      for (int i : entities[link.src].active) theta += w(i, dim);
    }
  }
  return theta;
}

}  // namespace

AveragePredicate average_predicate(const Model& model, double k) {
  if (model.n_preds() == 0) throw std::invalid_argument("empty vocabulary");
  AveragePredicate avg;
  avg.w_avg = model.pred_w * model.freq;
  avg.k = k;
  return avg;
}

SwapProposal propose_swap(const EntityVector& x, int n_dims, Rng& rng) {
  const int c = x.cardinality();
  if (c <= 0 || c >= n_dims) throw std::invalid_argument("require 0 < cardinality < n_dims");
  SwapProposal p;
  p.off = x.active[rng.uniform_int(c)];
  // Uniform over inactive dims: index the complement without materialising it.
  int pick = rng.uniform_int(n_dims - c);
  int below = 0;
  for (int d : x.active) {
    // Count active dims at or below the current candidate position.
    if (d <= pick + below) {
      ++below;
    } else {
      break;
    }
  }
  p.on = pick + below;
  return p;
}

bool mh_entity_step(int slot, const GraphToken& token, LatentState& state, const Model& model,
                    const AveragePredicate& avg, ZxMode zx_mode, Rng& rng, MhStats* stats) {
  EntityVector& x = state.entities[slot];
  SwapProposal swap = propose_swap(x, model.n_dims(), rng);
  const PredicateId c = token.nodes[slot];

  // Background term: -dE^b restricted to this slot is theta_on - theta_off.
  double log_ratio = slot_potential(swap.on, slot, token.links, state.entities, model) -
                     slot_potential(swap.off, slot, token.links, state.entities, model);

  // Truth-value ratio t_c(x') / t_c(x).
  double logit = dot_active(model.pred_w.col(c), x) - model.pred_b[c];
  double logit_next = logit + model.pred_w(swap.on, c) - model.pred_w(swap.off, c);
  log_ratio += log_sigmoid(logit_next) - log_sigmoid(logit);

  // Predicate-choice normaliser ratio Z_x / Z_x'.
  if (zx_mode == ZxMode::kApprox) {
    log_ratio += avg.k * (avg.w_avg[swap.off] - avg.w_avg[swap.on]);
  } else {
    EntityVector proposed = x;
    proposed.swap_dims(swap.off, swap.on);
    log_ratio += log_predicate_norm(x, model) - log_predicate_norm(proposed, model);
  }

  if (stats) ++stats->entity_proposals;
  double log_accept = std::min(0.0, log_ratio);
  if (std::log(rng.uniform01()) < log_accept) {
    x.swap_dims(swap.off, swap.on);
    if (stats) ++stats->entity_accepts;
    return true;
  }
  return false;
}

bool mh_predicate_step(int slot, const GraphToken& token, LatentState& state, const Model& model,
                       Rng& rng, MhStats* stats) {
  (void)token;
  PredicateId& current = state.neg_predicates[slot];
  PredicateId proposed = sample_unigram(model, rng.uniform01());
  if (stats) ++stats->pred_proposals;
  const EntityVector& x = state.entities[slot];
  double log_ratio =
      log_truth_probability(x, proposed, model) - log_truth_probability(x, current, model);
  double log_accept = std::min(0.0, log_ratio);
  if (std::log(rng.uniform01()) < log_accept) {
    current = proposed;
    if (stats) ++stats->pred_accepts;
    return true;
  }
  return false;
}

void sweep_token(const GraphToken& token, LatentState& state, const Model& model,
                 const AveragePredicate& avg, int steps_per_variable, ZxMode zx_mode, Rng& rng,
                 MhStats* stats) {
  if (steps_per_variable < 1) throw std::invalid_argument("steps_per_variable must be >= 1");
  for (int slot = 0; slot < token.n_nodes(); ++slot) {
    for (int s = 0; s < steps_per_variable; ++s) {
      mh_entity_step(slot, token, state, model, avg, zx_mode, rng, stats);
    }
    for (int s = 0; s < steps_per_variable; ++s) {
      mh_predicate_step(slot, token, state, model, rng, stats);
    }
  }
}

}  // namespace semfun
