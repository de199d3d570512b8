#pragma once

#include <cstdint>

#include "semfun/model.hpp"
#include "semfun/rng.hpp"
#include "semfun/types.hpp"

namespace semfun {

/// Data-conditioned latent variables for one training token: an entity
/// vector per node and a negative (latent) predicate per node.
struct LatentState {
  std::vector<EntityVector> entities;
  std::vector<PredicateId> neg_predicates;
};

/// Frequency-weighted average of all predicate weight vectors, used by the
/// approximate predicate-choice normaliser ratio.  `k` is the ratio's
/// exposed constant.
struct AveragePredicate {
  Vector w_avg;
  double k = 1.0;
};

AveragePredicate average_predicate(const Model& model, double k = 1.0);

/// How the Z_x ratio in the entity acceptance probability is computed:
/// the averaged-predicate approximation (training default) or the exact
/// sum over the vocabulary (small vocabularies, tests, queries).
enum class ZxMode { kApprox, kExact };

/// Uniform one-on/one-off swap proposal; symmetric by construction.
struct SwapProposal {
  int off = -1;
  int on = -1;
};

SwapProposal propose_swap(const EntityVector& x, int n_dims, Rng& rng);

struct MhStats {
  std::int64_t entity_proposals = 0;
  std::int64_t entity_accepts = 0;
  std::int64_t pred_proposals = 0;
  std::int64_t pred_accepts = 0;

  void operator+=(const MhStats& other) {
    entity_proposals += other.entity_proposals;
    entity_accepts += other.entity_accepts;
    pred_proposals += other.pred_proposals;
    pred_accepts += other.pred_accepts;
  }
  double entity_rate() const {
    return entity_proposals ? static_cast<double>(entity_accepts) / entity_proposals : 0.0;
  }
  double pred_rate() const {
    return pred_proposals ? static_cast<double>(pred_accepts) / pred_proposals : 0.0;
  }
};

/// One Metropolis-Hastings step on the latent entity at `slot`, targeting
/// P(x|c) with neighbours fixed at their current latent values.  Returns
/// whether the proposal was accepted.
bool mh_entity_step(int slot, const GraphToken& token, LatentState& state, const Model& model,
                    const AveragePredicate& avg, ZxMode zx_mode, Rng& rng,
                    MhStats* stats = nullptr);

/// One MH step on the latent predicate at `slot`: propose from the unigram
/// distribution, accept on the truth-value ratio.
bool mh_predicate_step(int slot, const GraphToken& token, LatentState& state, const Model& model,
                       Rng& rng, MhStats* stats = nullptr);

/// Per node, in index order: `steps_per_variable` entity steps followed by
/// `steps_per_variable` predicate steps.
void sweep_token(const GraphToken& token, LatentState& state, const Model& model,
                 const AveragePredicate& avg, int steps_per_variable, ZxMode zx_mode, Rng& rng,
                 MhStats* stats = nullptr);

}  // namespace semfun
