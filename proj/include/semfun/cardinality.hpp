#pragma once

#include "semfun/common.hpp"
#include "semfun/model.hpp"
#include "semfun/rng.hpp"
#include "semfun/types.hpp"

namespace semfun {

/// Exact inference for one entity under the fixed-cardinality constraint:
/// P(x) proportional to exp(theta . x) over |x| = C.  The chain-structured
/// belief propagation of the cardinality constraint reduces to a prefix-count
/// dynamic program; this class holds its table for repeated sampling and
/// marginal queries.  O(N*C) time and memory.
class CardinalityTable {
 public:
  CardinalityTable(const Vector& theta, int cardinality);

  double log_partition() const { return suffix_(0, c_); }

  /// Exact sample by backward scanning through the table.
  EntityVector sample(Rng& rng) const;

  /// Exact per-dimension activation marginals; sums to the cardinality.
  Vector marginals() const;

  int n_dims() const { return n_; }
  int cardinality() const { return c_; }

 private:
  int n_;
  int c_;
  Vector theta_;
  // suffix_(i, k) = log sum over subsets of dims {i..N-1} with k active.
  Matrix suffix_;
};

/// log sum_{|x|=C} exp(theta . x).
double log_partition_cardinality(const Vector& theta, int cardinality);

/// One exact draw from P(x) proportional to exp(theta . x), |x| = C.
EntityVector sample_cardinality(const Vector& theta, int cardinality, Rng& rng);

/// Exact activation marginals of the cardinality-constrained distribution
/// with per-dimension log-potentials `theta` (mean-field vector when theta is
/// a predicate's weight vector).
Vector cardinality_marginals(const Vector& theta, int cardinality);

/// Mean-field entity vector for a predicate's weight vector.
inline Vector mean_field_vector(const Vector& pred_weights, int cardinality) {
  return cardinality_marginals(pred_weights, cardinality);
}

/// Per-dimension log-linear potentials for the entity at `slot` with all
/// neighbours fixed: incident link contributions minus the dimension bias.
/// exp(theta . x) is proportional to the conditional probability of x.
Vector potentials_for_slot(int slot, const Situation& situation, const Model& model);

/// One full pass of exact conditional resampling, visiting entities in index
/// order.  This is the fantasy-particle transition kernel.
void resample_situation_sweep(Situation& situation, const Model& model, Rng& rng);

/// Runs `sweeps` passes and returns the updated situation.
Situation resample_situation(Situation situation, const Model& model, int sweeps, Rng& rng);

}  // namespace semfun
