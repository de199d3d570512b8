#pragma once

#include <vector>

#include "semfun/common.hpp"
#include "semfun/types.hpp"
#include "semfun/vocabulary.hpp"

namespace semfun {

/// Full parameter set: link weight matrices W^(l) (non-negative), global
/// dimension biases b, and per-predicate classifier weights W'^(c) with
/// scalar biases b'^(c).  Predicate c's weights live in pred_w.col(c).
struct Model {
  SpaceConfig space;
  LabelTable labels;
  Vocabulary vocab;

  std::vector<Matrix> link_w;  // one N x N matrix per link label
  Vector dim_bias;             // length N
  Matrix pred_w;               // N x |V|
  Vector pred_b;               // length |V|

  // Derived from vocab, kept alongside the parameters for fast access.
  Vector freq;          // length |V|, sums to 1
  Vector freq_cdf;      // cumulative frequencies for categorical draws
  Vector log_freq;      // length |V|

  static Model zeros(SpaceConfig space, LabelTable labels, Vocabulary vocab);

  int n_dims() const { return space.n_dims; }
  int cardinality() const { return space.cardinality; }
  int n_labels() const { return labels.size(); }
  int n_preds() const { return vocab.size(); }

  /// Recomputes the cached frequency vectors after vocab assignment.
  void refresh_derived();

  /// Checks shapes, finiteness, and link-weight non-negativity.
  void validate() const;
};

/// Sum of w over the active dimensions of x; w may be any vector expression.
template <typename Derived>
double dot_active(const Eigen::MatrixBase<Derived>& w, const EntityVector& x) {
  double s = 0.0;
  for (int d : x.active) s += w(d);
  return s;
}

/// x^T W y over the active index sets of x and y.
template <typename Derived>
double quad_active(const Eigen::MatrixBase<Derived>& w, const EntityVector& x,
                   const EntityVector& y) {
  double s = 0.0;
  for (int i : x.active) {
    for (int j : y.active) s += w(i, j);
  }
  return s;
}

/// Background RBM energy E^b(s); -E^b = sum of link terms minus bias terms.
double background_energy(const Situation& situation, const Model& model);

/// The terms of E^b(s) involving the entity at `slot`: full energy of all
/// incident links plus this entity's bias term, neighbours held fixed.
double entity_conditional_energy(int slot, const Situation& situation, const Model& model);

/// Semantic function value t_c(x) = sigmoid(W'^(c) . x - b'^(c)).
double truth_probability(const EntityVector& x, PredicateId c, const Model& model);
double log_truth_probability(const EntityVector& x, PredicateId c, const Model& model);

/// log Z_x = log sum_c f_c t_c(x): the exact predicate-choice normaliser.
double log_predicate_norm(const EntityVector& x, const Model& model);

/// P(c|x) for every predicate: f_c t_c(x) normalised over the vocabulary.
/// Exact; intended for small vocabularies and evaluation paths.
Vector predicate_choice(const EntityVector& x, const Model& model);

/// Draws one predicate from the unigram frequency distribution.
PredicateId sample_unigram(const Model& model, double u01);

}  // namespace semfun
