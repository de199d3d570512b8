#include "semfun/cardinality.hpp"

namespace semfun {

CardinalityTable::CardinalityTable(const Vector& theta, int cardinality)
    : n_(static_cast<int>(theta.size())), c_(cardinality), theta_(theta) {
  if (c_ <= 0 || c_ >= n_) throw std::invalid_argument("require 0 < cardinality < n_dims");
  if (!theta_.allFinite()) throw NumericError("non-finite unit potentials");
  suffix_ = Matrix::Constant(n_ + 1, c_ + 1, kNegInf);
  // Base row: zero dims left admit only the empty selection.
  suffix_(n_, 0) = 0.0;
  for (int i = n_ - 1; i >= 0; --i) {
    suffix_(i, 0) = 0.0;
    int k_max = std::min(c_, n_ - i);
    for (int k = 1; k <= k_max; ++k) {
      suffix_(i, k) = logaddexp(suffix_(i + 1, k), theta_[i] + suffix_(i + 1, k - 1));
    }
  }
}

EntityVector CardinalityTable::sample(Rng& rng) const {
  EntityVector x;
  x.active.reserve(c_);
  int k = c_;
  for (int i = 0; i < n_ && k > 0; ++i) {
    double log_include = theta_[i] + suffix_(i + 1, k - 1) - suffix_(i, k);
    if (rng.uniform01() < std::exp(log_include)) {
      x.active.push_back(i);
      --k;
    }
  }
  return x;
}

Vector CardinalityTable::marginals() const {
  // prefix(k) = log sum over subsets of dims {0..i-1} with k active,
  // rolled forward one dimension at a time.
  Vector prefix = Vector::Constant(c_ + 1, kNegInf);
  prefix[0] = 0.0;
  const double log_z = log_partition();
  Vector q(n_);
  for (int i = 0; i < n_; ++i) {
    LogSumAccumulator acc;
    for (int k = 0; k < c_; ++k) {
      double rest = suffix_(i + 1, c_ - 1 - k);
      if (prefix[k] == kNegInf || rest == kNegInf) continue;
      acc.add(prefix[k] + theta_[i] + rest);
    }
    q[i] = std::exp(acc.value() - log_z);
    for (int k = std::min(i + 1, c_); k >= 1; --k) {
      prefix[k] = logaddexp(prefix[k], prefix[k - 1] + theta_[i]);
    }
  }
  return q;
}

double log_partition_cardinality(const Vector& theta, int cardinality) {
  return CardinalityTable(theta, cardinality).log_partition();
}

EntityVector sample_cardinality(const Vector& theta, int cardinality, Rng& rng) {
  return CardinalityTable(theta, cardinality).sample(rng);
}

Vector cardinality_marginals(const Vector& theta, int cardinality) {
  return CardinalityTable(theta, cardinality).marginals();
}

Vector potentials_for_slot(int slot, const Situation& situation, const Model& model) {
  Vector theta = -model.dim_bias;
  for (const auto& link : situation.links) {
    if (link.label < 0 || link.label >= model.n_labels()) {
      throw std::invalid_argument("unknown link label id " + std::to_string(link.label));
    }
    const Matrix& w = model.link_w[link.label];
    if (link.src == slot && link.tgt != slot) {
      for (int j : situation.entities.at(link.tgt).active) theta += w.col(j);
    } else if (link.tgt == slot && link.src != slot) {
      for (int i : situation.entities.at(link.src).active) theta += w.row(i).transpose();
    }
  }
  return theta;
}

void resample_situation_sweep(Situation& situation, const Model& model, Rng& rng) {
  for (int slot = 0; slot < situation.n_nodes(); ++slot) {
    Vector theta = potentials_for_slot(slot, situation, model);
    situation.entities[slot] = sample_cardinality(theta, model.cardinality(), rng);
  }
}

Situation resample_situation(Situation situation, const Model& model, int sweeps, Rng& rng) {
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  for (int s = 0; s < sweeps; ++s) resample_situation_sweep(situation, model, rng);
  return situation;
}

}  // namespace semfun
