#include "semfun/model.hpp"

#include <algorithm>

namespace semfun {

Model Model::zeros(SpaceConfig space, LabelTable labels, Vocabulary vocab) {
  space.validate();
  Model m;
  m.space = space;
  m.labels = std::move(labels);
  m.vocab = std::move(vocab);
  const int n = space.n_dims;
  m.link_w.assign(m.labels.size(), Matrix::Zero(n, n));
  m.dim_bias = Vector::Zero(n);
  m.pred_w = Matrix::Zero(n, m.vocab.size());
  m.pred_b = Vector::Zero(m.vocab.size());
  m.refresh_derived();
  return m;
}

void Model::refresh_derived() {
  freq = vocab.frequencies();
  freq_cdf.resize(freq.size());
  double acc = 0.0;
  for (Eigen::Index c = 0; c < freq.size(); ++c) {
    acc += freq[c];
    freq_cdf[c] = acc;
  }
  if (freq.size() > 0) freq_cdf[freq.size() - 1] = 1.0;
  log_freq = freq.array().log();
}

void Model::validate() const {
  space.validate();
  const int n = space.n_dims;
  if (static_cast<int>(link_w.size()) != labels.size()) {
    throw DataError("model has wrong number of link weight matrices");
  }
  for (const auto& w : link_w) {
    if (w.rows() != n || w.cols() != n) throw DataError("link weight matrix has wrong shape");
    if (!w.allFinite()) throw NumericError("non-finite link weight");
    if ((w.array() < 0.0).any()) throw DataError("negative link weight");
  }
  if (dim_bias.size() != n || !dim_bias.allFinite()) {
    throw DataError("dimension bias vector has wrong shape or non-finite entries");
  }
  if (pred_w.rows() != n || pred_w.cols() != vocab.size() || !pred_w.allFinite()) {
    throw DataError("predicate weight matrix has wrong shape or non-finite entries");
  }
  if (pred_b.size() != vocab.size() || !pred_b.allFinite()) {
    throw DataError("predicate bias vector has wrong shape or non-finite entries");
  }
}

double background_energy(const Situation& situation, const Model& model) {
  double neg_energy = 0.0;
  for (const auto& link : situation.links) {
    if (link.label < 0 || link.label >= model.n_labels()) {
      throw std::invalid_argument("unknown link label id " + std::to_string(link.label));
    }
    neg_energy += quad_active(model.link_w[link.label], situation.entities.at(link.src),
                              situation.entities.at(link.tgt));
  }
  for (const auto& entity : situation.entities) {
    neg_energy -= dot_active(model.dim_bias, entity);
  }
  return -neg_energy;
}

double entity_conditional_energy(int slot, const Situation& situation, const Model& model) {
  double neg_energy = 0.0;
  for (const auto& link : situation.links) {
    if (link.src != slot && link.tgt != slot) continue;
    if (link.label < 0 || link.label >= model.n_labels()) {
      throw std::invalid_argument("unknown link label id " + std::to_string(link.label));
    }
    neg_energy += quad_active(model.link_w[link.label], situation.entities.at(link.src),
                              situation.entities.at(link.tgt));
  }
  neg_energy -= dot_active(model.dim_bias, situation.entities.at(slot));
  return -neg_energy;
}

double truth_probability(const EntityVector& x, PredicateId c, const Model& model) {
  return sigmoid(dot_active(model.pred_w.col(c), x) - model.pred_b[c]);
}

double log_truth_probability(const EntityVector& x, PredicateId c, const Model& model) {
  return log_sigmoid(dot_active(model.pred_w.col(c), x) - model.pred_b[c]);
}

double log_predicate_norm(const EntityVector& x, const Model& model) {
  LogSumAccumulator acc;
  for (int c = 0; c < model.n_preds(); ++c) {
    acc.add(model.log_freq[c] + log_truth_probability(x, c, model));
  }
  return acc.value();
}

Vector predicate_choice(const EntityVector& x, const Model& model) {
  if (model.n_preds() == 0) throw std::invalid_argument("empty vocabulary");
  Vector log_scores(model.n_preds());
  for (int c = 0; c < model.n_preds(); ++c) {
    log_scores[c] = model.log_freq[c] + log_truth_probability(x, c, model);
  }
  double shift = log_scores.maxCoeff();
  Vector scores = (log_scores.array() - shift).exp();
  return scores / scores.sum();
}

PredicateId sample_unigram(const Model& model, double u01) {
  const auto& cdf = model.freq_cdf;
  auto it = std::upper_bound(cdf.data(), cdf.data() + cdf.size(), u01);
  auto idx = static_cast<PredicateId>(it - cdf.data());
  if (idx >= model.n_preds()) idx = model.n_preds() - 1;
  return idx;
}

}  // namespace semfun
