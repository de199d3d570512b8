#pragma once

// Independent brute-force oracles for small spaces.  These deliberately do
// not share code with the library paths they check: subsets are generated
// recursively, probabilities are accumulated in plain (non-log) arithmetic,
// and energies are recomputed term by term from the raw parameters.

#include <cmath>
#include <vector>

#include "semfun/model.hpp"
#include "semfun/types.hpp"

namespace oracle {

/// All size-c subsets of {0..n-1}, in lexicographic order, built recursively.
inline void collect_subsets(int n, int c, int start, std::vector<int>& current,
                            std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == c) {
    out.push_back(current);
    return;
  }
  for (int d = start; d <= n - (c - static_cast<int>(current.size())); ++d) {
    current.push_back(d);
    collect_subsets(n, c, d + 1, current, out);
    current.pop_back();
  }
}

inline std::vector<std::vector<int>> subsets(int n, int c) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  collect_subsets(n, c, 0, current, out);
  return out;
}

/// exp(theta . x) for every size-c subset, plain arithmetic.
inline std::vector<double> cardinality_weights(const semfun::Vector& theta, int c) {
  auto all = subsets(static_cast<int>(theta.size()), c);
  std::vector<double> w;
  w.reserve(all.size());
  for (const auto& s : all) {
    double dot = 0.0;
    for (int d : s) dot += theta[d];
    w.push_back(std::exp(dot));
  }
  return w;
}

inline double log_partition(const semfun::Vector& theta, int c) {
  double z = 0.0;
  for (double w : cardinality_weights(theta, c)) z += w;
  return std::log(z);
}

inline std::vector<double> cardinality_marginals(const semfun::Vector& theta, int c) {
  auto all = subsets(static_cast<int>(theta.size()), c);
  auto w = cardinality_weights(theta, c);
  double z = 0.0;
  for (double v : w) z += v;
  std::vector<double> q(theta.size(), 0.0);
  for (std::size_t s = 0; s < all.size(); ++s) {
    for (int d : all[s]) q[d] += w[s] / z;
  }
  return q;
}

/// -E^b recomputed directly from the parameter arrays.
inline double neg_energy(const semfun::Model& model, const std::vector<std::vector<int>>& entities,
                         const std::vector<semfun::Link>& links) {
  double total = 0.0;
  for (const auto& link : links) {
    for (int i : entities[link.src]) {
      for (int j : entities[link.tgt]) total += model.link_w[link.label](i, j);
    }
  }
  for (const auto& entity : entities) {
    for (int i : entity) total -= model.dim_bias[i];
  }
  return total;
}

inline double truth(const semfun::Model& model, const std::vector<int>& entity,
                    semfun::PredicateId c) {
  double z = -model.pred_b[c];
  for (int i : entity) z += model.pred_w(i, c);
  return 1.0 / (1.0 + std::exp(-z));
}

/// P(c | x) by direct normalisation.
inline std::vector<double> choice(const semfun::Model& model, const std::vector<int>& entity) {
  std::vector<double> p(model.n_preds());
  double z = 0.0;
  for (int c = 0; c < model.n_preds(); ++c) {
    p[c] = model.freq[c] * truth(model, entity, c);
    z += p[c];
  }
  for (double& v : p) v /= z;
  return p;
}

/// Joint background distribution over all slot assignments of a shape.
struct JointTable {
  std::vector<std::vector<int>> configs;        // per-slot subset index tuples
  std::vector<double> probs;                    // P(s), same order
  std::vector<std::vector<int>> slot_subsets;   // the shared single-slot space
};

inline JointTable joint_background(const semfun::Model& model, const semfun::GraphShape& shape) {
  JointTable table;
  table.slot_subsets = subsets(model.n_dims(), model.cardinality());
  const auto s = static_cast<int>(table.slot_subsets.size());
  std::vector<int> idx(shape.n_nodes, 0);
  double z = 0.0;
  while (true) {
    std::vector<std::vector<int>> entities;
    entities.reserve(shape.n_nodes);
    for (int k = 0; k < shape.n_nodes; ++k) entities.push_back(table.slot_subsets[idx[k]]);
    double w = std::exp(neg_energy(model, entities, shape.links));
    table.configs.push_back(idx);
    table.probs.push_back(w);
    z += w;
    int k = shape.n_nodes - 1;
    while (k >= 0 && ++idx[k] == s) idx[k--] = 0;
    if (k < 0) break;
  }
  for (double& p : table.probs) p /= z;
  return table;
}

/// P(observed predicates) by the second, separately written enumeration.
inline double token_likelihood(const semfun::Model& model, const semfun::GraphToken& token) {
  auto table = joint_background(model, token.shape());
  double total = 0.0;
  for (std::size_t row = 0; row < table.configs.size(); ++row) {
    double w = table.probs[row];
    for (int k = 0; k < token.n_nodes(); ++k) {
      const auto& entity = table.slot_subsets[table.configs[row][k]];
      w *= choice(model, entity)[token.nodes[k]];
    }
    total += w;
  }
  return total;
}

}  // namespace oracle
