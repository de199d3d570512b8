#pragma once

#include <filesystem>

#include "semfun/model.hpp"
#include "semfun/trainer.hpp"

namespace semfun {

// Model container, two interchangeable encodings that round-trip bit-exactly:
// canonical JSON (interchange, fixtures) and length-prefixed little-endian
// binary (fast path).  Array order: dim_bias, per-label link weights
// (row-major), predicate weights and biases in vocabulary-id order.

void save_model_json(const Model& model, const std::filesystem::path& path);
Model load_model_json(const std::filesystem::path& path);

void save_model_binary(const Model& model, const std::filesystem::path& path);
Model load_model_binary(const std::filesystem::path& path);

/// Writes JSON when the extension is .json, binary otherwise.
void save_model(const Model& model, const std::filesystem::path& path);

/// Sniffs the encoding (binary magic vs leading '{').
Model load_model(const std::filesystem::path& path);

// Checkpoint = model file + sidecar at `<model path>.state` holding the
// AdaGrad accumulators, fantasy particles, per-token latent chains, epoch
// counter and master seed: everything needed for bit-exact resume.

void save_checkpoint(const TrainState& state, const std::filesystem::path& model_path);
TrainState load_checkpoint(const std::filesystem::path& model_path);

}  // namespace semfun
