#pragma once

#include <memory>
#include <string>

#include "s2a/model.hpp"
#include "s2a/vocab.hpp"

namespace s2a {

// Binary model snapshot (MessagePack): format version, model configuration,
// both vocabularies, and every named parameter with its shape and values.
// Same model state always serializes to the same bytes.
inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Model& model,
                     const Vocab& input_vocab, const Vocab& output_vocab);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  Vocab input_vocab;
  Vocab output_vocab;
};

// Rebuilds the model and restores every parameter; unknown names, missing
// names, or shape mismatches are I/O errors.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace s2a
