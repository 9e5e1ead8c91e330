#pragma once

#include <optional>
#include <string>
#include <vector>

#include "s2a/layers.hpp"
#include "s2a/vocab.hpp"

namespace s2a {

// Architecture toggles. All off is the attention seq2seq baseline; all on is
// the full encoder-transcoder-decoder model.
struct AblationFlags {
  bool gumbel = false;                // G: discrete attention (hard argmax
                                      //    forward, soft gradients)
  bool embeddings_as_values = false;  // E: mix input embeddings, not encoder
                                      //    hidden states, into the context
  bool full_focus = false;            // F: previous decoder state multiplied
                                      //    elementwise by the context
  bool transcoder = false;            // T: separate recurrent module produces
                                      //    attention queries; decoder starts
                                      //    from a learned vector

  static AblationFlags all_on() { return {true, true, true, true}; }
  bool all() const {
    return gumbel && embeddings_as_values && full_focus && transcoder;
  }
  // Compact form like "GET"; empty string for the baseline.
  std::string code() const;
  static AblationFlags from_code(const std::string& code);
  bool operator==(const AblationFlags&) const = default;
};

struct ModelConfig {
  CellType cell_kind = CellType::GRU;
  std::size_t embedding_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t num_layers = 1;
  double dropout_rate = 0.0;
  std::size_t input_vocab_size = 0;
  std::size_t output_vocab_size = 0;  // includes <sos> and <eos>
  std::size_t max_decode_len = 50;
  double temperature = 1.0;
  AblationFlags flags;

  // Width of the vectors mixed by attention.
  std::size_t value_dim() const {
    return flags.embeddings_as_values ? embedding_dim : hidden_dim;
  }
  void validate() const;
};

// How discrete attention behaves during training. Hard is the real model
// (one-hot forward, straight-through gradients); Soft keeps the relaxed
// sample so the whole forward is differentiable for finite-difference tests.
enum class SampleMode { Hard, Soft };

struct ForwardOptions {
  bool training = false;   // enables dropout and attention noise
  bool self_feed = false;  // feed the model's own outputs even with targets
  SampleMode sample_mode = SampleMode::Hard;
  // Test hooks. forced_attention overrides the attention weights per step;
  // gumbel_noise pins the per-step, per-position noise; zero_encoder_hiddens
  // wipes the encoder hidden states after encoding, to prove the decoder
  // depends on them only through the (forced) attention weights.
  const std::vector<std::vector<double>>* forced_attention = nullptr;
  const std::vector<std::vector<double>>* gumbel_noise = nullptr;
  bool zero_encoder_hiddens = false;
};

struct EncoderOutput {
  std::vector<Tensor> embeddings;  // one [emb] row per input position
  std::vector<Tensor> hiddens;     // one [hid] top-layer state per position
  CellState final_state;
};

struct ForwardResult {
  std::vector<std::size_t> output_tokens;  // argmax per step, incl. <eos>
  Tensor loss;  // summed token NLL incl. <eos>; defined iff targets given
  std::vector<std::vector<double>> attention;  // one row per decoder step
};

class Model {
 public:
  Model(ModelConfig config, Rng& rng);

  // `target` (token ids ending with <eos>), when given, fixes the number of
  // decoder steps and produces a loss; the previous token is teacher-forced
  // unless opts.self_feed. Without targets the model feeds itself and stops
  // at <eos> or max_decode_len.
  ForwardResult forward(const std::vector<std::size_t>& input,
                        const std::vector<std::size_t>* target,
                        const ForwardOptions& opts, Rng& rng) const;

  EncoderOutput encode(const std::vector<std::size_t>& input,
                       const ForwardOptions& opts, Rng& rng) const;
  // Scores alpha(s) = v_a . relu(W_a [h_s; query]) as a length-N tensor.
  Tensor attention_scores(const EncoderOutput& enc, const Tensor& query) const;
  // From probabilities pi to attention weights a, per the gumbel flag and
  // mode. `noise` (length N) overrides rng-drawn Gumbel noise when given.
  Tensor sample_attention(const Tensor& pi, const ForwardOptions& opts,
                          Rng& rng, const double* noise) const;
  Tensor context_vector(const Tensor& a, const EncoderOutput& enc) const;

  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  const ModelConfig& config() const { return config_; }

 private:
  CellState initial_decoder_state(const EncoderOutput& enc) const;

  ModelConfig config_;
  ParameterSet params_;
  std::optional<Embedding> emb_in_;
  std::optional<Embedding> emb_out_;  // shared by transcoder and decoder
  std::optional<RecurrentStack> encoder_;
  std::optional<RecurrentStack> transcoder_;
  std::optional<RecurrentStack> decoder_;
  std::optional<Linear> attn_w_;
  std::optional<Linear> attn_v_;
  std::optional<Linear> out_proj_;
  std::vector<Tensor> init_h_;  // learned decoder init, one per layer
  std::vector<Tensor> init_c_;  // LSTM only
};

}  // namespace s2a
