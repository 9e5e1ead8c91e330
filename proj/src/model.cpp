#include "s2a/model.hpp"

#include <algorithm>
#include <cmath>

namespace s2a {

std::string AblationFlags::code() const {
  std::string s;
  if (gumbel) s += 'G';
  if (embeddings_as_values) s += 'E';
  if (full_focus) s += 'F';
  if (transcoder) s += 'T';
  return s;
}

AblationFlags AblationFlags::from_code(const std::string& code) {
  AblationFlags f;
  for (char c : code) {
    switch (c) {
      case 'G': case 'g': f.gumbel = true; break;
      case 'E': case 'e': f.embeddings_as_values = true; break;
      case 'F': case 'f': f.full_focus = true; break;
      case 'T': case 't': f.transcoder = true; break;
      default:
        throw ConfigError("unknown ablation flag '" + std::string(1, c) +
                          "' in '" + code + "' (valid: G, E, F, T)");
    }
  }
  return f;
}

void ModelConfig::validate() const {
  if (embedding_dim == 0 || hidden_dim == 0 || num_layers == 0) {
    throw ConfigError("model dims must be positive");
  }
  if (input_vocab_size == 0 || output_vocab_size < 3) {
    throw ConfigError("vocab sizes too small (output needs <sos>, <eos> and "
                      "at least one real token)");
  }
  if (max_decode_len == 0) throw ConfigError("max_decode_len must be >= 1");
  if (temperature <= 0.0) throw ConfigError("temperature must be > 0");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ConfigError("dropout_rate must be in [0, 1)");
  }
  if (flags.full_focus && value_dim() != hidden_dim) {
    throw ConfigError(
        "full_focus multiplies the decoder state by the context vector, so "
        "embedding_dim must equal hidden_dim when embeddings_as_values is "
        "on (got " + std::to_string(embedding_dim) + " vs " +
        std::to_string(hidden_dim) + ")");
  }
}

Model::Model(ModelConfig config, Rng& rng) : config_(std::move(config)) {
  config_.validate();
  const std::size_t emb = config_.embedding_dim;
  const std::size_t hid = config_.hidden_dim;
  emb_in_.emplace(params_, "emb.in", config_.input_vocab_size, emb, rng);
  emb_out_.emplace(params_, "emb.out", config_.output_vocab_size, emb, rng);
  encoder_.emplace(params_, "enc", config_.cell_kind, emb, hid,
                   config_.num_layers, rng);
  if (config_.flags.transcoder) {
    transcoder_.emplace(params_, "trans", config_.cell_kind, emb, hid,
                        config_.num_layers, rng);
  }
  decoder_.emplace(params_, "dec", config_.cell_kind,
                   config_.value_dim() + emb, hid, config_.num_layers, rng);
  attn_w_.emplace(params_, "attn.w", 2 * hid, hid, /*with_bias=*/false, rng);
  attn_v_.emplace(params_, "attn.v", hid, 1, /*with_bias=*/false, rng);
  out_proj_.emplace(params_, "out", hid, config_.output_vocab_size,
                    /*with_bias=*/true, rng);
  if (config_.flags.transcoder) {
    // The decoder starts from a fixed, learned vector rather than the
    // encoder's final state, so the only input information it sees arrives
    // through attention contexts.
    for (std::size_t l = 0; l < config_.num_layers; ++l) {
      init_h_.push_back(
          params_.create("dec.init.h.l" + std::to_string(l), {hid}));
      if (config_.cell_kind == CellType::LSTM) {
        init_c_.push_back(
            params_.create("dec.init.c.l" + std::to_string(l), {hid}));
      }
    }
  }
}

EncoderOutput Model::encode(const std::vector<std::size_t>& input,
                            const ForwardOptions& opts, Rng& rng) const {
  if (input.empty()) throw ConfigError("encode: empty input sequence");
  EncoderOutput out;
  CellState state = encoder_->zero_state();
  for (std::size_t tok : input) {
    Tensor x = emb_in_->lookup(tok);
    auto [y, next] =
        encoder_->step(x, state, config_.dropout_rate, rng, opts.training);
    state = next;
    out.embeddings.push_back(x);
    out.hiddens.push_back(y);
  }
  out.final_state = state;
  return out;
}

Tensor Model::attention_scores(const EncoderOutput& enc,
                               const Tensor& query) const {
  std::vector<Tensor> scores;
  scores.reserve(enc.hiddens.size());
  for (const Tensor& h : enc.hiddens) {
    Tensor hidden = ops::relu(attn_w_->apply(ops::concat({h, query})));
    Tensor score = attn_v_->apply(hidden);  // length-1 vector
    scores.push_back(score);
  }
  return ops::concat(scores);
}

Tensor Model::sample_attention(const Tensor& pi, const ForwardOptions& opts,
                               Rng& rng, const double* noise) const {
  if (!config_.flags.gumbel) return pi;
  if (!opts.training) {
    // Inference: plain argmax, no noise, constant weights.
    return ops::one_hot(pi.numel(), ops::argmax(pi));
  }
  std::vector<double> g(pi.numel());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = noise ? noise[i] : rng.gumbel();
  }
  Tensor noisy = ops::add(ops::log(pi), Tensor::from_vector(std::move(g)));
  Tensor soft = ops::softmax(ops::mul_scalar(noisy, 1.0 / config_.temperature));
  if (opts.sample_mode == SampleMode::Soft) return soft;
  return ops::straight_through(soft);
}

Tensor Model::context_vector(const Tensor& a, const EncoderOutput& enc) const {
  const auto& values =
      config_.flags.embeddings_as_values ? enc.embeddings : enc.hiddens;
  if (a.numel() != values.size()) {
    throw ShapeError("context_vector: " + std::to_string(a.numel()) +
                     " weights for " + std::to_string(values.size()) +
                     " positions");
  }
  return ops::weighted_sum(a, values);
}

CellState Model::initial_decoder_state(const EncoderOutput& enc) const {
  if (!config_.flags.transcoder) return enc.final_state;
  CellState state;
  state.h = init_h_;
  state.c = init_c_;
  return state;
}

ForwardResult Model::forward(const std::vector<std::size_t>& input,
                             const std::vector<std::size_t>* target,
                             const ForwardOptions& opts, Rng& rng) const {
  EncoderOutput enc = encode(input, opts, rng);
  if (opts.zero_encoder_hiddens) {
    for (Tensor& h : enc.hiddens) {
      std::fill(h.value().begin(), h.value().end(), 0.0);
    }
    for (Tensor& h : enc.final_state.h) {
      std::fill(h.value().begin(), h.value().end(), 0.0);
    }
    for (Tensor& c : enc.final_state.c) {
      std::fill(c.value().begin(), c.value().end(), 0.0);
    }
  }

  const bool teacher = target != nullptr && !opts.self_feed;
  const std::size_t max_steps =
      target ? target->size() : config_.max_decode_len;

  ForwardResult result;
  CellState dec_state = initial_decoder_state(enc);
  CellState trans_state = config_.flags.transcoder ? enc.final_state
                                                   : CellState{};
  std::size_t prev_token = Vocab::kSosId;
  for (std::size_t step = 0; step < max_steps; ++step) {
    Tensor prev_emb = emb_out_->lookup(prev_token);

    Tensor query;
    if (config_.flags.transcoder) {
      auto [y, next] = transcoder_->step(prev_emb, trans_state,
                                         config_.dropout_rate, rng,
                                         opts.training);
      trans_state = next;
      query = y;
    } else {
      query = dec_state.h.back();
    }

    Tensor a;
    if (opts.forced_attention) {
      a = Tensor::from_vector(opts.forced_attention->at(step));
    } else {
      Tensor pi = ops::softmax(attention_scores(enc, query));
      const double* noise =
          opts.gumbel_noise ? opts.gumbel_noise->at(step).data() : nullptr;
      a = sample_attention(pi, opts, rng, noise);
    }
    result.attention.push_back(a.value());

    Tensor c = context_vector(a, enc);

    CellState h_in = dec_state;
    if (config_.flags.full_focus) {
      // The state the cell reads is modulated by the fresh context; the
      // stored state stays raw and is re-modulated next step.
      for (Tensor& h : h_in.h) h = ops::mul(h, c);
    }
    Tensor x = ops::concat({c, prev_emb});
    auto [y_dec, next_state] =
        decoder_->step(x, h_in, config_.dropout_rate, rng, opts.training);
    dec_state = next_state;

    Tensor logits = out_proj_->apply(y_dec);
    const std::size_t emitted = ops::argmax(logits);
    result.output_tokens.push_back(emitted);
    if (target) {
      Tensor step_loss = ops::nll_loss(logits, target->at(step));
      result.loss = result.loss.defined() ? ops::add(result.loss, step_loss)
                                          : step_loss;
    }

    prev_token = teacher ? target->at(step) : emitted;
    if (!target && emitted == Vocab::kEosId) break;
  }
  return result;
}

}  // namespace s2a
