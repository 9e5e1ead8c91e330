#include "s2a/layers.hpp"

#include <cmath>

namespace s2a {

CellType cell_type_from_string(const std::string& s) {
  if (s == "gru" || s == "GRU") return CellType::GRU;
  if (s == "lstm" || s == "LSTM") return CellType::LSTM;
  throw ConfigError("unknown cell type '" + s + "' (expected gru or lstm)");
}

std::string to_string(CellType kind) {
  return kind == CellType::GRU ? "gru" : "lstm";
}

Tensor ParameterSet::create(const std::string& name,
                            std::vector<std::size_t> shape) {
  if (contains(name)) {
    throw ConfigError("duplicate parameter name '" + name + "'");
  }
  Tensor t = Tensor::zeros(std::move(shape), /*requires_grad=*/true);
  entries_.emplace_back(name, t);
  return t;
}

Tensor ParameterSet::get(const std::string& name) const {
  for (const auto& [n, t] : entries_) {
    if (n == name) return t;
  }
  throw ConfigError("unknown parameter name '" + name + "'");
}

bool ParameterSet::contains(const std::string& name) const {
  for (const auto& [n, t] : entries_) {
    if (n == name) return true;
  }
  return false;
}

std::vector<Tensor> ParameterSet::tensors() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& [n, t] : entries_) out.push_back(t);
  return out;
}

std::size_t ParameterSet::total_elements() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.numel();
  return n;
}

namespace {

void fill_uniform(Tensor& t, Rng& rng) {
  for (double& v : t.value()) v = rng.uniform(-0.08, 0.08);
}

}  // namespace

Embedding::Embedding(ParameterSet& params, const std::string& name,
                     std::size_t vocab_size, std::size_t dim, Rng& rng) {
  table_ = params.create(name, {vocab_size, dim});
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& v : table_.value()) v = rng.normal() * scale;
}

Tensor Embedding::lookup(std::size_t token_id) const {
  return ops::row(table_, token_id);
}

Linear::Linear(ParameterSet& params, const std::string& name,
               std::size_t in_dim, std::size_t out_dim, bool with_bias,
               Rng& rng) {
  weight_ = params.create(name + ".weight", {out_dim, in_dim});
  fill_uniform(weight_, rng);
  if (with_bias) bias_ = params.create(name + ".bias", {out_dim});
}

Tensor Linear::apply(const Tensor& x) const {
  Tensor y = ops::matvec(weight_, x);
  return bias_.defined() ? ops::add(y, bias_) : y;
}

RecurrentStack::RecurrentStack(ParameterSet& params, const std::string& name,
                               CellType kind, std::size_t input_dim,
                               std::size_t hidden_dim, std::size_t num_layers,
                               Rng& rng)
    : kind_(kind), input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (num_layers == 0) throw ConfigError(name + ": num_layers must be >= 1");
  const std::vector<std::string> gates =
      kind == CellType::GRU ? std::vector<std::string>{"z", "r", "h"}
                            : std::vector<std::string>{"i", "f", "o", "g"};
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : hidden_dim;
    LayerParams lp;
    for (const std::string& gate : gates) {
      const std::string base = name + ".l" + std::to_string(l) + "." + gate;
      Tensor w = params.create(base + ".weight", {hidden_dim, in + hidden_dim});
      fill_uniform(w, rng);
      Tensor b = params.create(base + ".bias", {hidden_dim});
      if (kind == CellType::LSTM && gate == "f") {
        for (double& v : b.value()) v = 1.0;
      }
      lp.w.push_back(w);
      lp.b.push_back(b);
    }
    layers_.push_back(std::move(lp));
  }
}

CellState RecurrentStack::zero_state() const {
  CellState state;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    state.h.push_back(Tensor::zeros({hidden_dim_}));
    if (kind_ == CellType::LSTM) state.c.push_back(Tensor::zeros({hidden_dim_}));
  }
  return state;
}

std::pair<Tensor, Tensor> RecurrentStack::gru_layer(const LayerParams& p,
                                                    const Tensor& x,
                                                    const Tensor& h) const {
  Tensor xh = ops::concat({x, h});
  Tensor z = ops::sigmoid(ops::add(ops::matvec(p.w[0], xh), p.b[0]));
  Tensor r = ops::sigmoid(ops::add(ops::matvec(p.w[1], xh), p.b[1]));
  Tensor xrh = ops::concat({x, ops::mul(r, h)});
  Tensor htilde = ops::tanh(ops::add(ops::matvec(p.w[2], xrh), p.b[2]));
  Tensor one_minus_z = ops::add_scalar(ops::neg(z), 1.0);
  Tensor h_new = ops::add(ops::mul(one_minus_z, h), ops::mul(z, htilde));
  return {h_new, h_new};
}

std::pair<Tensor, CellState> RecurrentStack::step(const Tensor& x,
                                                  const CellState& prev,
                                                  double dropout_rate,
                                                  Rng& rng,
                                                  bool training) const {
  if (prev.h.size() != layers_.size()) {
    throw ShapeError("recurrent step: state has " +
                     std::to_string(prev.h.size()) + " layers, stack has " +
                     std::to_string(layers_.size()));
  }
  CellState next;
  Tensor input = x;
  Tensor output;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (l > 0) input = ops::dropout(input, dropout_rate, rng, training);
    if (kind_ == CellType::GRU) {
      auto [y, h_new] = gru_layer(layers_[l], input, prev.h[l]);
      next.h.push_back(h_new);
      output = y;
    } else {
      const LayerParams& p = layers_[l];
      Tensor xh = ops::concat({input, prev.h[l]});
      Tensor i = ops::sigmoid(ops::add(ops::matvec(p.w[0], xh), p.b[0]));
      Tensor f = ops::sigmoid(ops::add(ops::matvec(p.w[1], xh), p.b[1]));
      Tensor o = ops::sigmoid(ops::add(ops::matvec(p.w[2], xh), p.b[2]));
      Tensor g = ops::tanh(ops::add(ops::matvec(p.w[3], xh), p.b[3]));
      Tensor c_new = ops::add(ops::mul(f, prev.c[l]), ops::mul(i, g));
      Tensor h_new = ops::mul(o, ops::tanh(c_new));
      next.h.push_back(h_new);
      next.c.push_back(c_new);
      output = h_new;
    }
    input = output;
  }
  return {output, next};
}

}  // namespace s2a
