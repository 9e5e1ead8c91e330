#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "s2a/ops.hpp"
#include "s2a/rng.hpp"
#include "s2a/tensor.hpp"

namespace s2a {

enum class CellType { GRU, LSTM };

CellType cell_type_from_string(const std::string& s);
std::string to_string(CellType kind);

// Ordered registry of named trainable tensors. Creation order is fixed by
// construction order, which also fixes the rng draw order, so a given seed
// always produces the same initial weights.
class ParameterSet {
 public:
  Tensor create(const std::string& name, std::vector<std::size_t> shape);
  Tensor get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<std::pair<std::string, Tensor>>& entries() const {
    return entries_;
  }
  std::vector<Tensor> tensors() const;
  std::size_t total_elements() const;

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

// Token id -> dense row of a trainable table. Rows are initialized from
// N(0, 1) scaled by 1/sqrt(dim).
class Embedding {
 public:
  Embedding(ParameterSet& params, const std::string& name,
            std::size_t vocab_size, std::size_t dim, Rng& rng);

  Tensor lookup(std::size_t token_id) const;
  const Tensor& table() const { return table_; }
  std::size_t vocab_size() const { return table_.rows(); }
  std::size_t dim() const { return table_.cols(); }

 private:
  Tensor table_;
};

// y = W x (+ b). Weights initialized from U(-0.08, 0.08), bias zero.
class Linear {
 public:
  Linear(ParameterSet& params, const std::string& name, std::size_t in_dim,
         std::size_t out_dim, bool with_bias, Rng& rng);

  Tensor apply(const Tensor& x) const;
  std::size_t in_dim() const { return weight_.cols(); }
  std::size_t out_dim() const { return weight_.rows(); }

 private:
  Tensor weight_;
  Tensor bias_;  // undefined when constructed without bias
};

// Hidden state of a RecurrentStack: one h per layer, plus one c per layer
// for LSTM cells.
struct CellState {
  std::vector<Tensor> h;
  std::vector<Tensor> c;
};

// Stacked recurrent cells sharing one hidden size. Gate conventions:
//   GRU:  z = sig(Wz[x;h]+bz), r = sig(Wr[x;h]+br),
//         htilde = tanh(Wh[x; r*h]+bh), h' = (1-z)*h + z*htilde
//   LSTM: i,f,o = sig(W[x;h]+b), g = tanh(Wg[x;h]+bg),
//         c' = f*c + i*g, h' = o*tanh(c')
// Weights are U(-0.08, 0.08), biases zero except the LSTM forget gate (+1).
// Dropout acts on the inputs of layers above the first, training mode only.
class RecurrentStack {
 public:
  RecurrentStack(ParameterSet& params, const std::string& name, CellType kind,
                 std::size_t input_dim, std::size_t hidden_dim,
                 std::size_t num_layers, Rng& rng);

  CellState zero_state() const;

  // Advances all layers by one step; the returned output is the top layer's
  // new hidden state.
  std::pair<Tensor, CellState> step(const Tensor& x, const CellState& prev,
                                    double dropout_rate, Rng& rng,
                                    bool training) const;

  CellType kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t num_layers() const { return layers_.size(); }

 private:
  struct LayerParams {
    // GRU order: z, r, h. LSTM order: i, f, o, g.
    std::vector<Tensor> w;
    std::vector<Tensor> b;
  };
  std::pair<Tensor, Tensor> gru_layer(const LayerParams& p, const Tensor& x,
                                      const Tensor& h) const;

  CellType kind_;
  std::size_t input_dim_;
  std::size_t hidden_dim_;
  std::vector<LayerParams> layers_;
};

}  // namespace s2a
