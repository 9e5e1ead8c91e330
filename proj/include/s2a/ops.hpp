#pragma once

#include <cstddef>
#include <vector>

#include "s2a/rng.hpp"
#include "s2a/tensor.hpp"

// Differentiable operations. Every function builds a graph node whose
// backward_fn accumulates into the parents; outputs require grad iff any
// parent does.
namespace s2a::ops {

// Elementwise; operands must have identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor add_scalar(const Tensor& a, double c);
Tensor mul_scalar(const Tensor& a, double c);
Tensor neg(const Tensor& a);

// relu'(0) is defined as 0.
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor log(const Tensor& a);
Tensor exp(const Tensor& a);

// Sum of all elements, as a scalar.
Tensor sum(const Tensor& a);

// W [m,n] times x [n] -> [m].
Tensor matvec(const Tensor& w, const Tensor& x);
// A [m,k] times B [k,n] -> [m,n].
Tensor matmul(const Tensor& a, const Tensor& b);

// 1d tensors joined end to end.
Tensor concat(const std::vector<Tensor>& parts);
// Scalars joined into a 1d tensor.
Tensor stack_scalars(const std::vector<Tensor>& scalars);
// Row i of matrix w, as 1d; gradient flows into that row only.
Tensor row(const Tensor& w, std::size_t i);

// Max-subtracted softmax over a 1d tensor.
Tensor softmax(const Tensor& a);
// -log softmax(logits)[target], computed via log-sum-exp.
Tensor nll_loss(const Tensor& logits, std::size_t target);

// out[d] = sum_i weights[i] * items[i][d]; items are 1d of equal length.
Tensor weighted_sum(const Tensor& weights, const std::vector<Tensor>& items);

// Same values, no history; gradients stop here.
Tensor detach(const Tensor& a);

// Inverted dropout: in training mode kept entries are scaled by 1/(1-rate)
// so the expectation is unchanged; in eval mode this is the identity.
Tensor dropout(const Tensor& a, double rate, Rng& rng, bool training);

// Forward: one-hot at argmax(a). Backward: identity, as if the hard sample
// were the soft input (straight-through estimator).
Tensor straight_through(const Tensor& a);

// Index of the largest element (first on ties); not a graph operation.
std::size_t argmax(const Tensor& a);

// Constant one-hot vector of length n.
Tensor one_hot(std::size_t n, std::size_t index);

}  // namespace s2a::ops
