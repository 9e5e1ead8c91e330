#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "s2a/error.hpp"

namespace s2a {

// One vertex of the computation graph. Values and gradients are flat
// row-major doubles; shape is empty for scalars, {n} for vectors and
// {rows, cols} for matrices.
struct Node {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  // Empty until backward reaches this node; zero_grad() empties it again.
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward_fn;

  std::size_t numel() const {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
  }

  // Allocates a zero-filled gradient buffer if not already present.
  void ensure_grad() {
    if (grad.empty()) grad.assign(numel(), 0.0);
  }
};

std::string shape_to_string(const std::vector<std::size_t>& shape);

// Value-semantics handle to a graph node. Copies share the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor from_vector(std::vector<double> v, bool requires_grad = false);
  static Tensor from_matrix(std::size_t rows, std::size_t cols,
                            std::vector<double> data,
                            bool requires_grad = false);
  static Tensor zeros(std::vector<std::size_t> shape,
                      bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::shared_ptr<Node>& node() const { return node_; }

  const std::vector<std::size_t>& shape() const { return node_->shape; }
  std::size_t numel() const { return node_->numel(); }
  std::size_t rows() const { return node_->shape.at(0); }
  std::size_t cols() const { return node_->shape.at(1); }
  bool requires_grad() const { return node_->requires_grad; }

  std::vector<double>& value() { return node_->value; }
  const std::vector<double>& value() const { return node_->value; }
  std::vector<double>& grad() { return node_->grad; }
  const std::vector<double>& grad() const { return node_->grad; }

  // Scalar-only accessor; throws ShapeError otherwise.
  double item() const;

  // Drops any stored gradient so the next backward starts clean.
  void zero_grad() { node_->grad.clear(); }

 private:
  std::shared_ptr<Node> node_;
};

// Reverse-mode sweep from a scalar loss. Gradients left over from a previous
// backward are an error: callers must zero_grad() their parameters between
// passes (intentional batch accumulation copies grads out and zeroes them).
void backward(const Tensor& loss);

// Nodes reachable from `root`, parents before children.
std::vector<Node*> topological_order(Node* root);

}  // namespace s2a
