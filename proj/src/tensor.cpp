#include "s2a/tensor.hpp"

#include <sstream>
#include <unordered_set>

namespace s2a {

std::string shape_to_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->shape = {};
  node->value = {v};
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from_vector(std::vector<double> v, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->shape = {v.size()};
  node->value = std::move(v);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from_matrix(std::size_t rows, std::size_t cols,
                           std::vector<double> data, bool requires_grad) {
  if (data.size() != rows * cols) {
    throw ShapeError("from_matrix: got " + std::to_string(data.size()) +
                     " values for shape " + shape_to_string({rows, cols}));
  }
  auto node = std::make_shared<Node>();
  node->shape = {rows, cols};
  node->value = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value.assign(node->numel(), 0.0);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

double Tensor::item() const {
  if (!node_->shape.empty()) {
    throw ShapeError("item: tensor of shape " + shape_to_string(node_->shape) +
                     " is not a scalar");
  }
  return node_->value[0];
}

std::vector<Node*> topological_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  // Iterative post-order DFS; recursion would overflow on long unrolled
  // sequence graphs.
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next_parent] = stack.back();
    if (next_parent < node->parents.size()) {
      Node* parent = node->parents[next_parent++].get();
      if (visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw Error("backward: undefined tensor");
  if (!loss.shape().empty()) {
    throw ShapeError("backward: loss has shape " +
                     shape_to_string(loss.shape()) + ", expected a scalar");
  }
  std::vector<Node*> order = topological_order(loss.node().get());
  for (Node* node : order) {
    // A leaf that still carries a gradient means the caller forgot to
    // zero_grad() after the previous pass; silently accumulating across
    // passes is the classic source of wrong training curves.
    if (node->requires_grad && node->parents.empty() && !node->grad.empty()) {
      throw Error(
          "backward: parameter of shape " + shape_to_string(node->shape) +
          " still holds a gradient from a previous pass; call zero_grad()");
    }
  }
  loss.node()->ensure_grad();
  loss.node()->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward_fn && !node->grad.empty()) {
      node->backward_fn(*node);
    }
  }
}

}  // namespace s2a
