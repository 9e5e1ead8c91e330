#include "s2a/ops.hpp"

#include <algorithm>
#include <cmath>

namespace s2a::ops {
namespace {

std::shared_ptr<Node> make_node(std::vector<std::size_t> shape,
                                std::vector<std::shared_ptr<Node>> parents) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value.resize(node->numel());
  node->parents = std::move(parents);
  for (const auto& p : node->parents) {
    if (p->requires_grad) {
      node->requires_grad = true;
      break;
    }
  }
  return node;
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " +
                     shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()) + " differ");
  }
}

void check_1d(const char* op, const Tensor& a) {
  if (a.shape().size() != 1) {
    throw ShapeError(std::string(op) + ": expected a 1d tensor, got shape " +
                     shape_to_string(a.shape()));
  }
}

void check_2d(const char* op, const Tensor& a) {
  if (a.shape().size() != 2) {
    throw ShapeError(std::string(op) + ": expected a 2d tensor, got shape " +
                     shape_to_string(a.shape()));
  }
}

// Elementwise op with custom forward value and local derivative df(value).
template <typename Fwd, typename Dfn>
Tensor unary_elementwise(const Tensor& a, Fwd fwd, Dfn dfn) {
  auto node = make_node(a.shape(), {a.node()});
  const std::size_t n = node->numel();
  for (std::size_t i = 0; i < n; ++i) node->value[i] = fwd(a.value()[i]);
  if (node->requires_grad) {
    auto pa = a.node();
    node->backward_fn = [pa, dfn](Node& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        pa->grad[i] += self.grad[i] * dfn(pa->value[i], self.value[i]);
      }
    };
  }
  return Tensor(node);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  auto node = make_node(a.shape(), {a.node(), b.node()});
  const std::size_t n = node->numel();
  for (std::size_t i = 0; i < n; ++i) {
    node->value[i] = a.value()[i] + b.value()[i];
  }
  if (node->requires_grad) {
    auto pa = a.node();
    auto pb = b.node();
    node->backward_fn = [pa, pb](Node& self) {
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          pa->grad[i] += self.grad[i];
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          pb->grad[i] += self.grad[i];
        }
      }
    };
  }
  return Tensor(node);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  auto node = make_node(a.shape(), {a.node(), b.node()});
  const std::size_t n = node->numel();
  for (std::size_t i = 0; i < n; ++i) {
    node->value[i] = a.value()[i] - b.value()[i];
  }
  if (node->requires_grad) {
    auto pa = a.node();
    auto pb = b.node();
    node->backward_fn = [pa, pb](Node& self) {
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          pa->grad[i] += self.grad[i];
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          pb->grad[i] -= self.grad[i];
        }
      }
    };
  }
  return Tensor(node);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  auto node = make_node(a.shape(), {a.node(), b.node()});
  const std::size_t n = node->numel();
  for (std::size_t i = 0; i < n; ++i) {
    node->value[i] = a.value()[i] * b.value()[i];
  }
  if (node->requires_grad) {
    auto pa = a.node();
    auto pb = b.node();
    node->backward_fn = [pa, pb](Node& self) {
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          pa->grad[i] += self.grad[i] * pb->value[i];
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          pb->grad[i] += self.grad[i] * pa->value[i];
        }
      }
    };
  }
  return Tensor(node);
}

Tensor add_scalar(const Tensor& a, double c) {
  return unary_elementwise(
      a, [c](double v) { return v + c; },
      [](double, double) { return 1.0; });
}

Tensor mul_scalar(const Tensor& a, double c) {
  return unary_elementwise(
      a, [c](double v) { return v * c; },
      [c](double, double) { return c; });
}

Tensor neg(const Tensor& a) { return mul_scalar(a, -1.0); }

Tensor relu(const Tensor& a) {
  return unary_elementwise(
      a, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& a) {
  return unary_elementwise(
      a, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_elementwise(
      a, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor log(const Tensor& a) {
  return unary_elementwise(
      a, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

Tensor exp(const Tensor& a) {
  return unary_elementwise(
      a, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Tensor sum(const Tensor& a) {
  auto node = make_node({}, {a.node()});
  double total = 0.0;
  for (double v : a.value()) total += v;
  node->value[0] = total;
  if (node->requires_grad) {
    auto pa = a.node();
    node->backward_fn = [pa](Node& self) {
      pa->ensure_grad();
      for (double& g : pa->grad) g += self.grad[0];
    };
  }
  return Tensor(node);
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  check_2d("matvec", w);
  check_1d("matvec", x);
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  if (x.numel() != n) {
    throw ShapeError("matvec: matrix " + shape_to_string(w.shape()) +
                     " does not match vector " + shape_to_string(x.shape()));
  }
  auto node = make_node({m}, {w.node(), x.node()});
  const double* wd = w.value().data();
  const double* xd = x.value().data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* wrow = wd + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += wrow[j] * xd[j];
    node->value[i] = acc;
  }
  if (node->requires_grad) {
    auto pw = w.node();
    auto px = x.node();
    node->backward_fn = [pw, px, m, n](Node& self) {
      const double* g = self.grad.data();
      if (pw->requires_grad) {
        pw->ensure_grad();
        double* wg = pw->grad.data();
        const double* xd = px->value.data();
        for (std::size_t i = 0; i < m; ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          double* wrow = wg + i * n;
          for (std::size_t j = 0; j < n; ++j) wrow[j] += gi * xd[j];
        }
      }
      if (px->requires_grad) {
        px->ensure_grad();
        double* xg = px->grad.data();
        const double* wd = pw->value.data();
        for (std::size_t i = 0; i < m; ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          const double* wrow = wd + i * n;
          for (std::size_t j = 0; j < n; ++j) xg[j] += gi * wrow[j];
        }
      }
    };
  }
  return Tensor(node);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_2d("matmul", a);
  check_2d("matmul", b);
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
  if (b.rows() != k) {
    throw ShapeError("matmul: shapes " + shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()) + " do not chain");
  }
  auto node = make_node({m, n}, {a.node(), b.node()});
  const double* ad = a.value().data();
  const double* bd = b.value().data();
  double* out = node->value.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ad[i * k + p];
      if (av == 0.0) continue;
      const double* brow = bd + p * n;
      double* orow = out + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  if (node->requires_grad) {
    auto pa = a.node();
    auto pb = b.node();
    node->backward_fn = [pa, pb, m, k, n](Node& self) {
      const double* g = self.grad.data();
      if (pa->requires_grad) {
        pa->ensure_grad();
        // dA = G B^T
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            const double* grow = g + i * n;
            const double* brow = pb->value.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            pa->grad[i * k + p] += acc;
          }
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        // dB = A^T G
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double av = pa->value[i * k + p];
            if (av == 0.0) continue;
            const double* grow = g + i * n;
            double* brow = pb->grad.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) brow[j] += av * grow[j];
          }
        }
      }
    };
  }
  return Tensor(node);
}

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat: no tensors given");
  std::size_t total = 0;
  std::vector<std::shared_ptr<Node>> parents;
  parents.reserve(parts.size());
  for (const Tensor& part : parts) {
    check_1d("concat", part);
    total += part.numel();
    parents.push_back(part.node());
  }
  auto node = make_node({total}, std::move(parents));
  std::size_t offset = 0;
  for (const Tensor& part : parts) {
    std::copy(part.value().begin(), part.value().end(),
              node->value.begin() + offset);
    offset += part.numel();
  }
  if (node->requires_grad) {
    node->backward_fn = [](Node& self) {
      std::size_t offset = 0;
      for (const auto& p : self.parents) {
        const std::size_t n = p->numel();
        if (p->requires_grad) {
          p->ensure_grad();
          for (std::size_t i = 0; i < n; ++i) {
            p->grad[i] += self.grad[offset + i];
          }
        }
        offset += n;
      }
    };
  }
  return Tensor(node);
}

Tensor stack_scalars(const std::vector<Tensor>& scalars) {
  if (scalars.empty()) throw ShapeError("stack_scalars: no tensors given");
  std::vector<std::shared_ptr<Node>> parents;
  parents.reserve(scalars.size());
  for (const Tensor& s : scalars) {
    if (!s.shape().empty()) {
      throw ShapeError("stack_scalars: got shape " +
                       shape_to_string(s.shape()) + ", expected scalars");
    }
    parents.push_back(s.node());
  }
  auto node = make_node({scalars.size()}, std::move(parents));
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    node->value[i] = scalars[i].value()[0];
  }
  if (node->requires_grad) {
    node->backward_fn = [](Node& self) {
      for (std::size_t i = 0; i < self.parents.size(); ++i) {
        auto& p = self.parents[i];
        if (p->requires_grad) {
          p->ensure_grad();
          p->grad[0] += self.grad[i];
        }
      }
    };
  }
  return Tensor(node);
}

Tensor row(const Tensor& w, std::size_t i) {
  check_2d("row", w);
  if (i >= w.rows()) {
    throw ShapeError("row: index " + std::to_string(i) +
                     " out of range for shape " + shape_to_string(w.shape()));
  }
  const std::size_t n = w.cols();
  auto node = make_node({n}, {w.node()});
  std::copy(w.value().begin() + i * n, w.value().begin() + (i + 1) * n,
            node->value.begin());
  if (node->requires_grad) {
    auto pw = w.node();
    node->backward_fn = [pw, i, n](Node& self) {
      pw->ensure_grad();
      for (std::size_t j = 0; j < n; ++j) {
        pw->grad[i * n + j] += self.grad[j];
      }
    };
  }
  return Tensor(node);
}

Tensor softmax(const Tensor& a) {
  check_1d("softmax", a);
  auto node = make_node(a.shape(), {a.node()});
  const double mx = *std::max_element(a.value().begin(), a.value().end());
  double denom = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    node->value[i] = std::exp(a.value()[i] - mx);
    denom += node->value[i];
  }
  for (double& v : node->value) v /= denom;
  if (node->requires_grad) {
    auto pa = a.node();
    node->backward_fn = [pa](Node& self) {
      pa->ensure_grad();
      double dot = 0.0;
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        dot += self.grad[i] * self.value[i];
      }
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        pa->grad[i] += self.value[i] * (self.grad[i] - dot);
      }
    };
  }
  return Tensor(node);
}

Tensor nll_loss(const Tensor& logits, std::size_t target) {
  check_1d("nll_loss", logits);
  if (target >= logits.numel()) {
    throw ShapeError("nll_loss: target " + std::to_string(target) +
                     " out of range for shape " +
                     shape_to_string(logits.shape()));
  }
  auto node = make_node({}, {logits.node()});
  const std::size_t n = logits.numel();
  const double mx =
      *std::max_element(logits.value().begin(), logits.value().end());
  double denom = 0.0;
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = std::exp(logits.value()[i] - mx);
    denom += probs[i];
  }
  for (double& p : probs) p /= denom;
  node->value[0] = std::log(denom) + mx - logits.value()[target];
  if (node->requires_grad) {
    auto pl = logits.node();
    node->backward_fn = [pl, probs = std::move(probs), target](Node& self) {
      pl->ensure_grad();
      const double g = self.grad[0];
      for (std::size_t i = 0; i < probs.size(); ++i) {
        pl->grad[i] += g * (probs[i] - (i == target ? 1.0 : 0.0));
      }
    };
  }
  return Tensor(node);
}

Tensor weighted_sum(const Tensor& weights, const std::vector<Tensor>& items) {
  check_1d("weighted_sum", weights);
  if (items.size() != weights.numel()) {
    throw ShapeError("weighted_sum: " + std::to_string(items.size()) +
                     " items for " + std::to_string(weights.numel()) +
                     " weights");
  }
  const std::size_t d = items.front().numel();
  std::vector<std::shared_ptr<Node>> parents = {weights.node()};
  for (const Tensor& item : items) {
    check_1d("weighted_sum", item);
    if (item.numel() != d) {
      throw ShapeError("weighted_sum: item shapes differ: " +
                       shape_to_string(items.front().shape()) + " vs " +
                       shape_to_string(item.shape()));
    }
    parents.push_back(item.node());
  }
  auto node = make_node({d}, std::move(parents));
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double wi = weights.value()[i];
    if (wi == 0.0) continue;
    const double* vi = items[i].value().data();
    for (std::size_t j = 0; j < d; ++j) node->value[j] += wi * vi[j];
  }
  if (node->requires_grad) {
    node->backward_fn = [d](Node& self) {
      auto& pw = self.parents[0];
      const double* g = self.grad.data();
      if (pw->requires_grad) {
        pw->ensure_grad();
        for (std::size_t i = 1; i < self.parents.size(); ++i) {
          const double* vi = self.parents[i]->value.data();
          double acc = 0.0;
          for (std::size_t j = 0; j < d; ++j) acc += g[j] * vi[j];
          pw->grad[i - 1] += acc;
        }
      }
      for (std::size_t i = 1; i < self.parents.size(); ++i) {
        auto& pi = self.parents[i];
        if (!pi->requires_grad) continue;
        const double wi = pw->value[i - 1];
        pi->ensure_grad();
        for (std::size_t j = 0; j < d; ++j) pi->grad[j] += g[j] * wi;
      }
    };
  }
  return Tensor(node);
}

Tensor detach(const Tensor& a) {
  auto node = std::make_shared<Node>();
  node->shape = a.shape();
  node->value = a.value();
  node->requires_grad = false;
  return Tensor(node);
}

Tensor dropout(const Tensor& a, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout: rate " + std::to_string(rate) +
                      " outside [0, 1)");
  }
  if (!training || rate == 0.0) return a;
  const double scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(a.numel());
  for (double& m : mask) m = rng.uniform01() >= rate ? scale : 0.0;
  auto node = make_node(a.shape(), {a.node()});
  for (std::size_t i = 0; i < mask.size(); ++i) {
    node->value[i] = a.value()[i] * mask[i];
  }
  if (node->requires_grad) {
    auto pa = a.node();
    node->backward_fn = [pa, mask = std::move(mask)](Node& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < mask.size(); ++i) {
        pa->grad[i] += self.grad[i] * mask[i];
      }
    };
  }
  return Tensor(node);
}

Tensor straight_through(const Tensor& a) {
  check_1d("straight_through", a);
  auto node = make_node(a.shape(), {a.node()});
  node->value.assign(a.numel(), 0.0);
  node->value[argmax(a)] = 1.0;
  if (node->requires_grad) {
    auto pa = a.node();
    node->backward_fn = [pa](Node& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        pa->grad[i] += self.grad[i];
      }
    };
  }
  return Tensor(node);
}

std::size_t argmax(const Tensor& a) {
  if (a.numel() == 0) throw ShapeError("argmax: empty tensor");
  return static_cast<std::size_t>(
      std::max_element(a.value().begin(), a.value().end()) -
      a.value().begin());
}

Tensor one_hot(std::size_t n, std::size_t index) {
  if (index >= n) {
    throw ShapeError("one_hot: index " + std::to_string(index) +
                     " out of range for length " + std::to_string(n));
  }
  std::vector<double> v(n, 0.0);
  v[index] = 1.0;
  return Tensor::from_vector(std::move(v));
}

}  // namespace s2a::ops
