#include <cmath>
#include <vector>

#include "doctest.h"
#include "fd_check.hpp"
#include "s2a/adam.hpp"
#include "s2a/ops.hpp"
#include "s2a/rng.hpp"
#include "s2a/tensor.hpp"

using namespace s2a;

namespace {

Tensor random_param(Rng& rng, std::vector<std::size_t> shape, double lo = -1.0,
                    double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape), /*requires_grad=*/true);
  for (double& v : t.value()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("tensor construction and accessors") {
  Tensor s = Tensor::scalar(3.5);
  CHECK(s.shape().empty());
  CHECK(s.item() == doctest::Approx(3.5));

  Tensor v = Tensor::from_vector({1.0, 2.0, 3.0});
  CHECK(v.shape() == std::vector<std::size_t>{3});
  CHECK_THROWS_AS(v.item(), ShapeError);

  Tensor m = Tensor::from_matrix(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK_THROWS_AS(Tensor::from_matrix(2, 2, {1.0, 2.0, 3.0}), ShapeError);
}

TEST_CASE("rng determinism and stream independence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform01() == b.uniform01());

  Rng base(7);
  Rng f1 = base.fork(1);
  Rng f2 = base.fork(2);
  Rng f1_again = base.fork(1);
  CHECK(f1.uniform01() == f1_again.uniform01());
  CHECK(f1.uniform01() != f2.uniform01());
  // Forking must not consume state from the parent.
  Rng c(7);
  (void)c.fork(99);
  Rng d(7);
  CHECK(c.uniform01() == d.uniform01());
}

TEST_CASE("rng uniform and normal moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));

  double nsum = 0.0, nsum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    nsum += x;
    nsum2 += x * x;
  }
  CHECK(nsum / n == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
  CHECK(nsum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gumbel transform fixtures and sample mean") {
  // u = 1/e gives -log(-log(1/e)) = -log(1) = 0.
  CHECK(gumbel_from_uniform(1.0 / M_E) == doctest::Approx(0.0).scale(1.0));
  // u = e^{-e} gives -log(e) = -1.
  CHECK(gumbel_from_uniform(std::exp(-M_E)) == doctest::Approx(-1.0));
  // Tiny u is clamped rather than overflowing.
  CHECK(std::isfinite(gumbel_from_uniform(0.0)));

  // Mean of a standard Gumbel is the Euler-Mascheroni constant.
  Rng rng(99);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.gumbel();
  CHECK(sum / n == doctest::Approx(0.5772156649).epsilon(0.02));
}

TEST_CASE("rng uniform_int bounds and shuffle is a permutation") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.uniform_int(7) < 7);
  }
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  rng.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(v != std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("softmax fixture [0, ln 3] -> [0.25, 0.75]") {
  Tensor x = Tensor::from_vector({0.0, std::log(3.0)});
  Tensor y = ops::softmax(x);
  CHECK(y.value()[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(y.value()[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("nll_loss fixture and gradient direction") {
  Tensor logits = Tensor::from_vector({0.0, 0.0}, true);
  Tensor loss = ops::nll_loss(logits, 0);
  CHECK(loss.item() == doctest::Approx(std::log(2.0)));
  backward(loss);
  // d loss / d logits = softmax - onehot(target).
  CHECK(logits.grad()[0] == doctest::Approx(-0.5));
  CHECK(logits.grad()[1] == doctest::Approx(0.5));
}

TEST_CASE("relu derivative at exactly zero is zero") {
  Tensor x = Tensor::from_vector({0.0, -1.0, 2.0}, true);
  backward(ops::sum(ops::relu(x)));
  CHECK(x.grad()[0] == 0.0);
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 1.0);
}

TEST_CASE("matvec and matmul forward fixtures") {
  Tensor w = Tensor::from_matrix(2, 3, {1, 2, 3, 4, 5, 6});
  Tensor x = Tensor::from_vector({1, 0, -1});
  Tensor y = ops::matvec(w, x);
  CHECK(y.value() == std::vector<double>{-2.0, -2.0});
  CHECK_THROWS_AS(ops::matvec(w, Tensor::from_vector({1, 2})), ShapeError);

  Tensor a = Tensor::from_matrix(2, 2, {1, 2, 3, 4});
  Tensor b = Tensor::from_matrix(2, 2, {0, 1, 1, 0});
  Tensor c = ops::matmul(a, b);
  CHECK(c.value() == std::vector<double>{2, 1, 4, 3});
}

TEST_CASE("concat, stack_scalars, row, weighted_sum forward") {
  Tensor a = Tensor::from_vector({1, 2});
  Tensor b = Tensor::from_vector({3});
  CHECK(ops::concat({a, b}).value() == std::vector<double>{1, 2, 3});

  Tensor s1 = Tensor::scalar(4.0);
  Tensor s2 = Tensor::scalar(-1.0);
  CHECK(ops::stack_scalars({s1, s2}).value() == std::vector<double>{4, -1});

  Tensor m = Tensor::from_matrix(2, 2, {1, 2, 3, 4});
  CHECK(ops::row(m, 1).value() == std::vector<double>{3, 4});
  CHECK_THROWS_AS(ops::row(m, 2), ShapeError);

  Tensor w = Tensor::from_vector({0.25, 0.75});
  Tensor i0 = Tensor::from_vector({4, 0});
  Tensor i1 = Tensor::from_vector({0, 8});
  CHECK(ops::weighted_sum(w, {i0, i1}).value() == std::vector<double>{1, 6});
}

TEST_CASE("argmax takes the first index on ties; one_hot bounds") {
  CHECK(ops::argmax(Tensor::from_vector({1, 3, 3, 2})) == 1);
  CHECK(ops::one_hot(3, 2).value() == std::vector<double>{0, 0, 1});
  CHECK_THROWS_AS(ops::one_hot(3, 3), ShapeError);
}

TEST_CASE("straight_through: hard forward, identity backward") {
  Tensor x = Tensor::from_vector({0.1, 0.7, 0.2}, true);
  Tensor a = ops::straight_through(x);
  CHECK(a.value() == std::vector<double>{0, 1, 0});
  // Upstream gradient must pass through unchanged (identity Jacobian).
  Tensor up = Tensor::from_vector({3.0, -2.0, 5.0});
  backward(ops::sum(ops::mul(a, up)));
  CHECK(x.grad() == std::vector<double>{3.0, -2.0, 5.0});
}

TEST_CASE("detach stops gradients exactly") {
  Tensor x = Tensor::from_vector({1.0, 2.0}, true);
  Tensor d = ops::detach(x);
  CHECK(d.value() == x.value());
  CHECK_FALSE(d.requires_grad());
  // Only the undetached path contributes: loss = sum(x * detach(x)),
  // so d loss / d x = detach(x) = x values.
  backward(ops::sum(ops::mul(x, d)));
  CHECK(x.grad() == std::vector<double>{1.0, 2.0});
}

TEST_CASE("dropout semantics") {
  Rng rng(11);
  Tensor x = Tensor::from_vector({1.0, 2.0, 3.0, 4.0}, true);
  // Eval mode and rate 0 are identity (same node, no copy).
  CHECK(ops::dropout(x, 0.5, rng, false).node() == x.node());
  CHECK(ops::dropout(x, 0.0, rng, true).node() == x.node());
  CHECK_THROWS_AS(ops::dropout(x, 1.0, rng, true), ConfigError);
  CHECK_THROWS_AS(ops::dropout(x, -0.1, rng, true), ConfigError);

  // Kept entries are scaled by 1/(1-rate); dropped are exactly zero, and
  // the gradient mask matches the forward mask.
  const double rate = 0.5;
  Tensor big = Tensor::zeros({1000}, true);
  for (double& v : big.value()) v = 1.0;
  Tensor out = ops::dropout(big, rate, rng, true);
  double mean = 0.0;
  for (std::size_t i = 0; i < out.numel(); ++i) {
    const double v = out.value()[i];
    CHECK((v == 0.0 || v == doctest::Approx(2.0)));
    mean += v;
  }
  CHECK(mean / out.numel() == doctest::Approx(1.0).epsilon(0.1));
  backward(ops::sum(out));
  for (std::size_t i = 0; i < big.numel(); ++i) {
    CHECK(big.grad()[i] == out.value()[i]);
  }
}

TEST_CASE("dropout is deterministic for a fixed rng seed") {
  Tensor x = Tensor::zeros({32});
  for (double& v : x.value()) v = 1.0;
  Rng r1(77), r2(77);
  Tensor a = ops::dropout(x, 0.3, r1, true);
  Tensor b = ops::dropout(x, 0.3, r2, true);
  CHECK(a.value() == b.value());
}

TEST_CASE("backward requires a scalar loss and zeroed parameters") {
  Tensor w = Tensor::from_vector({1.0, -2.0}, true);
  CHECK_THROWS_AS(backward(ops::relu(w)), ShapeError);

  backward(ops::sum(ops::mul(w, w)));
  CHECK(w.grad() == std::vector<double>{2.0, -4.0});
  // A second pass without zero_grad must fail loudly, not accumulate.
  CHECK_THROWS_AS(backward(ops::sum(ops::mul(w, w))), Error);
  w.zero_grad();
  backward(ops::sum(ops::mul(w, w)));
  CHECK(w.grad() == std::vector<double>{2.0, -4.0});
}

TEST_CASE("gradients accumulate across uses within one graph") {
  Tensor w = Tensor::from_vector({3.0}, true);
  // loss = w[0] + w[0]^2 -> d/dw = 1 + 2w = 7.
  Tensor loss = ops::add(ops::sum(w), ops::sum(ops::mul(w, w)));
  backward(loss);
  CHECK(w.grad()[0] == doctest::Approx(7.0));
}

TEST_CASE("finite differences agree with analytic gradients across all ops") {
  Rng seeds(2024);
  int trials = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng = seeds.fork(trial);
    const std::size_t n = 2 + rng.uniform_int(3);   // vector length 2..4
    const std::size_t m = 2 + rng.uniform_int(2);   // matrix rows 2..3
    Tensor w = random_param(rng, {m, n});
    Tensor x = random_param(rng, {n});
    Tensor y = random_param(rng, {n});
    Tensor s = random_param(rng, {});
    const std::size_t target = rng.uniform_int(m);
    const std::size_t ri = rng.uniform_int(m);
    auto forward = [&]() {
      Tensor h = ops::matvec(w, ops::add(ops::tanh(x), ops::sigmoid(y)));
      Tensor sm = ops::softmax(h);
      Tensor r = ops::row(w, ri);
      Tensor mix = ops::weighted_sum(sm, std::vector<Tensor>(m, r));
      Tensor joined =
          ops::concat({ops::relu(mix), ops::exp(ops::mul_scalar(x, 0.1)),
                       ops::log(ops::add_scalar(ops::mul(y, y), 1.0))});
      Tensor parts = ops::stack_scalars(
          {ops::sum(joined), ops::mul(s, s), ops::neg(ops::sum(ops::sub(x, y)))});
      return ops::add(ops::nll_loss(h, target), ops::sum(parts));
    };
    const double err = testing::fd_max_rel_err(forward, {w, x, y, s});
    CAPTURE(trial);
    CHECK(err < 1e-4);
    ++trials;
  }
  CHECK(trials == 100);
}

TEST_CASE("finite differences for matmul") {
  Rng rng(314);
  Tensor a = random_param(rng, {3, 2});
  Tensor b = random_param(rng, {2, 4});
  auto forward = [&]() { return ops::sum(ops::tanh(ops::matmul(a, b))); };
  CHECK(testing::fd_max_rel_err(forward, {a, b}) < 1e-4);
}

TEST_CASE("adam matches reference trajectories") {
  // Five steps of constant gradient 1.0 from 0.5.
  Tensor p = Tensor::from_vector({0.5}, true);
  Adam opt({p});
  for (int t = 0; t < 5; ++t) {
    backward(ops::sum(p));  // d sum / d p = 1
    opt.step();
    opt.zero_grad();
  }
  CHECK(opt.step_count() == 5);
  CHECK(p.value()[0] == doctest::Approx(0.49500000005).epsilon(1e-12));

  // Varied gradients, including an exact zero (moments still decay).
  Tensor q = Tensor::from_vector({0.3, -0.2}, true);
  Adam opt2({q});
  const std::vector<std::vector<double>> grads = {
      {0.1, -0.4}, {-0.25, 0.05}, {0.7, 0.0}};
  for (const auto& g : grads) {
    Tensor coeff = Tensor::from_vector(g);
    backward(ops::sum(ops::mul(q, coeff)));
    opt2.step();
    opt2.zero_grad();
  }
  CHECK(q.value()[0] == doctest::Approx(0.2989686068081168).epsilon(1e-12));
  CHECK(q.value()[1] == doctest::Approx(-0.1979848946019655).epsilon(1e-12));
}

TEST_CASE("adam skips parameters that did not receive a gradient") {
  Tensor used = Tensor::from_vector({1.0}, true);
  Tensor unused = Tensor::from_vector({1.0}, true);
  Adam opt({used, unused});
  backward(ops::sum(used));
  opt.step();
  CHECK(used.value()[0] < 1.0);
  CHECK(unused.value()[0] == 1.0);
}
