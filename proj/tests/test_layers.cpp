#include <cmath>

#include "doctest.h"
#include "fd_check.hpp"
#include "s2a/layers.hpp"
#include "s2a/ops.hpp"

using namespace s2a;

namespace {

void zero_all(ParameterSet& ps) {
  for (auto& [name, t] : ps.entries()) {
    Tensor tt = t;
    std::fill(tt.value().begin(), tt.value().end(), 0.0);
  }
}

Tensor random_vec(Rng& rng, std::size_t n) {
  Tensor t = Tensor::zeros({n}, true);
  for (double& v : t.value()) v = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("parameter set rejects duplicates and unknown names") {
  ParameterSet ps;
  ps.create("w", {2, 2});
  CHECK_THROWS_AS(ps.create("w", {2, 2}), ConfigError);
  CHECK_THROWS_AS(ps.get("nope"), ConfigError);
  CHECK(ps.contains("w"));
  CHECK(ps.total_elements() == 4);
}

TEST_CASE("embedding lookup is an exact row with row-local gradients") {
  ParameterSet ps;
  Rng rng(1);
  Embedding emb(ps, "emb", 3, 3, rng);
  Tensor table = ps.get("emb");
  std::fill(table.value().begin(), table.value().end(), 0.0);
  for (int i = 0; i < 3; ++i) table.value()[i * 3 + i] = 1.0;

  CHECK(emb.lookup(1).value() == std::vector<double>{0, 1, 0});
  CHECK_THROWS_AS(emb.lookup(3), ShapeError);

  backward(ops::sum(emb.lookup(1)));
  for (std::size_t j = 0; j < 9; ++j) {
    CHECK(table.grad()[j] == (j >= 3 && j < 6 ? 1.0 : 0.0));
  }
  table.zero_grad();

  // Two lookups of the same id hit the same underlying row.
  backward(ops::sum(ops::add(emb.lookup(2), emb.lookup(2))));
  CHECK(table.grad()[8] == 2.0);
}

TEST_CASE("linear fixtures: identity weight and zero weight") {
  ParameterSet ps;
  Rng rng(2);
  Linear lin(ps, "lin", 2, 2, /*with_bias=*/true, rng);
  Tensor w = ps.get("lin.weight");
  Tensor b = ps.get("lin.bias");
  w.value() = {1, 0, 0, 1};
  b.value() = {0, 0};
  Tensor x = Tensor::from_vector({3.0, -4.0});
  CHECK(lin.apply(x).value() == std::vector<double>{3.0, -4.0});

  w.value() = {0, 0, 0, 0};
  b.value() = {5.0, 6.0};
  CHECK(lin.apply(x).value() == std::vector<double>{5.0, 6.0});

  Linear no_bias(ps, "nb", 2, 1, /*with_bias=*/false, rng);
  CHECK_FALSE(ps.contains("nb.bias"));
}

TEST_CASE("initialization ranges") {
  ParameterSet ps;
  Rng rng(3);
  RecurrentStack lstm(ps, "cell", CellType::LSTM, 4, 8, 2, rng);
  Embedding emb(ps, "emb", 50, 16, rng);

  for (const auto& [name, t] : ps.entries()) {
    if (name.find(".weight") != std::string::npos && name != "emb") {
      for (double v : t.value()) {
        CHECK(std::abs(v) <= 0.08);
      }
    }
  }
  // Forget-gate biases start at one, every other bias at zero.
  for (double v : ps.get("cell.l0.f.bias").value()) CHECK(v == 1.0);
  for (double v : ps.get("cell.l1.i.bias").value()) CHECK(v == 0.0);

  // Embedding entries are N(0,1)/sqrt(dim): spread well beyond 0.08.
  double mx = 0.0;
  for (double v : ps.get("emb").value()) mx = std::max(mx, std::abs(v));
  CHECK(mx > 0.1);
  CHECK(mx < 5.0 / std::sqrt(16.0));
}

TEST_CASE("gru zero-weight fixture halves the state") {
  ParameterSet ps;
  Rng rng(4);
  RecurrentStack gru(ps, "gru", CellType::GRU, 3, 2, 1, rng);
  zero_all(ps);

  CellState state;
  state.h.push_back(Tensor::from_vector({0.8, -0.4}));
  Tensor x = Tensor::from_vector({1.0, 2.0, 3.0});
  Rng drop(0);
  auto [y, next] = gru.step(x, state, 0.0, drop, false);
  CHECK(y.value()[0] == doctest::Approx(0.4));
  CHECK(y.value()[1] == doctest::Approx(-0.2));

  // Zero input, zero state, zero weights: everything stays zero.
  auto [y0, n0] = gru.step(Tensor::zeros({3}), gru.zero_state(), 0.0, drop, false);
  CHECK(y0.value() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("lstm zero-weight fixture: c' = c/2, h' = tanh(c/2)/2") {
  ParameterSet ps;
  Rng rng(5);
  RecurrentStack lstm(ps, "lstm", CellType::LSTM, 2, 2, 1, rng);
  zero_all(ps);  // includes the forget-gate bias

  CellState state;
  state.h.push_back(Tensor::from_vector({0.3, 0.1}));
  state.c.push_back(Tensor::from_vector({1.0, -2.0}));
  Rng drop(0);
  auto [y, next] = lstm.step(Tensor::from_vector({0.5, 0.5}), state, 0.0,
                             drop, false);
  CHECK(next.c[0].value()[0] == doctest::Approx(0.5));
  CHECK(next.c[0].value()[1] == doctest::Approx(-1.0));
  CHECK(y.value()[0] == doctest::Approx(0.5 * std::tanh(0.5)));
  CHECK(y.value()[1] == doctest::Approx(0.5 * std::tanh(-1.0)));

  auto [y0, n0] =
      lstm.step(Tensor::zeros({2}), lstm.zero_state(), 0.0, drop, false);
  CHECK(y0.value() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("recurrent stacks match finite differences") {
  for (CellType kind : {CellType::GRU, CellType::LSTM}) {
    for (std::size_t num_layers : {std::size_t{1}, std::size_t{2}}) {
      ParameterSet ps;
      Rng rng(100 + static_cast<int>(kind) * 10 + num_layers);
      RecurrentStack cell(ps, "cell", kind, 3, 2, num_layers, rng);
      Tensor x = random_vec(rng, 3);
      auto forward = [&]() {
        Rng drop(0);
        CellState s = cell.zero_state();
        Tensor out;
        for (int t = 0; t < 3; ++t) {
          auto [y, next] = cell.step(x, s, 0.0, drop, false);
          s = next;
          out = y;
        }
        return ops::sum(ops::mul(out, out));
      };
      std::vector<Tensor> params = ps.tensors();
      params.push_back(x);
      CAPTURE(to_string(kind));
      CAPTURE(num_layers);
      CHECK(testing::fd_max_rel_err(forward, params) < 1e-4);
    }
  }
}

TEST_CASE("dropout applies between layers only, during training only") {
  ParameterSet ps;
  Rng rng(6);
  RecurrentStack gru(ps, "gru", CellType::GRU, 2, 2, 2, rng);
  Tensor x = Tensor::from_vector({0.5, -0.5});

  // Inference ignores the dropout rate entirely.
  Rng d1(9), d2(10);
  auto [ya, sa] = gru.step(x, gru.zero_state(), 0.9, d1, false);
  auto [yb, sb] = gru.step(x, gru.zero_state(), 0.9, d2, false);
  CHECK(ya.value() == yb.value());

  // Training with the same rng seed is reproducible…
  Rng d3(7), d4(7);
  auto [yc, sc] = gru.step(x, gru.zero_state(), 0.5, d3, true);
  auto [yd, sd] = gru.step(x, gru.zero_state(), 0.5, d4, true);
  CHECK(yc.value() == yd.value());

  // …and a single-layer stack never consumes dropout randomness.
  ParameterSet ps1;
  Rng rng1(6);
  RecurrentStack one(ps1, "one", CellType::GRU, 2, 2, 1, rng1);
  Rng d5(3);
  (void)one.step(x, one.zero_state(), 0.5, d5, true);
  Rng fresh(3);
  CHECK(d5.uniform01() == fresh.uniform01());
}
