#pragma once

#include <cstdint>
#include <vector>

#include "s2a/tensor.hpp"

namespace s2a {

// Adam with the standard defaults. One optimizer instance owns the moment
// buffers for a fixed parameter list; parameters whose gradient is absent
// in a step are skipped entirely (their moments do not decay).
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, double lr = 1e-3,
                double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  // theta -= lr * m_hat / (sqrt(v_hat) + eps), bias-corrected with the
  // step count incremented before correction (first step uses t = 1).
  void step();
  void zero_grad();

  std::int64_t step_count() const { return step_count_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  std::vector<Tensor> params_;
  double lr_, beta1_, beta2_, eps_;
  std::int64_t step_count_ = 0;
  struct Moments {
    std::vector<double> m, v;
  };
  std::vector<Moments> moments_;
};

}  // namespace s2a
