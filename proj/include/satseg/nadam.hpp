#pragma once

#include <cstdint>
#include <vector>

#include "satseg/tensor.hpp"

namespace satseg {

struct NadamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam moments with a Nesterov-style lookahead on the first moment:
//   m <- b1*m + (1-b1)*g             v <- b2*v + (1-b2)*g^2
//   mbar = (1-b1)*g/(1-b1^t) + b1*m/(1-b1^(t+1))
//   theta <- theta - lr * mbar / (sqrt(v/(1-b2^t)) + eps)
template <typename T>
class NadamState {
 public:
  NadamState() = default;
  explicit NadamState(const std::vector<ParamView<T>>& params,
                      NadamConfig cfg = {});

  // One update over all parameter tensors; gradients are read from the
  // ParamView grad pointers.
  void step(std::vector<ParamView<T>>& params, T lr);

  int64_t t() const { return t_; }
  const NadamConfig& config() const { return cfg_; }

 private:
  NadamConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

}  // namespace satseg
