#pragma once

#include <string>
#include <vector>

#include "satseg/rng.hpp"
#include "satseg/tensor.hpp"

namespace satseg {

// Differentiable building blocks. Each layer caches what its backward pass
// needs during a training-mode forward; backward consumes the cache and
// returns the gradient w.r.t. the layer input.

template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  // kernel k x k, zero padding `pad`; output dims equal input dims when
  // pad = (k-1)/2.
  Conv2d(std::string name, int in_c, int out_c, int k, int pad);

  void init_he_uniform(Rng rng);
  Tensor4<T> forward(const Tensor4<T>& x, bool train);
  Tensor4<T> backward(const Tensor4<T>& dy);

  void collect_params(std::vector<ParamView<T>>& out);
  int in_channels() const { return in_c_; }
  int out_channels() const { return out_c_; }

 private:
  std::string name_;
  int in_c_ = 0, out_c_ = 0, k_ = 3, pad_ = 1;
  std::vector<T> w_, b_, gw_, gb_;
  Tensor4<T> x_;  // cached input
};

template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(std::string name, int channels, T eps, T momentum);

  // Train mode standardizes with batch statistics and updates the running
  // estimates; eval mode uses the stored running estimates.
  Tensor4<T> forward(const Tensor4<T>& x, bool train);
  Tensor4<T> backward(const Tensor4<T>& dy);

  void collect_params(std::vector<ParamView<T>>& out);
  void collect_state(std::vector<ParamView<T>>& out);
  void set_update_running_stats(bool on) { update_running_ = on; }

 private:
  std::string name_;
  int c_ = 0;
  T eps_ = T(1e-5), momentum_ = T(0.1);
  bool update_running_ = true;
  std::vector<T> gamma_, beta_, ggamma_, gbeta_;
  std::vector<T> running_mean_, running_var_;
  // cache
  Tensor4<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
class Elu {
 public:
  explicit Elu(T alpha = T(1)) : alpha_(alpha) {}
  Tensor4<T> forward(const Tensor4<T>& x, bool train);
  Tensor4<T> backward(const Tensor4<T>& dy);

 private:
  T alpha_;
  Tensor4<T> y_;
};

template <typename T>
class MaxPool2 {
 public:
  Tensor4<T> forward(const Tensor4<T>& x, bool train);
  Tensor4<T> backward(const Tensor4<T>& dy);

 private:
  int in_h_ = 0, in_w_ = 0;
  std::vector<int32_t> argmax_;  // flat plane index of each winner
};

template <typename T>
class UpsampleNearest2 {
 public:
  Tensor4<T> forward(const Tensor4<T>& x);
  Tensor4<T> backward(const Tensor4<T>& dy);

 private:
  int in_h_ = 0, in_w_ = 0;
};

template <typename T>
class Sigmoid {
 public:
  Tensor4<T> forward(const Tensor4<T>& x, bool train);
  Tensor4<T> backward(const Tensor4<T>& dy);

 private:
  Tensor4<T> y_;
};

// Drops a fixed border from each side. Backward re-embeds into zeros, so no
// gradient reaches the cropped-away region.
template <typename T>
class CenterCrop {
 public:
  explicit CenterCrop(int crop = 0) : crop_(crop) {}
  Tensor4<T> forward(const Tensor4<T>& x);
  Tensor4<T> backward(const Tensor4<T>& dy);

 private:
  int crop_ = 0;
  int in_h_ = 0, in_w_ = 0;
};

template <typename T>
Tensor4<T> concat_channels(const Tensor4<T>& a, const Tensor4<T>& b);

template <typename T>
void split_channels(const Tensor4<T>& d, int c_first, Tensor4<T>& da,
                    Tensor4<T>& db);

}  // namespace satseg
