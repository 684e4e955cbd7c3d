#pragma once

#include <memory>
#include <string>
#include <vector>

#include "satseg/layers.hpp"

namespace satseg {

struct UNetConfig {
  int in_channels = 16;
  int base_channels = 16;
  int depth = 3;        // number of pooling steps
  int output_crop = 8;  // pixels removed per side by the head crop
  float bn_epsilon = 1e-5f;
  float bn_momentum = 0.1f;
  float elu_alpha = 1.0f;

  void validate() const;
  // Smallest input side the config accepts (divisible by 2^depth and big
  // enough to survive the crop).
  int min_input_side() const;

  friend bool operator==(const UNetConfig&, const UNetConfig&) = default;
};

// Encoder-decoder with skip connections. Feature channels double at each
// down-sampling step; the expansive path upsamples (nearest x2), halves
// channels with a 3x3 conv, concatenates the skip, and applies a conv block.
// Head: 1x1 conv -> sigmoid -> center crop.
template <typename T>
class UNet {
 public:
  UNet(const UNetConfig& cfg, uint64_t seed);

  // Train mode caches activations for backward and refreshes BN running
  // stats; eval mode does neither.
  Tensor4<T> forward(const Tensor4<T>& x, bool train);

  // dLdy matches the forward output (post-crop). Accumulates parameter
  // gradients and returns the gradient w.r.t. the network input.
  Tensor4<T> backward(const Tensor4<T>& dLdy);

  void zero_grad();
  std::vector<ParamView<T>> params();        // trainable
  std::vector<ParamView<T>> state();         // BN running stats
  std::vector<ParamView<T>> all_tensors();   // params then state

  const UNetConfig& config() const { return cfg_; }
  // Gradient checking perturbs parameters repeatedly; keeping running stats
  // frozen makes those forwards side-effect free.
  void set_update_running_stats(bool on);

 private:
  struct ConvBlock {
    Conv2d<T> conv1, conv2;
    BatchNorm2d<T> bn1, bn2;
    Elu<T> elu1, elu2;

    ConvBlock() = default;
    ConvBlock(const std::string& name, int in_c, int out_c,
              const UNetConfig& cfg);
    Tensor4<T> forward(const Tensor4<T>& x, bool train);
    Tensor4<T> backward(const Tensor4<T>& dy);
  };

  struct UpStage {
    UpsampleNearest2<T> up;
    Conv2d<T> halve;
    ConvBlock block;
    int skip_channels = 0;
  };

  UNetConfig cfg_;
  std::vector<ConvBlock> enc_;
  std::vector<MaxPool2<T>> pool_;
  ConvBlock bottleneck_;
  std::vector<UpStage> dec_;  // index l operates at encoder level l
  Conv2d<T> head_;
  Sigmoid<T> sigmoid_;
  CenterCrop<T> crop_;
};

using UNetModel = UNet<float>;

}  // namespace satseg
