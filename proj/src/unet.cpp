#include "satseg/unet.hpp"

#include <cmath>

namespace satseg {

void UNetConfig::validate() const {
  if (in_channels < 1) fail(ErrorCode::ConfigError, "in_channels must be >= 1");
  if (base_channels < 1)
    fail(ErrorCode::ConfigError, "base_channels must be >= 1");
  if (depth < 1) fail(ErrorCode::ConfigError, "depth must be >= 1");
  if (output_crop < 0)
    fail(ErrorCode::ConfigError, "output_crop must be >= 0");
  if (bn_epsilon <= 0) fail(ErrorCode::ConfigError, "bn_epsilon must be > 0");
  if (bn_momentum < 0 || bn_momentum > 1)
    fail(ErrorCode::ConfigError, "bn_momentum must be in [0,1]");
}

int UNetConfig::min_input_side() const {
  int step = 1 << depth;
  int side = step;
  while (side - 2 * output_crop < 1) side += step;
  return side;
}

template <typename T>
UNet<T>::UNet(const UNetConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg.validate();
  Rng root(seed);
  auto B = [&](int level) { return cfg.base_channels << level; };

  enc_.reserve(size_t(cfg.depth));
  pool_.resize(size_t(cfg.depth));
  for (int l = 0; l < cfg.depth; ++l) {
    int in_c = l == 0 ? cfg.in_channels : B(l - 1);
    enc_.emplace_back("enc" + std::to_string(l), in_c, B(l), cfg);
  }
  bottleneck_ = ConvBlock("bottleneck", B(cfg.depth - 1), B(cfg.depth), cfg);

  dec_.resize(size_t(cfg.depth));
  for (int l = cfg.depth - 1; l >= 0; --l) {
    auto& stage = dec_[size_t(l)];
    std::string name = "dec" + std::to_string(l);
    stage.halve = Conv2d<T>(name + ".halve", B(l + 1), B(l), 3, 1);
    stage.block = ConvBlock(name, 2 * B(l), B(l), cfg);
    stage.skip_channels = B(l);
  }
  head_ = Conv2d<T>("head", cfg.base_channels, 1, 1, 0);
  crop_ = CenterCrop<T>(cfg.output_crop);

  // He-uniform kernels, zero biases, identity-initialized BN; one named
  // substream per tensor so adding layers never shifts existing draws.
  auto init_conv = [&](Conv2d<T>& c, const std::string& name) {
    c.init_he_uniform(root.substream(name));
  };
  for (int l = 0; l < cfg.depth; ++l) {
    init_conv(enc_[size_t(l)].conv1, "enc" + std::to_string(l) + ".conv1");
    init_conv(enc_[size_t(l)].conv2, "enc" + std::to_string(l) + ".conv2");
  }
  init_conv(bottleneck_.conv1, "bottleneck.conv1");
  init_conv(bottleneck_.conv2, "bottleneck.conv2");
  for (int l = 0; l < cfg.depth; ++l) {
    auto& stage = dec_[size_t(l)];
    std::string name = "dec" + std::to_string(l);
    init_conv(stage.halve, name + ".halve");
    init_conv(stage.block.conv1, name + ".conv1");
    init_conv(stage.block.conv2, name + ".conv2");
  }
  init_conv(head_, "head");
}

template <typename T>
UNet<T>::ConvBlock::ConvBlock(const std::string& name, int in_c, int out_c,
                              const UNetConfig& cfg)
    : conv1(name + ".conv1", in_c, out_c, 3, 1),
      conv2(name + ".conv2", out_c, out_c, 3, 1),
      bn1(name + ".bn1", out_c, T(cfg.bn_epsilon), T(cfg.bn_momentum)),
      bn2(name + ".bn2", out_c, T(cfg.bn_epsilon), T(cfg.bn_momentum)),
      elu1(T(cfg.elu_alpha)),
      elu2(T(cfg.elu_alpha)) {}

template <typename T>
Tensor4<T> UNet<T>::ConvBlock::forward(const Tensor4<T>& x, bool train) {
  Tensor4<T> t = conv1.forward(x, train);
  t = bn1.forward(t, train);
  t = elu1.forward(t, train);
  t = conv2.forward(t, train);
  t = bn2.forward(t, train);
  return elu2.forward(t, train);
}

template <typename T>
Tensor4<T> UNet<T>::ConvBlock::backward(const Tensor4<T>& dy) {
  Tensor4<T> d = elu2.backward(dy);
  d = bn2.backward(d);
  d = conv2.backward(d);
  d = elu1.backward(d);
  d = bn1.backward(d);
  return conv1.backward(d);
}

template <typename T>
Tensor4<T> UNet<T>::forward(const Tensor4<T>& x, bool train) {
  if (x.c != cfg_.in_channels)
    fail(ErrorCode::ShapeMismatch, "input channel count mismatch");
  int step = 1 << cfg_.depth;
  if (x.h % step != 0 || x.w % step != 0)
    fail(ErrorCode::ShapeMismatch,
         "input spatial dims must be divisible by 2^depth");
  if (x.h - 2 * cfg_.output_crop < 1 || x.w - 2 * cfg_.output_crop < 1)
    fail(ErrorCode::ShapeMismatch, "input too small for the output crop");

  std::vector<Tensor4<T>> skips(size_t(cfg_.depth));
  Tensor4<T> t = x;
  for (int l = 0; l < cfg_.depth; ++l) {
    t = enc_[size_t(l)].forward(t, train);
    skips[size_t(l)] = t;
    t = pool_[size_t(l)].forward(t, train);
  }
  t = bottleneck_.forward(t, train);
  for (int l = cfg_.depth - 1; l >= 0; --l) {
    auto& stage = dec_[size_t(l)];
    Tensor4<T> u = stage.up.forward(t);
    u = stage.halve.forward(u, train);
    t = concat_channels(skips[size_t(l)], u);
    t = stage.block.forward(t, train);
  }
  t = head_.forward(t, train);
  t = sigmoid_.forward(t, train);
  return crop_.forward(t);
}

template <typename T>
Tensor4<T> UNet<T>::backward(const Tensor4<T>& dLdy) {
  Tensor4<T> d = crop_.backward(dLdy);
  d = sigmoid_.backward(d);
  d = head_.backward(d);
  std::vector<Tensor4<T>> skip_grads(size_t(cfg_.depth));
  for (int l = 0; l < cfg_.depth; ++l) {
    auto& stage = dec_[size_t(l)];
    d = stage.block.backward(d);
    Tensor4<T> dskip, dup;
    split_channels(d, stage.skip_channels, dskip, dup);
    skip_grads[size_t(l)] = std::move(dskip);
    dup = stage.halve.backward(dup);
    d = stage.up.backward(dup);
  }
  d = bottleneck_.backward(d);
  for (int l = cfg_.depth - 1; l >= 0; --l) {
    d = pool_[size_t(l)].backward(d);
    // The skip branch adds its gradient to the pooled branch.
    for (size_t i = 0; i < d.size(); ++i)
      d.v[i] += skip_grads[size_t(l)].v[i];
    d = enc_[size_t(l)].backward(d);
  }
  return d;
}

template <typename T>
void UNet<T>::zero_grad() {
  for (auto& p : params())
    if (p.grad) std::fill(p.grad->begin(), p.grad->end(), T(0));
}

template <typename T>
std::vector<ParamView<T>> UNet<T>::params() {
  std::vector<ParamView<T>> out;
  for (auto& block : enc_) {
    block.conv1.collect_params(out);
    block.bn1.collect_params(out);
    block.conv2.collect_params(out);
    block.bn2.collect_params(out);
  }
  bottleneck_.conv1.collect_params(out);
  bottleneck_.bn1.collect_params(out);
  bottleneck_.conv2.collect_params(out);
  bottleneck_.bn2.collect_params(out);
  for (auto& stage : dec_) {
    stage.halve.collect_params(out);
    stage.block.conv1.collect_params(out);
    stage.block.bn1.collect_params(out);
    stage.block.conv2.collect_params(out);
    stage.block.bn2.collect_params(out);
  }
  head_.collect_params(out);
  return out;
}

template <typename T>
std::vector<ParamView<T>> UNet<T>::state() {
  std::vector<ParamView<T>> out;
  for (auto& block : enc_) {
    block.bn1.collect_state(out);
    block.bn2.collect_state(out);
  }
  bottleneck_.bn1.collect_state(out);
  bottleneck_.bn2.collect_state(out);
  for (auto& stage : dec_) {
    stage.block.bn1.collect_state(out);
    stage.block.bn2.collect_state(out);
  }
  return out;
}

template <typename T>
std::vector<ParamView<T>> UNet<T>::all_tensors() {
  auto out = params();
  auto st = state();
  out.insert(out.end(), st.begin(), st.end());
  return out;
}

template <typename T>
void UNet<T>::set_update_running_stats(bool on) {
  for (auto& block : enc_) {
    block.bn1.set_update_running_stats(on);
    block.bn2.set_update_running_stats(on);
  }
  bottleneck_.bn1.set_update_running_stats(on);
  bottleneck_.bn2.set_update_running_stats(on);
  for (auto& stage : dec_) {
    stage.block.bn1.set_update_running_stats(on);
    stage.block.bn2.set_update_running_stats(on);
  }
}

template class UNet<float>;
template class UNet<double>;

}  // namespace satseg
