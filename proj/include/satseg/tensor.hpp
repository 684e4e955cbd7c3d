#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "satseg/error.hpp"

namespace satseg {

// Dense NCHW tensor. T is float in training/inference and double in
// gradient-check mode.
template <typename T>
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> v;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_), v(size_t(n_) * c_ * h_ * w_, T{}) {}

  size_t size() const { return v.size(); }
  size_t plane_size() const { return size_t(h) * w; }

  T* plane(int i, int ch) {
    return v.data() + (size_t(i) * c + ch) * plane_size();
  }
  const T* plane(int i, int ch) const {
    return v.data() + (size_t(i) * c + ch) * plane_size();
  }

  T& at(int i, int ch, int y, int x) {
    return v[((size_t(i) * c + ch) * h + y) * w + x];
  }
  T at(int i, int ch, int y, int x) const {
    return v[((size_t(i) * c + ch) * h + y) * w + x];
  }

  bool same_shape(const Tensor4& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }

  void fill(T value) { std::fill(v.begin(), v.end(), value); }

  bool all_finite() const {
    for (T x : v)
      if (!std::isfinite(double(x))) return false;
    return true;
  }

  template <typename U>
  Tensor4<U> cast() const {
    Tensor4<U> out(n, c, h, w);
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = U(v[i]);
    return out;
  }
};

// Named view of one parameter tensor and its gradient.
template <typename T>
struct ParamView {
  std::string name;
  std::vector<int> shape;
  std::vector<T>* data = nullptr;
  std::vector<T>* grad = nullptr;  // null for non-trainable state
};

}  // namespace satseg
