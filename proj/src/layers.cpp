#include "satseg/layers.hpp"

#include <algorithm>
#include <cmath>

#include "gemm.hpp"

namespace satseg {

namespace {

// col is (in_c*k*k) x (out_h*out_w), row-major.
template <typename T>
void im2col(const T* x, int c, int h, int w, int k, int pad, T* col) {
  const int out_h = h + 2 * pad - k + 1;
  const int out_w = w + 2 * pad - k + 1;
  const size_t hw = size_t(out_h) * out_w;
  for (int ch = 0; ch < c; ++ch) {
    const T* plane = x + size_t(ch) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* row = col + (size_t(ch) * k * k + size_t(ky) * k + kx) * hw;
        for (int oy = 0; oy < out_h; ++oy) {
          int sy = oy - pad + ky;
          T* dst = row + size_t(oy) * out_w;
          if (sy < 0 || sy >= h) {
            std::fill(dst, dst + out_w, T(0));
            continue;
          }
          const T* src = plane + size_t(sy) * w;
          for (int ox = 0; ox < out_w; ++ox) {
            int sx = ox - pad + kx;
            dst[ox] = (sx < 0 || sx >= w) ? T(0) : src[sx];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* col, int c, int h, int w, int k, int pad, T* x) {
  const int out_h = h + 2 * pad - k + 1;
  const int out_w = w + 2 * pad - k + 1;
  const size_t hw = size_t(out_h) * out_w;
  std::fill(x, x + size_t(c) * h * w, T(0));
  for (int ch = 0; ch < c; ++ch) {
    T* plane = x + size_t(ch) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* row = col + (size_t(ch) * k * k + size_t(ky) * k + kx) * hw;
        for (int oy = 0; oy < out_h; ++oy) {
          int sy = oy - pad + ky;
          if (sy < 0 || sy >= h) continue;
          const T* src = row + size_t(oy) * out_w;
          T* dst = plane + size_t(sy) * w;
          for (int ox = 0; ox < out_w; ++ox) {
            int sx = ox - pad + kx;
            if (sx >= 0 && sx < w) dst[sx] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

// ---- Conv2d ----

template <typename T>
Conv2d<T>::Conv2d(std::string name, int in_c, int out_c, int k, int pad)
    : name_(std::move(name)), in_c_(in_c), out_c_(out_c), k_(k), pad_(pad) {
  w_.assign(size_t(out_c) * in_c * k * k, T(0));
  b_.assign(size_t(out_c), T(0));
  gw_.assign(w_.size(), T(0));
  gb_.assign(b_.size(), T(0));
}

template <typename T>
void Conv2d<T>::init_he_uniform(Rng rng) {
  const double fan_in = double(in_c_) * k_ * k_;
  const double limit = std::sqrt(6.0 / fan_in);
  for (auto& v : w_) v = T(rng.uniform(-limit, limit));
  std::fill(b_.begin(), b_.end(), T(0));
}

template <typename T>
Tensor4<T> Conv2d<T>::forward(const Tensor4<T>& x, bool train) {
  if (x.c != in_c_)
    fail(ErrorCode::ShapeMismatch,
         name_ + ": expected " + std::to_string(in_c_) + " channels, got " +
             std::to_string(x.c));
  const int out_h = x.h + 2 * pad_ - k_ + 1;
  const int out_w = x.w + 2 * pad_ - k_ + 1;
  if (out_h <= 0 || out_w <= 0)
    fail(ErrorCode::ShapeMismatch, name_ + ": input too small for kernel");
  if (train) x_ = x;

  Tensor4<T> y(x.n, out_c_, out_h, out_w);
  const int K = in_c_ * k_ * k_;
  const size_t hw = size_t(out_h) * out_w;
  std::vector<T> col(size_t(K) * hw);
  for (int i = 0; i < x.n; ++i) {
    im2col(x.plane(i, 0), in_c_, x.h, x.w, k_, pad_, col.data());
    detail::gemm(false, false, out_c_, int(hw), K, T(1), w_.data(), K,
                 col.data(), int(hw), T(0), y.plane(i, 0), int(hw));
    for (int oc = 0; oc < out_c_; ++oc) {
      T* p = y.plane(i, oc);
      const T bias = b_[size_t(oc)];
      for (size_t j = 0; j < hw; ++j) p[j] += bias;
    }
  }
  return y;
}

template <typename T>
Tensor4<T> Conv2d<T>::backward(const Tensor4<T>& dy) {
  const int out_h = dy.h, out_w = dy.w;
  const int K = in_c_ * k_ * k_;
  const size_t hw = size_t(out_h) * out_w;
  Tensor4<T> dx(x_.n, in_c_, x_.h, x_.w);
  std::vector<T> col(size_t(K) * hw);
  std::vector<T> dcol(size_t(K) * hw);
  for (int i = 0; i < x_.n; ++i) {
    im2col(x_.plane(i, 0), in_c_, x_.h, x_.w, k_, pad_, col.data());
    // dW += dY * col^T
    detail::gemm(false, true, out_c_, K, int(hw), T(1), dy.plane(i, 0),
                 int(hw), col.data(), int(hw), T(1), gw_.data(), K);
    // dcol = W^T * dY
    detail::gemm(true, false, K, int(hw), out_c_, T(1), w_.data(), K,
                 dy.plane(i, 0), int(hw), T(0), dcol.data(), int(hw));
    col2im(dcol.data(), in_c_, x_.h, x_.w, k_, pad_, dx.plane(i, 0));
    for (int oc = 0; oc < out_c_; ++oc) {
      const T* p = dy.plane(i, oc);
      T s = T(0);
      for (size_t j = 0; j < hw; ++j) s += p[j];
      gb_[size_t(oc)] += s;
    }
  }
  return dx;
}

template <typename T>
void Conv2d<T>::collect_params(std::vector<ParamView<T>>& out) {
  out.push_back({name_ + ".w", {out_c_, in_c_, k_, k_}, &w_, &gw_});
  out.push_back({name_ + ".b", {out_c_}, &b_, &gb_});
}

// ---- BatchNorm2d ----

template <typename T>
BatchNorm2d<T>::BatchNorm2d(std::string name, int channels, T eps, T momentum)
    : name_(std::move(name)), c_(channels), eps_(eps), momentum_(momentum) {
  gamma_.assign(size_t(channels), T(1));
  beta_.assign(size_t(channels), T(0));
  ggamma_.assign(size_t(channels), T(0));
  gbeta_.assign(size_t(channels), T(0));
  running_mean_.assign(size_t(channels), T(0));
  running_var_.assign(size_t(channels), T(1));
}

template <typename T>
Tensor4<T> BatchNorm2d<T>::forward(const Tensor4<T>& x, bool train) {
  Tensor4<T> y(x.n, x.c, x.h, x.w);
  const size_t plane = x.plane_size();
  const size_t m = size_t(x.n) * plane;  // elements per channel

  if (train) {
    xhat_ = Tensor4<T>(x.n, x.c, x.h, x.w);
    inv_std_.assign(size_t(c_), T(0));
  }
  for (int ch = 0; ch < c_; ++ch) {
    T mean, var;
    if (train) {
      T sum = T(0);
      for (int i = 0; i < x.n; ++i) {
        const T* p = x.plane(i, ch);
        for (size_t j = 0; j < plane; ++j) sum += p[j];
      }
      mean = sum / T(m);
      T sq = T(0);
      for (int i = 0; i < x.n; ++i) {
        const T* p = x.plane(i, ch);
        for (size_t j = 0; j < plane; ++j) {
          T d = p[j] - mean;
          sq += d * d;
        }
      }
      var = sq / T(m);
      if (update_running_) {
        running_mean_[size_t(ch)] =
            (T(1) - momentum_) * running_mean_[size_t(ch)] + momentum_ * mean;
        running_var_[size_t(ch)] =
            (T(1) - momentum_) * running_var_[size_t(ch)] + momentum_ * var;
      }
    } else {
      mean = running_mean_[size_t(ch)];
      var = running_var_[size_t(ch)];
    }
    const T inv = T(1) / std::sqrt(var + eps_);
    const T g = gamma_[size_t(ch)], b = beta_[size_t(ch)];
    if (train) inv_std_[size_t(ch)] = inv;
    for (int i = 0; i < x.n; ++i) {
      const T* p = x.plane(i, ch);
      T* q = y.plane(i, ch);
      T* xh = train ? xhat_.plane(i, ch) : nullptr;
      for (size_t j = 0; j < plane; ++j) {
        T h = (p[j] - mean) * inv;
        if (xh) xh[j] = h;
        q[j] = g * h + b;
      }
    }
  }
  return y;
}

template <typename T>
Tensor4<T> BatchNorm2d<T>::backward(const Tensor4<T>& dy) {
  // Gradient through the batch statistics:
  // dx = gamma*inv_std/m * (m*dy - sum(dy) - xhat*sum(dy*xhat))
  Tensor4<T> dx(dy.n, dy.c, dy.h, dy.w);
  const size_t plane = dy.plane_size();
  const size_t m = size_t(dy.n) * plane;
  for (int ch = 0; ch < c_; ++ch) {
    T sum_dy = T(0), sum_dy_xhat = T(0);
    for (int i = 0; i < dy.n; ++i) {
      const T* d = dy.plane(i, ch);
      const T* xh = xhat_.plane(i, ch);
      for (size_t j = 0; j < plane; ++j) {
        sum_dy += d[j];
        sum_dy_xhat += d[j] * xh[j];
      }
    }
    ggamma_[size_t(ch)] += sum_dy_xhat;
    gbeta_[size_t(ch)] += sum_dy;
    const T scale = gamma_[size_t(ch)] * inv_std_[size_t(ch)] / T(m);
    for (int i = 0; i < dy.n; ++i) {
      const T* d = dy.plane(i, ch);
      const T* xh = xhat_.plane(i, ch);
      T* o = dx.plane(i, ch);
      for (size_t j = 0; j < plane; ++j)
        o[j] = scale * (T(m) * d[j] - sum_dy - xh[j] * sum_dy_xhat);
    }
  }
  return dx;
}

template <typename T>
void BatchNorm2d<T>::collect_params(std::vector<ParamView<T>>& out) {
  out.push_back({name_ + ".gamma", {c_}, &gamma_, &ggamma_});
  out.push_back({name_ + ".beta", {c_}, &beta_, &gbeta_});
}

template <typename T>
void BatchNorm2d<T>::collect_state(std::vector<ParamView<T>>& out) {
  out.push_back({name_ + ".running_mean", {c_}, &running_mean_, nullptr});
  out.push_back({name_ + ".running_var", {c_}, &running_var_, nullptr});
}

// ---- Elu ----

template <typename T>
Tensor4<T> Elu<T>::forward(const Tensor4<T>& x, bool train) {
  Tensor4<T> y(x.n, x.c, x.h, x.w);
  for (size_t i = 0; i < x.size(); ++i) {
    T v = x.v[i];
    y.v[i] = v > T(0) ? v : alpha_ * (std::exp(v) - T(1));
  }
  if (train) y_ = y;
  return y;
}

template <typename T>
Tensor4<T> Elu<T>::backward(const Tensor4<T>& dy) {
  Tensor4<T> dx(dy.n, dy.c, dy.h, dy.w);
  for (size_t i = 0; i < dy.size(); ++i) {
    T y = y_.v[i];
    dx.v[i] = dy.v[i] * (y > T(0) ? T(1) : y + alpha_);
  }
  return dx;
}

// ---- MaxPool2 ----

template <typename T>
Tensor4<T> MaxPool2<T>::forward(const Tensor4<T>& x, bool train) {
  if (x.h % 2 != 0 || x.w % 2 != 0)
    fail(ErrorCode::ShapeMismatch, "maxpool needs even spatial dims");
  in_h_ = x.h;
  in_w_ = x.w;
  Tensor4<T> y(x.n, x.c, x.h / 2, x.w / 2);
  if (train) argmax_.assign(y.size(), 0);
  size_t out_idx = 0;
  for (int i = 0; i < x.n; ++i) {
    for (int ch = 0; ch < x.c; ++ch) {
      const T* p = x.plane(i, ch);
      T* q = y.plane(i, ch);
      for (int oy = 0; oy < y.h; ++oy) {
        for (int ox = 0; ox < y.w; ++ox) {
          int base = 2 * oy * x.w + 2 * ox;
          // Row-major scan; ties keep the first, so pooling is deterministic.
          int best = base;
          T bv = p[base];
          for (int d : {1, x.w, x.w + 1}) {
            if (p[base + d] > bv) {
              bv = p[base + d];
              best = base + d;
            }
          }
          q[size_t(oy) * y.w + ox] = bv;
          if (train) argmax_[out_idx] = best;
          ++out_idx;
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor4<T> MaxPool2<T>::backward(const Tensor4<T>& dy) {
  Tensor4<T> dx(dy.n, dy.c, in_h_, in_w_);
  size_t out_idx = 0;
  for (int i = 0; i < dy.n; ++i) {
    for (int ch = 0; ch < dy.c; ++ch) {
      const T* d = dy.plane(i, ch);
      T* o = dx.plane(i, ch);
      for (size_t j = 0; j < dy.plane_size(); ++j)
        o[size_t(argmax_[out_idx + j])] += d[j];
      out_idx += dy.plane_size();
    }
  }
  return dx;
}

// ---- UpsampleNearest2 ----

template <typename T>
Tensor4<T> UpsampleNearest2<T>::forward(const Tensor4<T>& x) {
  in_h_ = x.h;
  in_w_ = x.w;
  Tensor4<T> y(x.n, x.c, x.h * 2, x.w * 2);
  for (int i = 0; i < x.n; ++i)
    for (int ch = 0; ch < x.c; ++ch) {
      const T* p = x.plane(i, ch);
      T* q = y.plane(i, ch);
      for (int oy = 0; oy < y.h; ++oy) {
        const T* row = p + size_t(oy / 2) * x.w;
        T* dst = q + size_t(oy) * y.w;
        for (int ox = 0; ox < y.w; ++ox) dst[ox] = row[ox / 2];
      }
    }
  return y;
}

template <typename T>
Tensor4<T> UpsampleNearest2<T>::backward(const Tensor4<T>& dy) {
  Tensor4<T> dx(dy.n, dy.c, in_h_, in_w_);
  for (int i = 0; i < dy.n; ++i)
    for (int ch = 0; ch < dy.c; ++ch) {
      const T* d = dy.plane(i, ch);
      T* o = dx.plane(i, ch);
      for (int oy = 0; oy < dy.h; ++oy)
        for (int ox = 0; ox < dy.w; ++ox)
          o[size_t(oy / 2) * in_w_ + ox / 2] += d[size_t(oy) * dy.w + ox];
    }
  return dx;
}

// ---- Sigmoid ----

template <typename T>
Tensor4<T> Sigmoid<T>::forward(const Tensor4<T>& x, bool train) {
  Tensor4<T> y(x.n, x.c, x.h, x.w);
  for (size_t i = 0; i < x.size(); ++i)
    y.v[i] = T(1) / (T(1) + std::exp(-x.v[i]));
  if (train) y_ = y;
  return y;
}

template <typename T>
Tensor4<T> Sigmoid<T>::backward(const Tensor4<T>& dy) {
  Tensor4<T> dx(dy.n, dy.c, dy.h, dy.w);
  for (size_t i = 0; i < dy.size(); ++i) {
    T y = y_.v[i];
    dx.v[i] = dy.v[i] * y * (T(1) - y);
  }
  return dx;
}

// ---- CenterCrop ----

template <typename T>
Tensor4<T> CenterCrop<T>::forward(const Tensor4<T>& x) {
  in_h_ = x.h;
  in_w_ = x.w;
  if (crop_ == 0) return x;
  if (2 * crop_ >= x.h || 2 * crop_ >= x.w)
    fail(ErrorCode::ShapeMismatch, "crop exceeds tensor dims");
  Tensor4<T> y(x.n, x.c, x.h - 2 * crop_, x.w - 2 * crop_);
  for (int i = 0; i < x.n; ++i)
    for (int ch = 0; ch < x.c; ++ch) {
      const T* p = x.plane(i, ch);
      T* q = y.plane(i, ch);
      for (int oy = 0; oy < y.h; ++oy)
        std::copy_n(p + size_t(oy + crop_) * x.w + crop_, y.w,
                    q + size_t(oy) * y.w);
    }
  return y;
}

template <typename T>
Tensor4<T> CenterCrop<T>::backward(const Tensor4<T>& dy) {
  if (crop_ == 0) return dy;
  Tensor4<T> dx(dy.n, dy.c, in_h_, in_w_);
  for (int i = 0; i < dy.n; ++i)
    for (int ch = 0; ch < dy.c; ++ch) {
      const T* d = dy.plane(i, ch);
      T* o = dx.plane(i, ch);
      for (int oy = 0; oy < dy.h; ++oy)
        std::copy_n(d + size_t(oy) * dy.w, dy.w,
                    o + size_t(oy + crop_) * in_w_ + crop_);
    }
  return dx;
}

// ---- channel concat/split ----

template <typename T>
Tensor4<T> concat_channels(const Tensor4<T>& a, const Tensor4<T>& b) {
  if (a.n != b.n || a.h != b.h || a.w != b.w)
    fail(ErrorCode::ShapeMismatch, "concat spatial/batch mismatch");
  Tensor4<T> y(a.n, a.c + b.c, a.h, a.w);
  for (int i = 0; i < a.n; ++i) {
    std::copy_n(a.plane(i, 0), size_t(a.c) * a.plane_size(), y.plane(i, 0));
    std::copy_n(b.plane(i, 0), size_t(b.c) * b.plane_size(), y.plane(i, a.c));
  }
  return y;
}

template <typename T>
void split_channels(const Tensor4<T>& d, int c_first, Tensor4<T>& da,
                    Tensor4<T>& db) {
  da = Tensor4<T>(d.n, c_first, d.h, d.w);
  db = Tensor4<T>(d.n, d.c - c_first, d.h, d.w);
  for (int i = 0; i < d.n; ++i) {
    std::copy_n(d.plane(i, 0), size_t(c_first) * d.plane_size(),
                da.plane(i, 0));
    std::copy_n(d.plane(i, c_first), size_t(d.c - c_first) * d.plane_size(),
                db.plane(i, 0));
  }
}

template class Conv2d<float>;
template class Conv2d<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class Elu<float>;
template class Elu<double>;
template class MaxPool2<float>;
template class MaxPool2<double>;
template class UpsampleNearest2<float>;
template class UpsampleNearest2<double>;
template class Sigmoid<float>;
template class Sigmoid<double>;
template class CenterCrop<float>;
template class CenterCrop<double>;
template Tensor4<float> concat_channels(const Tensor4<float>&,
                                        const Tensor4<float>&);
template Tensor4<double> concat_channels(const Tensor4<double>&,
                                         const Tensor4<double>&);
template void split_channels(const Tensor4<float>&, int, Tensor4<float>&,
                             Tensor4<float>&);
template void split_channels(const Tensor4<double>&, int, Tensor4<double>&,
                             Tensor4<double>&);

}  // namespace satseg
