#include "satseg/losses.hpp"

#include <algorithm>
#include <cmath>

namespace satseg {

double jaccard(std::span<const uint8_t> y, std::span<const uint8_t> yhat) {
  if (y.size() != yhat.size())
    fail(ErrorCode::ShapeMismatch, "jaccard mask size mismatch");
  int64_t inter = 0, uni = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    bool a = y[i] != 0, b = yhat[i] != 0;
    inter += (a && b);
    uni += (a || b);
  }
  if (uni == 0) return 1.0;
  return double(inter) / double(uni);
}

template <typename T>
T bce_loss(std::span<const T> y, std::span<const T> yhat) {
  const T lo = T(kBceClip), hi = T(1) - T(kBceClip);
  long double sum = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    T p = std::clamp(yhat[i], lo, hi);
    sum += y[i] * std::log(p) + (T(1) - y[i]) * std::log(T(1) - p);
  }
  return T(-sum / (long double)(y.size()));
}

template <typename T>
T soft_jaccard(std::span<const T> y, std::span<const T> yhat,
               SoftJaccardMode mode) {
  const T eps = T(kJaccardSmooth);
  if (mode == SoftJaccardMode::aggregate) {
    long double inter = 0, uni = 0;
    for (size_t i = 0; i < y.size(); ++i) {
      T prod = y[i] * yhat[i];
      inter += prod;
      uni += y[i] + yhat[i] - prod;
    }
    return T((inter + eps) / (uni + eps));
  }
  long double sum = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    T prod = y[i] * yhat[i];
    sum += (prod + eps) / (y[i] + yhat[i] - prod + eps);
  }
  return T(sum / (long double)(y.size()));
}

template <typename T>
T joint_loss(std::span<const T> y, std::span<const T> yhat,
             SoftJaccardMode mode) {
  return bce_loss(y, yhat) - std::log(soft_jaccard(y, yhat, mode));
}

template <typename T>
T joint_loss_grad(std::span<const T> y, std::span<const T> yhat,
                  std::span<T> grad, SoftJaccardMode mode) {
  const size_t n = y.size();
  const T lo = T(kBceClip), hi = T(1) - T(kBceClip);
  const T eps = T(kJaccardSmooth);

  // BCE term; clipped predictions contribute zero gradient.
  long double bce_sum = 0;
  for (size_t i = 0; i < n; ++i) {
    T p = std::clamp(yhat[i], lo, hi);
    bce_sum += y[i] * std::log(p) + (T(1) - y[i]) * std::log(T(1) - p);
    if (yhat[i] <= lo || yhat[i] >= hi) {
      grad[i] = T(0);
    } else {
      grad[i] = (-y[i] / p + (T(1) - y[i]) / (T(1) - p)) / T(n);
    }
  }
  T bce = T(-bce_sum / (long double)n);

  T jac;
  if (mode == SoftJaccardMode::aggregate) {
    long double inter = 0, uni = 0;
    for (size_t i = 0; i < n; ++i) {
      T prod = y[i] * yhat[i];
      inter += prod;
      uni += y[i] + yhat[i] - prod;
    }
    long double num = inter + eps, den = uni + eps;
    jac = T(num / den);
    // d(-log J)/dyh_i = -(1/J) * (y_i*den - num*(1 - y_i)) / den^2
    for (size_t i = 0; i < n; ++i) {
      long double dj = (y[i] * den - num * (T(1) - y[i])) / (den * den);
      grad[i] += T(-dj / (num / den));
    }
  } else {
    long double sum = 0;
    std::vector<long double> dterm(n);
    for (size_t i = 0; i < n; ++i) {
      T prod = y[i] * yhat[i];
      long double num = prod + eps;
      long double den = y[i] + yhat[i] - prod + eps;
      sum += num / den;
      dterm[i] = (y[i] * den - num * (T(1) - y[i])) / (den * den);
    }
    jac = T(sum / (long double)n);
    for (size_t i = 0; i < n; ++i)
      grad[i] += T(-(dterm[i] / (long double)n) / jac);
  }
  return bce - std::log(jac);
}

template float bce_loss<float>(std::span<const float>, std::span<const float>);
template double bce_loss<double>(std::span<const double>,
                                 std::span<const double>);
template float soft_jaccard<float>(std::span<const float>,
                                   std::span<const float>, SoftJaccardMode);
template double soft_jaccard<double>(std::span<const double>,
                                     std::span<const double>, SoftJaccardMode);
template float joint_loss<float>(std::span<const float>,
                                 std::span<const float>, SoftJaccardMode);
template double joint_loss<double>(std::span<const double>,
                                   std::span<const double>, SoftJaccardMode);
template float joint_loss_grad<float>(std::span<const float>,
                                      std::span<const float>,
                                      std::span<float>, SoftJaccardMode);
template double joint_loss_grad<double>(std::span<const double>,
                                        std::span<const double>,
                                        std::span<double>, SoftJaccardMode);

}  // namespace satseg
