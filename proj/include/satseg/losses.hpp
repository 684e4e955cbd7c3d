#pragma once

#include <cstdint>
#include <span>

#include "satseg/tensor.hpp"

namespace satseg {

// Prediction clip for the cross-entropy logs.
constexpr double kBceClip = 1e-7;
// Smoothing added to soft-Jaccard numerator and denominator, so the
// empty/empty case evaluates to 1 and the log stays finite.
constexpr double kJaccardSmooth = 1e-12;

// Hard Jaccard (intersection over union) of binary masks; 1.0 when both are
// empty, so correctly-empty tiles are not punished.
double jaccard(std::span<const uint8_t> y, std::span<const uint8_t> yhat);

// Binary cross entropy, mean over elements; predictions are clipped to
// [kBceClip, 1 - kBceClip] before the logs.
template <typename T>
T bce_loss(std::span<const T> y, std::span<const T> yhat);

// The probabilistic Jaccard relaxation.
//   aggregate:       (sum(y*yh) + eps) / (sum(y + yh - y*yh) + eps)
//   per_pixel_mean:  mean_i (y_i*yh_i + eps) / (y_i + yh_i - y_i*yh_i + eps)
// The aggregate form reduces exactly to the hard Jaccard on binary inputs
// (including empty/empty); the per-pixel mean form is the literal per-term
// average and does not.
enum class SoftJaccardMode { aggregate, per_pixel_mean };

template <typename T>
T soft_jaccard(std::span<const T> y, std::span<const T> yhat,
               SoftJaccardMode mode = SoftJaccardMode::aggregate);

// Joint training objective: BCE - log(soft Jaccard).
template <typename T>
T joint_loss(std::span<const T> y, std::span<const T> yhat,
             SoftJaccardMode mode = SoftJaccardMode::aggregate);

// Loss value plus dL/dyhat, written into `grad` (same length as yhat).
template <typename T>
T joint_loss_grad(std::span<const T> y, std::span<const T> yhat,
                  std::span<T> grad,
                  SoftJaccardMode mode = SoftJaccardMode::aggregate);

// Tensor wrappers.
template <typename T>
T bce_loss(const Tensor4<T>& y, const Tensor4<T>& yhat) {
  if (!y.same_shape(yhat)) fail(ErrorCode::ShapeMismatch, "bce shape mismatch");
  return bce_loss<T>(std::span<const T>(y.v), std::span<const T>(yhat.v));
}
template <typename T>
T soft_jaccard(const Tensor4<T>& y, const Tensor4<T>& yhat,
               SoftJaccardMode mode = SoftJaccardMode::aggregate) {
  if (!y.same_shape(yhat))
    fail(ErrorCode::ShapeMismatch, "soft_jaccard shape mismatch");
  return soft_jaccard<T>(std::span<const T>(y.v), std::span<const T>(yhat.v),
                         mode);
}
template <typename T>
T joint_loss(const Tensor4<T>& y, const Tensor4<T>& yhat,
             SoftJaccardMode mode = SoftJaccardMode::aggregate) {
  if (!y.same_shape(yhat))
    fail(ErrorCode::ShapeMismatch, "joint_loss shape mismatch");
  return joint_loss<T>(std::span<const T>(y.v), std::span<const T>(yhat.v),
                       mode);
}
template <typename T>
T joint_loss_grad(const Tensor4<T>& y, const Tensor4<T>& yhat,
                  Tensor4<T>& grad,
                  SoftJaccardMode mode = SoftJaccardMode::aggregate) {
  if (!y.same_shape(yhat))
    fail(ErrorCode::ShapeMismatch, "joint_loss shape mismatch");
  grad = Tensor4<T>(yhat.n, yhat.c, yhat.h, yhat.w);
  return joint_loss_grad<T>(std::span<const T>(y.v),
                            std::span<const T>(yhat.v), std::span<T>(grad.v),
                            mode);
}

}  // namespace satseg
