#pragma once

#include <functional>
#include <string>
#include <vector>

#include "satseg/losses.hpp"
#include "satseg/unet.hpp"

namespace satseg {

struct GradCheckReport {
  double max_rel_err = 0.0;
  double tol = 0.0;
  size_t checked = 0;
  bool pass = false;
  std::string worst_param;
  size_t worst_index = 0;

  std::string summary() const;
};

// Relative error convention shared by both checkers:
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-12).
double grad_rel_err(double analytic, double numeric);

// Central-difference check of externally supplied analytic gradients.
// `loss` re-evaluates the objective after `tensors` have been perturbed in
// place; `grads` holds the analytic gradient per tensor.
GradCheckReport gradient_check_fn(
    const std::vector<ParamView<double>>& tensors,
    const std::function<double()>& loss, double h, double tol,
    int sample_count, uint64_t seed);

// End-to-end check of the network backward pass under the joint loss,
// over a random subsample of parameters. f64 only.
GradCheckReport gradient_check(
    UNet<double>& model, const Tensor4<double>& x, const Tensor4<double>& y,
    double h, double tol, int sample_count, uint64_t seed,
    SoftJaccardMode mode = SoftJaccardMode::aggregate);

}  // namespace satseg
