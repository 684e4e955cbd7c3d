#include "satseg/gradcheck.hpp"

#include <cmath>
#include <cstdio>

#include "satseg/rng.hpp"

namespace satseg {

double grad_rel_err(double analytic, double numeric) {
  double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-12});
  return std::fabs(analytic - numeric) / denom;
}

std::string GradCheckReport::summary() const {
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "%s: max_rel_err=%.3e (tol %.1e) over %zu params, worst %s[%zu]",
                pass ? "PASS" : "FAIL", max_rel_err, tol, checked,
                worst_param.c_str(), worst_index);
  return buf;
}

GradCheckReport gradient_check_fn(
    const std::vector<ParamView<double>>& tensors,
    const std::function<double()>& loss, double h, double tol,
    int sample_count, uint64_t seed) {
  size_t total = 0;
  for (const auto& t : tensors) total += t.data->size();
  if (total == 0) fail(ErrorCode::ConfigError, "no parameters to check");

  GradCheckReport report;
  report.tol = tol;
  Rng rng(seed);
  for (int s = 0; s < sample_count; ++s) {
    size_t flat = size_t(rng.uniform_int(uint32_t(total)));
    size_t k = 0;
    while (flat >= tensors[k].data->size()) {
      flat -= tensors[k].data->size();
      ++k;
    }
    double& param = (*tensors[k].data)[flat];
    const double analytic = (*tensors[k].grad)[flat];

    const double saved = param;
    param = saved + h;
    double lp = loss();
    param = saved - h;
    double lm = loss();
    param = saved;
    const double numeric = (lp - lm) / (2.0 * h);

    double err = grad_rel_err(analytic, numeric);
    if (err > report.max_rel_err) {
      report.max_rel_err = err;
      report.worst_param = tensors[k].name;
      report.worst_index = flat;
    }
    ++report.checked;
  }
  report.pass = report.max_rel_err <= tol;
  return report;
}

GradCheckReport gradient_check(UNet<double>& model, const Tensor4<double>& x,
                               const Tensor4<double>& y, double h, double tol,
                               int sample_count, uint64_t seed,
                               SoftJaccardMode mode) {
  // Freeze running stats: the repeated perturbed forwards must be
  // side-effect free, and train-mode outputs ignore the running estimates.
  model.set_update_running_stats(false);

  model.zero_grad();
  Tensor4<double> yhat = model.forward(x, true);
  Tensor4<double> dLdy;
  joint_loss_grad(y, yhat, dLdy, mode);
  model.backward(dLdy);

  auto params = model.params();
  auto loss = [&]() {
    Tensor4<double> out = model.forward(x, true);
    return joint_loss(y, out, mode);
  };
  auto report = gradient_check_fn(params, loss, h, tol, sample_count, seed);
  model.set_update_running_stats(true);
  return report;
}

}  // namespace satseg
