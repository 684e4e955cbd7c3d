#include "satseg/nadam.hpp"

#include <cmath>

namespace satseg {

template <typename T>
NadamState<T>::NadamState(const std::vector<ParamView<T>>& params,
                          NadamConfig cfg)
    : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    m_.emplace_back(p.data->size(), T(0));
    v_.emplace_back(p.data->size(), T(0));
  }
}

template <typename T>
void NadamState<T>::step(std::vector<ParamView<T>>& params, T lr) {
  if (params.size() != m_.size())
    fail(ErrorCode::ShapeMismatch, "optimizer state does not match params");
  ++t_;
  const T b1 = T(cfg_.beta1), b2 = T(cfg_.beta2), eps = T(cfg_.eps);
  const T bc1_t = T(1) - std::pow(b1, T(t_));
  const T bc1_next = T(1) - std::pow(b1, T(t_ + 1));
  const T bc2_t = T(1) - std::pow(b2, T(t_));

  for (size_t k = 0; k < params.size(); ++k) {
    auto& theta = *params[k].data;
    const auto& g = *params[k].grad;
    if (g.size() != theta.size() || m_[k].size() != theta.size())
      fail(ErrorCode::ShapeMismatch, "gradient shape mismatch in nadam_step");
    auto& m = m_[k];
    auto& v = v_[k];
    for (size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      T mbar = (T(1) - b1) * g[i] / bc1_t + b1 * m[i] / bc1_next;
      T vhat = v[i] / bc2_t;
      theta[i] -= lr * mbar / (std::sqrt(vhat) + eps);
    }
  }
}

template class NadamState<float>;
template class NadamState<double>;

}  // namespace satseg
