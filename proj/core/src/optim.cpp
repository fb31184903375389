#include "swformer/optim.hpp"

#include <cmath>
#include <numbers>

namespace swformer {

template <typename T>
AdamW<T>::AdamW(std::vector<NamedTensor<T>> params, AdamWConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  for (const auto& p : params_) {
    m.emplace_back(p.tensor.numel(), T(0));
    v.emplace_back(p.tensor.numel(), T(0));
  }
}

template <typename T>
void AdamW<T>::step(double lr) {
  for (const auto& p : params_) {
    for (T g : p.tensor.grad()) {
      if (!std::isfinite(static_cast<double>(g))) throw NumericError("non-finite gradient in parameter " + p.name);
    }
  }
  ++t_;
  const double bc1 = 1 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& p = params_[k].tensor;
    const auto g = p.grad();
    if (g.empty()) continue;
    auto d = p.data();
    auto& mk = m[k];
    auto& vk = v[k];
    for (std::size_t i = 0; i < d.size(); ++i) {
      double theta = d[i];
      if (cfg_.weight_decay != 0) theta -= lr * cfg_.weight_decay * theta;
      const double gi = g[i];
      const double mi = cfg_.beta1 * mk[i] + (1 - cfg_.beta1) * gi;
      const double vi = cfg_.beta2 * vk[i] + (1 - cfg_.beta2) * gi * gi;
      mk[i] = static_cast<T>(mi);
      vk[i] = static_cast<T>(vi);
      theta -= lr * (mi / bc1) / (std::sqrt(vi / bc2) + cfg_.eps);
      d[i] = static_cast<T>(theta);
    }
  }
}

template <typename T>
double AdamW<T>::clip_grad_norm(double max_norm) {
  double sq = 0;
  for (const auto& p : params_) {
    for (T g : p.tensor.grad()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0) {
    const double s = max_norm / norm;
    for (auto& p : params_) {
      if (!p.tensor.has_grad()) continue;
      for (auto& g : p.tensor.mutable_grad()) g = static_cast<T>(g * s);
    }
  }
  return norm;
}

double CosineSchedule::lr(std::int64_t t) const {
  if (t <= 0 || total_steps <= 0) return t <= 0 ? lr_init : lr_min;
  if (t >= total_steps) return lr_min;
  const double phase = std::numbers::pi * static_cast<double>(t) / static_cast<double>(total_steps);
  return lr_min + 0.5 * (lr_init - lr_min) * (1 + std::cos(phase));
}

double cosine_lr(std::int64_t t, const CosineSchedule& sched) { return sched.lr(t); }

template class AdamW<float>;
template class AdamW<double>;

}  // namespace swformer
