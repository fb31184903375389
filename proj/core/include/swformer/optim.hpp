#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swformer/module.hpp"

namespace swformer {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

// Decoupled weight decay: p -= lr * wd * p, then the bias-corrected Adam
// update. Parameters that received no gradient are left untouched.
template <typename T>
class AdamW {
 public:
  AdamW(std::vector<NamedTensor<T>> params, AdamWConfig cfg = {});

  // Throws NumericError naming the first parameter with a non-finite gradient;
  // nothing is updated in that case.
  void step(double lr);
  // Scales all gradients so their global L2 norm is at most max_norm; returns
  // the norm before clipping.
  double clip_grad_norm(double max_norm);

  [[nodiscard]] std::int64_t steps() const { return t_; }
  [[nodiscard]] const std::vector<NamedTensor<T>>& params() const { return params_; }
  [[nodiscard]] const AdamWConfig& config() const { return cfg_; }

  // Moment buffers, parallel to params().
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  void set_steps(std::int64_t t) { t_ = t; }

 private:
  std::vector<NamedTensor<T>> params_;
  AdamWConfig cfg_;
  std::int64_t t_ = 0;
};

// lr(t) = lr_min + (lr_init - lr_min) (1 + cos(pi t / T)) / 2 on [0, T];
// t <= 0 gives lr_init exactly and t >= T gives lr_min exactly.
struct CosineSchedule {
  double lr_init = 1e-3;
  double lr_min = 1e-6;
  std::int64_t total_steps = 1;

  [[nodiscard]] double lr(std::int64_t t) const;
};

double cosine_lr(std::int64_t t, const CosineSchedule& sched);

}  // namespace swformer
