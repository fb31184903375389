#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "swformer/ops.hpp"
#include "swformer/rng.hpp"
#include "swformer/tensor.hpp"

namespace swformer {

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

// Parameter/buffer registry with dotted hierarchical names. Modules hold
// pointers to their children, so they are neither copyable nor movable.
template <typename T>
class Module {
 public:
  Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;
  virtual ~Module() = default;

  [[nodiscard]] std::vector<NamedTensor<T>> named_parameters() const;
  [[nodiscard]] std::vector<NamedTensor<T>> named_buffers() const;
  [[nodiscard]] std::int64_t parameter_count() const;
  void zero_grad();
  void set_training(bool on);
  [[nodiscard]] bool training() const { return training_; }

 protected:
  Tensor<T> register_parameter(std::string name, Tensor<T> t);
  Tensor<T> register_buffer(std::string name, Tensor<T> t);
  template <typename M>
  M* register_module(std::string name, std::unique_ptr<M> m) {
    M* raw = m.get();
    children_.emplace_back(std::move(name), std::move(m));
    return raw;
  }

 private:
  void collect(const std::string& prefix, bool buffers, std::vector<NamedTensor<T>>& out) const;

  std::vector<NamedTensor<T>> params_;
  std::vector<NamedTensor<T>> buffers_;
  std::vector<std::pair<std::string, std::unique_ptr<Module>>> children_;
  bool training_ = true;
};

struct Conv2dSpec {
  std::int64_t in = 1;
  std::int64_t out = 1;
  std::int64_t kernel = 1;
  std::int64_t stride = 1;
  std::int64_t padding = -1;  // -1: kernel / 2
  std::int64_t groups = 1;
  bool bias = true;
  bool reflect_padding = false;  // mirror-pad instead of zero-pad
};

// PyTorch-style default init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weight and bias.
template <typename T>
class Conv2d : public Module<T> {
 public:
  Conv2d(const Conv2dSpec& spec, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x) const;
  void zero_init();
  [[nodiscard]] const Conv2dSpec& spec() const { return spec_; }

  Tensor<T> weight;
  Tensor<T> bias;  // undefined when spec.bias is false

 private:
  Conv2dSpec spec_;
};

template <typename T>
class BatchNorm2d : public Module<T> {
 public:
  explicit BatchNorm2d(std::int64_t channels, T momentum = T(0.1), T eps = T(1e-5));
  Tensor<T> forward(const Tensor<T>& x);

  Tensor<T> gamma;
  Tensor<T> beta;
  BatchNormStats<T> stats;

 private:
  T momentum_;
  T eps_;
};

template <typename T>
class ChannelLayerNorm : public Module<T> {
 public:
  explicit ChannelLayerNorm(std::int64_t channels, T eps = T(1e-6));
  Tensor<T> forward(const Tensor<T>& x) const;

  Tensor<T> gamma;
  Tensor<T> beta;

 private:
  T eps_;
};

template <typename T>
void fill(Tensor<T>& t, T value);

}  // namespace swformer
