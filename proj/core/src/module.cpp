#include "swformer/module.hpp"

#include <algorithm>
#include <cmath>

namespace swformer {

template <typename T>
std::vector<NamedTensor<T>> Module<T>::named_parameters() const {
  std::vector<NamedTensor<T>> out;
  collect("", false, out);
  return out;
}

template <typename T>
std::vector<NamedTensor<T>> Module<T>::named_buffers() const {
  std::vector<NamedTensor<T>> out;
  collect("", true, out);
  return out;
}

template <typename T>
std::int64_t Module<T>::parameter_count() const {
  std::int64_t total = 0;
  for (const auto& p : named_parameters()) total += p.tensor.numel();
  return total;
}

template <typename T>
void Module<T>::zero_grad() {
  for (auto& p : named_parameters()) p.tensor.zero_grad();
}

template <typename T>
void Module<T>::set_training(bool on) {
  training_ = on;
  for (auto& [name, child] : children_) child->set_training(on);
}

template <typename T>
Tensor<T> Module<T>::register_parameter(std::string name, Tensor<T> t) {
  t.set_requires_grad(true);
  params_.push_back({std::move(name), t});
  return t;
}

template <typename T>
Tensor<T> Module<T>::register_buffer(std::string name, Tensor<T> t) {
  t.set_requires_grad(false);
  buffers_.push_back({std::move(name), t});
  return t;
}

template <typename T>
void Module<T>::collect(const std::string& prefix, bool buffers, std::vector<NamedTensor<T>>& out) const {
  for (const auto& p : buffers ? buffers_ : params_) out.push_back({prefix + p.name, p.tensor});
  for (const auto& [name, child] : children_) child->collect(prefix + name + ".", buffers, out);
}

template <typename T>
void fill(Tensor<T>& t, T value) {
  auto d = t.data();
  std::fill(d.begin(), d.end(), value);
}

template <typename T>
Conv2d<T>::Conv2d(const Conv2dSpec& spec, Rng& rng) : spec_(spec) {
  if (spec_.padding < 0) spec_.padding = spec_.kernel / 2;
  if (spec_.in % spec_.groups != 0 || spec_.out % spec_.groups != 0) {
    throw DimensionError("Conv2d: channels " + std::to_string(spec_.in) + "->" + std::to_string(spec_.out) +
                         " not divisible by groups " + std::to_string(spec_.groups));
  }
  const std::int64_t fan_in = (spec_.in / spec_.groups) * spec_.kernel * spec_.kernel;
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  auto w = Tensor<T>::zeros(Shape{spec_.out, spec_.in / spec_.groups, spec_.kernel, spec_.kernel});
  for (auto& v : w.data()) v = static_cast<T>(rng.uniform(-bound, bound));
  weight = this->register_parameter("weight", w);
  if (spec_.bias) {
    auto b = Tensor<T>::zeros(Shape{1, spec_.out, 1, 1});
    for (auto& v : b.data()) v = static_cast<T>(rng.uniform(-bound, bound));
    bias = this->register_parameter("bias", b);
  }
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) const {
  if (spec_.reflect_padding && spec_.padding > 0) {
    const auto p = spec_.padding;
    return conv2d(pad_reflect(x, Padding{p, p, p, p}), weight, bias, ConvOptions{spec_.stride, 0, spec_.groups});
  }
  return conv2d(x, weight, bias, ConvOptions{spec_.stride, spec_.padding, spec_.groups});
}

template <typename T>
void Conv2d<T>::zero_init() {
  fill(weight, T(0));
  if (bias.defined()) fill(bias, T(0));
}

template <typename T>
BatchNorm2d<T>::BatchNorm2d(std::int64_t channels, T momentum, T eps) : momentum_(momentum), eps_(eps) {
  gamma = this->register_parameter("gamma", Tensor<T>::ones(Shape{1, channels, 1, 1}));
  beta = this->register_parameter("beta", Tensor<T>::zeros(Shape{1, channels, 1, 1}));
  stats.mean = this->register_buffer("running_mean", Tensor<T>::zeros(Shape{1, channels, 1, 1}));
  stats.var = this->register_buffer("running_var", Tensor<T>::ones(Shape{1, channels, 1, 1}));
}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x) {
  return batchnorm2d(x, gamma, beta, stats, this->training(), momentum_, eps_);
}

template <typename T>
ChannelLayerNorm<T>::ChannelLayerNorm(std::int64_t channels, T eps) : eps_(eps) {
  gamma = this->register_parameter("gamma", Tensor<T>::ones(Shape{1, channels, 1, 1}));
  beta = this->register_parameter("beta", Tensor<T>::zeros(Shape{1, channels, 1, 1}));
}

template <typename T>
Tensor<T> ChannelLayerNorm<T>::forward(const Tensor<T>& x) const {
  return layer_norm_channels(x, gamma, beta, eps_);
}

template class Module<float>;
template class Module<double>;
template class Conv2d<float>;
template class Conv2d<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class ChannelLayerNorm<float>;
template class ChannelLayerNorm<double>;
template void fill(Tensor<float>&, float);
template void fill(Tensor<double>&, double);

}  // namespace swformer
