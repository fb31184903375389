#include "swformer/tensor.hpp"

#include <sstream>

namespace swformer {

std::string Shape::str() const {
  std::ostringstream os;
  os << "(" << n << ", " << c << ", " << h << ", " << w << ")";
  return os.str();
}

namespace {

void check_shape(const Shape& s) {
  if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1) {
    throw DimensionError("tensor shape must be positive on every axis, got " + s.str());
  }
}

thread_local bool g_grad_enabled = true;

}  // namespace

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape) {
  return full(shape, T(0));
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value) {
  check_shape(shape);
  auto impl = std::make_shared<Impl>();
  impl->shape = shape;
  impl->data.assign(static_cast<std::size_t>(shape.numel()), value);
  return Tensor(std::move(impl));
}

template <typename T>
Tensor<T> Tensor<T>::from_data(Shape shape, std::vector<T> data) {
  check_shape(shape);
  if (static_cast<std::int64_t>(data.size()) != shape.numel()) {
    throw DimensionError("data length " + std::to_string(data.size()) + " does not match shape " +
                         shape.str());
  }
  auto impl = std::make_shared<Impl>();
  impl->shape = shape;
  impl->data = std::move(data);
  return Tensor(std::move(impl));
}

template <typename T>
T& Tensor<T>::at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) {
  const auto& s = impl_->shape;
  return impl_->data[static_cast<std::size_t>(((n * s.c + c) * s.h + h) * s.w + w)];
}

template <typename T>
T Tensor<T>::at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const {
  const auto& s = impl_->shape;
  return impl_->data[static_cast<std::size_t>(((n * s.c + c) * s.h + h) * s.w + w)];
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) throw UsageError("item() requires a single-element tensor, got " + shape().str());
  return impl_->data[0];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return from_data(shape(), impl_->data);
}

template <typename T>
std::int64_t Tape<T>::record(std::vector<ImplPtr> inputs, const ImplPtr& output, BackwardFn fn) {
  entries_.push_back(Entry{std::move(inputs), output, std::move(fn)});
  return static_cast<std::int64_t>(entries_.size()) - 1;
}

template <typename T>
void Tape<T>::backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.impl()->node < 0 ||
      loss.impl()->node >= static_cast<std::int64_t>(entries_.size()) ||
      entries_[static_cast<std::size_t>(loss.impl()->node)].output != loss.impl()) {
    throw UsageError("backward() called on a tensor that is not recorded on the active tape");
  }
  if (loss.numel() != 1) {
    throw UsageError("backward() requires a scalar loss, got " + loss.shape().str());
  }
  loss.impl()->ensure_grad();
  loss.impl()->grad[0] += T(1);
  for (auto i = loss.impl()->node; i >= 0; --i) {
    auto& e = entries_[static_cast<std::size_t>(i)];
    if (e.output->grad.empty()) continue;
    e.backward();
  }
  // Intermediate gradients are released with the tape; leaves keep theirs.
  for (auto& e : entries_) {
    e.output->node = -1;
    if (e.output != loss.impl()) e.output->grad.clear();
  }
  clear();
}

template <typename T>
void Tape<T>::clear() {
  for (auto& e : entries_) e.output->node = -1;
  entries_.clear();
}

template <typename T>
Tape<T>& active_tape() {
  thread_local Tape<T> tape;
  return tape;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
void backward(const Tensor<T>& loss) {
  active_tape<T>().backward(loss);
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;
template Tape<float>& active_tape<float>();
template Tape<double>& active_tape<double>();
template void backward<float>(const Tensor<float>&);
template void backward<double>(const Tensor<double>&);

}  // namespace swformer
