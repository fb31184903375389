#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swformer/errors.hpp"

namespace swformer {

// (batch, channels, height, width). Every tensor in the library is 4-axis;
// scalars are 1x1x1x1.
struct Shape {
  std::int64_t n = 1;
  std::int64_t c = 1;
  std::int64_t h = 1;
  std::int64_t w = 1;

  [[nodiscard]] std::int64_t numel() const { return n * c * h * w; }
  [[nodiscard]] std::int64_t plane() const { return h * w; }
  [[nodiscard]] std::string str() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

template <typename T>
struct TensorImpl {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::int64_t node = -1;  // index on the active tape, -1 for leaves

  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), T(0));
  }
};

// Shared handle to a dense float tensor. Copies alias the same storage, the
// way parameters are shared between a module and its optimizer.
template <typename T>
class Tensor {
 public:
  using Impl = TensorImpl<T>;
  using ImplPtr = std::shared_ptr<Impl>;

  Tensor() = default;
  explicit Tensor(ImplPtr impl) : impl_(std::move(impl)) {}

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, T value);
  static Tensor ones(Shape shape) { return full(shape, T(1)); }
  static Tensor scalar(T value) { return full(Shape{}, value); }
  static Tensor from_data(Shape shape, std::vector<T> data);

  [[nodiscard]] bool defined() const { return impl_ != nullptr; }
  [[nodiscard]] const Shape& shape() const { return impl_->shape; }
  [[nodiscard]] std::int64_t numel() const { return impl_->shape.numel(); }

  [[nodiscard]] std::span<T> data() { return impl_->data; }
  [[nodiscard]] std::span<const T> data() const { return impl_->data; }
  [[nodiscard]] bool has_grad() const { return !impl_->grad.empty(); }
  // Empty span when no gradient has been accumulated.
  [[nodiscard]] std::span<const T> grad() const { return impl_->grad; }
  [[nodiscard]] std::span<T> mutable_grad() {
    impl_->ensure_grad();
    return impl_->grad;
  }
  void zero_grad() { impl_->grad.clear(); }

  [[nodiscard]] bool requires_grad() const { return impl_->requires_grad; }
  Tensor& set_requires_grad(bool on) {
    impl_->requires_grad = on;
    return *this;
  }
  [[nodiscard]] std::optional<std::int64_t> node_id() const {
    if (impl_->node < 0) return std::nullopt;
    return impl_->node;
  }

  [[nodiscard]] T& at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w);
  [[nodiscard]] T at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const;
  // Value of a 1x1x1x1 tensor.
  [[nodiscard]] T item() const;

  // Deep copy that is not connected to the tape.
  [[nodiscard]] Tensor detach() const;
  [[nodiscard]] Tensor clone() const { return detach(); }
  // Same values, converted element type.
  template <typename U>
  [[nodiscard]] Tensor<U> cast() const {
    std::vector<U> out(impl_->data.begin(), impl_->data.end());
    return Tensor<U>::from_data(shape(), std::move(out));
  }

  [[nodiscard]] const ImplPtr& impl() const { return impl_; }

 private:
  ImplPtr impl_;
};

using Tensor32 = Tensor<float>;
using Tensor64 = Tensor<double>;

// Per-thread record of differentiable operations for one forward pass.
// Entries are appended in execution order, which is a topological order of
// the graph; backward walks them in reverse and then discards the tape.
template <typename T>
class Tape {
 public:
  using ImplPtr = typename Tensor<T>::ImplPtr;
  using BackwardFn = std::function<void()>;

  struct Entry {
    std::vector<ImplPtr> inputs;
    ImplPtr output;
    BackwardFn backward;
  };

  std::int64_t record(std::vector<ImplPtr> inputs, const ImplPtr& output, BackwardFn fn);
  void backward(const Tensor<T>& loss);
  void clear();
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] const Entry& entry(std::size_t i) const { return entries_[i]; }

 private:
  std::vector<Entry> entries_;
};

template <typename T>
Tape<T>& active_tape();

// Recording is enabled by default; a guard suspends it for inference.
bool grad_enabled();
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Seeds dLoss/dLoss = 1 and propagates through the active tape. The tape is
// cleared afterwards; gradients on leaves accumulate across calls.
template <typename T>
void backward(const Tensor<T>& loss);

namespace detail {

template <typename T>
bool any_requires_grad(std::initializer_list<const Tensor<T>*> inputs) {
  if (!grad_enabled()) return false;
  for (const auto* t : inputs) {
    if (t != nullptr && t->defined() && t->requires_grad()) return true;
  }
  return false;
}

// Attaches `out` to the active tape when any input requires grad.
template <typename T>
void record(std::initializer_list<const Tensor<T>*> inputs, Tensor<T>& out,
            std::function<void()> fn) {
  if (!any_requires_grad<T>(inputs)) return;
  std::vector<typename Tensor<T>::ImplPtr> ins;
  for (const auto* t : inputs) {
    if (t != nullptr && t->defined()) ins.push_back(t->impl());
  }
  out.set_requires_grad(true);
  out.impl()->node = active_tape<T>().record(std::move(ins), out.impl(), std::move(fn));
}

template <typename T>
void record_many(const std::vector<Tensor<T>>& inputs, Tensor<T>& out, std::function<void()> fn) {
  if (!grad_enabled()) return;
  bool any = false;
  std::vector<typename Tensor<T>::ImplPtr> ins;
  for (const auto& t : inputs) {
    any = any || t.requires_grad();
    ins.push_back(t.impl());
  }
  if (!any) return;
  out.set_requires_grad(true);
  out.impl()->node = active_tape<T>().record(std::move(ins), out.impl(), std::move(fn));
}

}  // namespace detail

}  // namespace swformer
