#include "gencop/tape.hpp"

namespace gencop {

template <typename T>
const typename Tape<T>::Node& Tape<T>::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) throw UsageError("tape: invalid variable");
  return nodes_[v.id];
}

template <typename T>
Var Tape<T>::constant(Shape shape, std::vector<T> values) {
  if (values.size() != numel(shape)) {
    throw ShapeError("constant: " + std::to_string(values.size()) + " values for shape " + shape_str(shape));
  }
  return emit(std::move(shape), std::move(values), false, nullptr);
}

template <typename T>
Var Tape<T>::param(Tensor<T>& tensor) {
  if (auto it = param_ids_.find(&tensor); it != param_ids_.end()) return Var{it->second};
  Node n;
  n.shape = tensor.shape;
  n.external = tensor.values.data();
  n.size = tensor.values.size();
  n.param = record_ ? &tensor : nullptr;
  n.needs_grad = record_;
  nodes_.push_back(std::move(n));
  auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  param_ids_.emplace(&tensor, id);
  return Var{id};
}

template <typename T>
std::span<const T> Tape<T>::value(Var v) const {
  const auto& n = node(v);
  if (n.external) return {n.external, n.size};
  return n.value;
}

template <typename T>
std::span<const T> Tape<T>::grad(Var v) const {
  return node(v).grad;
}

template <typename T>
T Tape<T>::item(Var v) const {
  auto val = value(v);
  if (val.size() != 1) throw ShapeError("item: tensor of shape " + shape_str(shape(v)) + " is not a scalar");
  return val[0];
}

template <typename T>
Var Tape<T>::emit(Shape shape, std::vector<T> value, bool needs_grad, Backward back) {
  Node n;
  n.shape = std::move(shape);
  n.size = value.size();
  n.value = std::move(value);
  n.needs_grad = record_ && needs_grad;
  if (n.needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
std::span<T> Tape<T>::grad_buffer(Var v) {
  auto& n = nodes_.at(v.id);
  if (n.grad.empty()) n.grad.assign(n.size, T{0});
  return n.grad;
}

template <typename T>
void Tape<T>::backward(Var loss, T seed) {
  const auto& l = node(loss);
  if (l.size != 1) throw ShapeError("backward: loss must be a scalar, got shape " + shape_str(l.shape));
  if (!record_) throw UsageError("backward: tape was built without gradient recording");
  if (done_) throw UsageError("backward: tape already replayed");
  done_ = true;
  if (!l.needs_grad) return;
  grad_buffer(loss)[0] += seed;
  for (std::int64_t i = loss.id; i >= 0; --i) {
    auto& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.empty()) continue;
    if (n.back) n.back(*this, static_cast<std::uint32_t>(i));
  }
  for (auto& n : nodes_) {
    if (n.param && !n.grad.empty()) n.param->accumulate_grad(n.grad.data());
  }
}

template class Tape<float>;
template class Tape<double>;
template class Tape<long double>;

}  // namespace gencop
