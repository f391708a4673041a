#include "gencop/tensor.hpp"

#include <algorithm>
#include <sstream>

namespace gencop {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

template <typename T>
Tensor<T>::Tensor(Shape s, T fill) : shape(std::move(s)), values(numel(shape), fill) {}

template <typename T>
Tensor<T>::Tensor(Shape s, std::vector<T> v) : shape(std::move(s)), values(std::move(v)) {
  if (values.size() != numel(shape)) {
    throw ShapeError("tensor: " + std::to_string(values.size()) + " values for shape " + shape_str(shape));
  }
}

template <typename T>
void Tensor<T>::zero_grad() {
  grad.assign(values.size(), T{0});
  touched = false;
}

template <typename T>
void Tensor<T>::accumulate_grad(const T* g) {
  if (grad.size() != values.size()) grad.assign(values.size(), T{0});
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
  touched = true;
}

template <typename T>
Tensor<T>& ParamStore<T>::add(const std::string& name, Shape shape) {
  auto [it, inserted] = tensors_.try_emplace(name, std::move(shape));
  if (!inserted) throw UsageError("parameter already registered: " + name);
  it->second.grad.assign(it->second.size(), T{0});
  return it->second;
}

template <typename T>
Tensor<T>& ParamStore<T>::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw UsageError("unknown parameter: " + name);
  return it->second;
}

template <typename T>
const Tensor<T>& ParamStore<T>::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw UsageError("unknown parameter: " + name);
  return it->second;
}

template <typename T>
bool ParamStore<T>::contains(const std::string& name) const {
  return tensors_.count(name) != 0;
}

template <typename T>
void ParamStore<T>::erase_prefix(const std::string& prefix) {
  for (auto it = tensors_.begin(); it != tensors_.end();) {
    if (it->first.rfind(prefix, 0) == 0) {
      it = tensors_.erase(it);
    } else {
      ++it;
    }
  }
}

template <typename T>
std::size_t ParamStore<T>::count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tensors_) n += t.size();
  return n;
}

template <typename T>
std::size_t ParamStore<T>::count(const std::string& prefix) const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) {
    if (name.rfind(prefix, 0) == 0) n += t.size();
  }
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& [_, t] : tensors_) t.zero_grad();
}

template struct Tensor<float>;
template struct Tensor<double>;
template class ParamStore<float>;
template class ParamStore<double>;
template struct Tensor<long double>;
template class ParamStore<long double>;

}  // namespace gencop
