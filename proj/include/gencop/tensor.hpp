#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gencop/error.hpp"

namespace gencop {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Dense row-major array. `grad` is empty until a gradient is accumulated.
template <typename T>
struct Tensor {
  Shape shape;
  std::vector<T> values;
  std::vector<T> grad;
  bool touched = false;  // received a gradient since the last zero_grad()

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T{0});
  Tensor(Shape s, std::vector<T> v);

  std::size_t size() const { return values.size(); }
  void zero_grad();
  void accumulate_grad(const T* g);
};

// Ordered name -> trainable tensor map. Iteration follows the lexicographic
// order of names, so any walk over the store is deterministic. Tensor
// addresses are stable for the lifetime of the store.
template <typename T>
class ParamStore {
 public:
  using Map = std::map<std::string, Tensor<T>>;

  Tensor<T>& add(const std::string& name, Shape shape);
  Tensor<T>& at(const std::string& name);
  const Tensor<T>& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  void erase_prefix(const std::string& prefix);

  std::size_t count() const;
  std::size_t count(const std::string& prefix) const;
  std::size_t tensors() const { return tensors_.size(); }

  void zero_grad();

  typename Map::iterator begin() { return tensors_.begin(); }
  typename Map::iterator end() { return tensors_.end(); }
  typename Map::const_iterator begin() const { return tensors_.begin(); }
  typename Map::const_iterator end() const { return tensors_.end(); }

  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& [name, t] : tensors_) {
      auto& dst = out.add(name, t.shape);
      for (std::size_t i = 0; i < t.size(); ++i) dst.values[i] = static_cast<U>(t.values[i]);
    }
    return out;
  }

 private:
  Map tensors_;
};

extern template struct Tensor<float>;
extern template struct Tensor<double>;
extern template class ParamStore<float>;
extern template class ParamStore<double>;

}  // namespace gencop
