#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "gencop/tensor.hpp"

namespace gencop {

// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t id = npos;
  bool valid() const { return id != npos; }
};

// Reverse-mode tape. Values are appended in evaluation order; backward()
// replays the recorded closures from the loss down to the first node, so two
// replays of the same tape produce bitwise-identical gradients.
//
// Parameter leaves read their values straight from a ParamStore tensor and
// add their gradient back into it when backward() finishes. A tape built with
// record == false evaluates values only (inference).
template <typename T>
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::uint32_t self)>;

  explicit Tape(bool record = true) : record_(record) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Shape shape, std::vector<T> values);
  Var param(Tensor<T>& tensor);

  const Shape& shape(Var v) const { return node(v).shape; }
  std::span<const T> value(Var v) const;
  std::span<const T> grad(Var v) const;
  T item(Var v) const;
  bool needs_grad(Var v) const { return node(v).needs_grad; }
  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  // Fills gradients for every node reachable from `loss` and accumulates
  // them into the parameter tensors. May be called once per tape.
  void backward(Var loss, T seed = T{1});

  // Op-author interface.
  Var emit(Shape shape, std::vector<T> value, bool needs_grad, Backward back);
  std::span<T> grad_buffer(Var v);
  std::span<const T> out_grad(std::uint32_t self) const { return nodes_[self].grad; }

 private:
  struct Node {
    Shape shape;
    std::vector<T> value;
    const T* external = nullptr;
    std::size_t size = 0;
    std::vector<T> grad;
    Tensor<T>* param = nullptr;
    bool needs_grad = false;
    Backward back;
  };

  const Node& node(Var v) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor<T>*, std::uint32_t> param_ids_;
  bool record_;
  bool done_ = false;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace gencop
