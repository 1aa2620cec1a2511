// Copyright 2026 The refinpaint Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace refinpaint::ad {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

namespace detail {

// One vertex of the autodiff graph. Values never change after the op that
// produced them returns; only leaves are mutated, by optimizers.
template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until something is accumulated into it
  bool requires_grad = false;
  std::uint64_t sequence = 0;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into inputs' grads.
  std::function<void(Node&)> backward;

  T* grad_buffer();
  bool is_leaf() const { return inputs.empty(); }
};

std::uint64_t next_sequence();

}  // namespace detail

// Process-wide switch for graph recording on the calling thread.
class GradMode {
 public:
  static bool enabled();
  static void set_enabled(bool on);
};

class NoGradGuard {
 public:
  NoGradGuard() : previous_(GradMode::enabled()) { GradMode::set_enabled(false); }
  ~NoGradGuard() { GradMode::set_enabled(previous_); }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Dense row-major tensor with reverse-mode gradient support.
//
// A Tensor is a cheap handle; copies alias the same storage. Element type is
// float for training and double for gradient checking.
template <typename T>
class Tensor {
 public:
  using value_type = T;
  using NodePtr = std::shared_ptr<detail::Node<T>>;

  Tensor() = default;
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<T> values, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::ptrdiff_t axis) const;
  std::size_t numel() const;

  std::span<const T> data() const;
  // Direct write access; meant for initialisation and optimizer updates.
  std::span<T> mutable_data();
  T item() const;
  T at(std::initializer_list<std::size_t> index) const;

  bool requires_grad() const;
  Tensor& set_requires_grad(bool on);
  bool has_grad() const;
  // Zeros when nothing was accumulated yet.
  std::vector<T> grad() const;
  std::span<T> mutable_grad();
  void zero_grad();

  // Seeds d(this)/d(this) = 1 and propagates to every reachable leaf.
  void backward() const;

  // Same values, no history.
  Tensor detach() const;
  Tensor clone() const;

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

namespace detail {

// Builds an op result. Records history only when grad mode is on and at least
// one input requires grad.
template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value, const char* op,
                      std::initializer_list<Tensor<T>> inputs,
                      std::function<void(Node<T>&)> backward);

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value, const char* op,
                      const std::vector<Tensor<T>>& inputs,
                      std::function<void(Node<T>&)> backward);

// True when the input participates in the graph and wants a gradient.
template <typename T>
bool wants_grad(const std::shared_ptr<Node<T>>& node) {
  return node && node->requires_grad;
}

}  // namespace detail
}  // namespace refinpaint::ad
