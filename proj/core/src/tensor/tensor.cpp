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

#include "refinpaint/tensor/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/tape.hpp"

namespace refinpaint::ad {

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {
thread_local bool grad_mode_enabled = true;
}

bool GradMode::enabled() { return grad_mode_enabled; }
void GradMode::set_enabled(bool on) { grad_mode_enabled = on; }

namespace detail {

std::uint64_t next_sequence() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

template <typename T>
T* Node<T>::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), T(0));
  return grad.data();
}

template <typename T>
static std::shared_ptr<Node<T>> new_node(Shape shape, std::vector<T> value) {
  RI_REQUIRE(element_count(shape) == value.size(), "element count ", value.size(),
             " does not match shape ", to_string(shape));
  for (auto d : shape) RI_REQUIRE(d > 0, "zero-sized dimension in shape ", to_string(shape));
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->sequence = next_sequence();
  return node;
}

template <typename T, typename Range>
static Tensor<T> make_result_impl(Shape shape, std::vector<T> value, const char* op,
                                  const Range& inputs, std::function<void(Node<T>&)> backward) {
  auto node = new_node<T>(std::move(shape), std::move(value));
  node->op = op;
  if (GradMode::enabled()) {
    bool any = false;
    for (const auto& t : inputs) any = any || (t.defined() && t.requires_grad());
    if (any) {
      node->requires_grad = true;
      for (const auto& t : inputs) node->inputs.push_back(t.node());
      node->backward = std::move(backward);
    }
  }
  return Tensor<T>(std::move(node));
}

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value, const char* op,
                      std::initializer_list<Tensor<T>> inputs,
                      std::function<void(Node<T>&)> backward) {
  return make_result_impl<T>(std::move(shape), std::move(value), op, inputs, std::move(backward));
}

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value, const char* op,
                      const std::vector<Tensor<T>>& inputs,
                      std::function<void(Node<T>&)> backward) {
  return make_result_impl<T>(std::move(shape), std::move(value), op, inputs, std::move(backward));
}

template struct Node<float>;
template struct Node<double>;
template Tensor<float> make_result(Shape, std::vector<float>, const char*,
                                   std::initializer_list<Tensor<float>>,
                                   std::function<void(Node<float>&)>);
template Tensor<double> make_result(Shape, std::vector<double>, const char*,
                                    std::initializer_list<Tensor<double>>,
                                    std::function<void(Node<double>&)>);
template Tensor<float> make_result(Shape, std::vector<float>, const char*,
                                   const std::vector<Tensor<float>>&,
                                   std::function<void(Node<float>&)>);
template Tensor<double> make_result(Shape, std::vector<double>, const char*,
                                    const std::vector<Tensor<double>>&,
                                    std::function<void(Node<double>&)>);

}  // namespace detail

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  const auto n = element_count(shape);
  return from_data(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::from_data(Shape shape, std::vector<T> values, bool requires_grad) {
  auto node = detail::new_node<T>(std::move(shape), std::move(values));
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return from_data(Shape{1}, {value}, requires_grad);
}

template <typename T>
const Shape& Tensor<T>::shape() const {
  RI_REQUIRE(node_, "use of an undefined tensor");
  return node_->shape;
}

template <typename T>
std::size_t Tensor<T>::dim(std::ptrdiff_t axis) const {
  const auto r = static_cast<std::ptrdiff_t>(rank());
  if (axis < 0) axis += r;
  RI_REQUIRE(axis >= 0 && axis < r, "axis ", axis, " out of range for rank ", r);
  return shape()[static_cast<std::size_t>(axis)];
}

template <typename T>
std::size_t Tensor<T>::numel() const {
  return element_count(shape());
}

template <typename T>
std::span<const T> Tensor<T>::data() const {
  RI_REQUIRE(node_, "use of an undefined tensor");
  return node_->value;
}

template <typename T>
std::span<T> Tensor<T>::mutable_data() {
  RI_REQUIRE(node_, "use of an undefined tensor");
  return node_->value;
}

template <typename T>
T Tensor<T>::item() const {
  RI_REQUIRE(numel() == 1, "item() on tensor of shape ", to_string(shape()));
  return node_->value[0];
}

template <typename T>
T Tensor<T>::at(std::initializer_list<std::size_t> index) const {
  const auto& s = shape();
  RI_REQUIRE(index.size() == s.size(), "index rank mismatch");
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    RI_REQUIRE(i < s[axis], "index out of range on axis ", axis);
    flat = flat * s[axis] + i;
    ++axis;
  }
  return node_->value[flat];
}

template <typename T>
bool Tensor<T>::requires_grad() const {
  return node_ && node_->requires_grad;
}

template <typename T>
Tensor<T>& Tensor<T>::set_requires_grad(bool on) {
  RI_REQUIRE(node_ && node_->is_leaf(), "requires_grad can only be set on leaves");
  node_->requires_grad = on;
  return *this;
}

template <typename T>
bool Tensor<T>::has_grad() const {
  return node_ && !node_->grad.empty();
}

template <typename T>
std::vector<T> Tensor<T>::grad() const {
  RI_REQUIRE(node_, "use of an undefined tensor");
  if (node_->grad.empty()) return std::vector<T>(node_->value.size(), T(0));
  return node_->grad;
}

template <typename T>
std::span<T> Tensor<T>::mutable_grad() {
  RI_REQUIRE(node_, "use of an undefined tensor");
  return {node_->grad_buffer(), node_->value.size()};
}

template <typename T>
void Tensor<T>::zero_grad() {
  if (node_ && !node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), T(0));
}

template <typename T>
void Tensor<T>::backward() const {
  RI_REQUIRE(node_, "backward on an undefined tensor");
  RI_REQUIRE(numel() == 1, "backward requires a scalar loss, got shape ", to_string(shape()));
  Tape<T> tape(*this);
  tape.backward();
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return from_data(shape(), node_->value, false);
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  return from_data(shape(), node_->value, requires_grad() && node_->is_leaf());
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace refinpaint::ad
