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

#include "refinpaint/tensor/tape.hpp"

#include <algorithm>
#include <unordered_set>

#include "refinpaint/errors.hpp"

namespace refinpaint::ad {

template <typename T>
Tape<T>::Tape(const Tensor<T>& root) : root_(root.node()) {
  RI_REQUIRE(root_, "tape over an undefined tensor");
  if (!root_->requires_grad) return;
  std::unordered_set<const detail::Node<T>*> seen;
  std::vector<detail::Node<T>*> stack{root_.get()};
  std::vector<std::shared_ptr<detail::Node<T>>> found{root_};
  seen.insert(root_.get());
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    for (const auto& in : n->inputs) {
      if (!in->requires_grad || !seen.insert(in.get()).second) continue;
      found.push_back(in);
      stack.push_back(in.get());
    }
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a->sequence < b->sequence; });
  nodes_ = std::move(found);
}

template <typename T>
std::size_t Tape<T>::backward() {
  if (nodes_.empty()) return 0;
  RI_REQUIRE(root_->value.size() == 1, "backward requires a scalar root");
  // Interior gradients are per-sweep scratch; leaves accumulate across sweeps.
  for (auto& n : nodes_) {
    if (!n->is_leaf()) n->grad.clear();
  }
  root_->grad_buffer()[0] += T(1);
  std::size_t ran = 0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    auto& node = **it;
    if (!node.backward || node.grad.empty()) continue;
    node.backward(node);
    ++ran;
  }
  return ran;
}

template class Tape<float>;
template class Tape<double>;

}  // namespace refinpaint::ad
