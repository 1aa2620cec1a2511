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

#include <cstdint>
#include <memory>
#include <vector>

#include "refinpaint/tensor/tensor.hpp"

namespace refinpaint::ad {

// Topologically ordered record of the differentiable operations reachable
// from a root. Nodes are ordered by creation sequence, which is a valid
// topological order because every op's inputs exist before it does.
template <typename T>
class Tape {
 public:
  explicit Tape(const Tensor<T>& root);

  std::size_t size() const { return nodes_.size(); }
  // Creation order; inputs precede their consumers.
  const std::vector<std::shared_ptr<detail::Node<T>>>& nodes() const { return nodes_; }

  // Runs the reverse sweep once. Returns how many nodes ran a backward rule.
  std::size_t backward();

 private:
  std::shared_ptr<detail::Node<T>> root_;
  std::vector<std::shared_ptr<detail::Node<T>>> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace refinpaint::ad
