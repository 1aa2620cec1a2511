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

#include <string>
#include <vector>

#include "refinpaint/tensor/tensor.hpp"

namespace refinpaint::ad {

template <typename T>
struct NamedParameter {
  std::string name;
  Tensor<T> tensor;
};

// Ordered, named view over a model's trainable leaves. Tensors are handles,
// so updating through this list updates the owning module.
template <typename T>
using ParameterList = std::vector<NamedParameter<T>>;

template <typename T>
std::size_t parameter_count(const ParameterList<T>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor.numel();
  return n;
}

}  // namespace refinpaint::ad
