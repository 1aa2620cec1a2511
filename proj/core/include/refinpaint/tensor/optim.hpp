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
#include <span>
#include <vector>

#include "refinpaint/tensor/parameters.hpp"

namespace refinpaint::ad {

struct AdamOptions {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamOptions options;
  std::uint64_t step = 0;
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
};

// One bias-corrected Adam update of a single parameter buffer. `step` is the
// 1-based index of this update.
template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> first_moment,
                 std::span<T> second_moment, const AdamOptions& options, std::uint64_t step);

template <typename T>
class Adam {
 public:
  explicit Adam(ParameterList<T> params, AdamOptions options = {});

  // Applies one update from the accumulated gradients.
  void step();
  void zero_grad();

  const AdamState<T>& state() const { return state_; }
  const ParameterList<T>& parameters() const { return params_; }

 private:
  ParameterList<T> params_;
  AdamState<T> state_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace refinpaint::ad
