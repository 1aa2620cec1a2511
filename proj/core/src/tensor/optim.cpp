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

#include "refinpaint/tensor/optim.hpp"

#include <cmath>

#include "refinpaint/errors.hpp"

namespace refinpaint::ad {

template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> first_moment,
                 std::span<T> second_moment, const AdamOptions& options, std::uint64_t step) {
  RI_REQUIRE(param.size() == grad.size() && param.size() == first_moment.size() &&
                 param.size() == second_moment.size(),
             "adam_update: buffer sizes disagree");
  RI_REQUIRE(step >= 1, "adam_update: step index is 1-based");
  const double b1 = options.beta1, b2 = options.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    const double m = b1 * first_moment[i] + (1.0 - b1) * g;
    const double v = b2 * second_moment[i] + (1.0 - b2) * g * g;
    first_moment[i] = static_cast<T>(m);
    second_moment[i] = static_cast<T>(v);
    const double m_hat = m / c1;
    const double v_hat = v / c2;
    param[i] = static_cast<T>(param[i] - options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon));
  }
}

template <typename T>
Adam<T>::Adam(ParameterList<T> params, AdamOptions options) : params_(std::move(params)) {
  state_.options = options;
  for (const auto& p : params_) {
    state_.first_moment.emplace_back(p.tensor.numel(), T(0));
    state_.second_moment.emplace_back(p.tensor.numel(), T(0));
  }
}

template <typename T>
void Adam<T>::step() {
  ++state_.step;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& t = params_[k].tensor;
    if (!t.has_grad()) continue;
    auto grad = t.mutable_grad();
    adam_update<T>(t.mutable_data(), std::span<const T>(grad.data(), grad.size()),
                   state_.first_moment[k], state_.second_moment[k], state_.options, state_.step);
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

template void adam_update<float>(std::span<float>, std::span<const float>, std::span<float>,
                                 std::span<float>, const AdamOptions&, std::uint64_t);
template void adam_update<double>(std::span<double>, std::span<const double>, std::span<double>,
                                  std::span<double>, const AdamOptions&, std::uint64_t);
template class Adam<float>;
template class Adam<double>;

}  // namespace refinpaint::ad
