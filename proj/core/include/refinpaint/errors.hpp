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

#include <sstream>
#include <stdexcept>
#include <string>

namespace refinpaint {

// A caller broke an operation's precondition (shape mismatch, bad axis, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Spatial sizes that cannot be tiled by a stride or halved.
class SizingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or incompatible files: checkpoints, configs, images.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration file or option set failed validation. The message lists
// every offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value falls outside the evaluation protocol (e.g. a hole ratio >= 60%).
class ProtocolError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

namespace detail {

template <typename... Args>
std::string concat_message(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace detail
}  // namespace refinpaint

// The message is only formatted when the condition fails.
#define RI_REQUIRE(cond, ...)                                                   \
  do {                                                                          \
    if (!(cond)) {                                                              \
      throw ::refinpaint::ContractViolation(                                    \
          ::refinpaint::detail::concat_message(__VA_ARGS__));                   \
    }                                                                           \
  } while (0)
