// Copyright 2026 The qpv-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QPV_COMMON_HPP
#define QPV_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qpv {

using Bit = std::uint8_t;
using ActorId = std::uint32_t;

/// Absolute tolerance for every floating comparison in the simulator.
inline constexpr double kTolerance = 1e-9;

/// A quantum operation addressed the same qubit twice or a qubit outside the register.
struct InvalidTarget : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A subsystem was requested as a pure state but is entangled with the rest.
struct NotProductState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An actor used a classical value outside its past light cone, or touched a
/// qubit it does not hold.
struct CausalityViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Configuration failed validation before any simulation started.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace qpv

#endif  // QPV_COMMON_HPP
