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

#ifndef QPV_RANDOM_HPP
#define QPV_RANDOM_HPP

#include <cstdint>
#include <random>

namespace qpv {

/// SplitMix64 finalizer. Used for seed derivation only, never for sampling.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Trial seed = splitmix64(master ^ splitmix64(scenario ^ splitmix64(n ^ splitmix64(trial)))).
/// Independent of execution order, so parallel and serial runs agree.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t scenario, std::uint64_t n,
                                    std::uint64_t trial) noexcept {
    return splitmix64(master ^ splitmix64(scenario ^ splitmix64(n ^ splitmix64(trial))));
}

/// Per-trial generator. Every draw goes through `uniform()` or `bit()` so the
/// consumption order is the call order and nothing else.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    /// Child generator for a sub-stream; advances this generator by one draw.
    Rng split() { return Rng(engine_()); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace qpv

#endif  // QPV_RANDOM_HPP
