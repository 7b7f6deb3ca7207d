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

#ifndef QPV_SELFTEST_HPP
#define QPV_SELFTEST_HPP

#include <functional>
#include <string>
#include <vector>

#include "qpv/oracles.hpp"
#include "qpv/protocol.hpp"
#include "qpv/quantum_core.hpp"
#include "qpv/random.hpp"

namespace qpv {

/// Implementation entry points under test. Replace one to inject a fault.
struct SelftestHooks {
    std::function<PauliFrame(BellLabel, BsmOutcome)> frame = pauli_frame_from;
    std::function<BellLabel(BellLabel, BellLabel, BsmOutcome)> swap_label = swapped_label;
    std::function<Bit(BsmOutcome, BellLabel)> reduce = reduce_announcement;
};

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    bool ok() const { return cases > 0 && failures == 0; }
};

inline BellLabel label_of(unsigned i) { return {static_cast<Bit>((i >> 1) & 1U), static_cast<Bit>(i & 1U)}; }
inline BsmOutcome outcome_of(unsigned i) { return {static_cast<Bit>((i >> 1) & 1U), static_cast<Bit>(i & 1U)}; }

/// Random single-qubit pure state.
inline QubitState random_qubit(Rng& rng) {
    const double theta = std::acos(1.0 - 2.0 * rng.uniform());
    const double phi = 2.0 * 3.14159265358979323846 * rng.uniform();
    return {std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi)};
}

/// For each shared label and each forced outcome: undo the frame on the
/// receiver and require fidelity 1 with the payload.
inline SuiteResult selftest_teleport(const SelftestHooks& hooks = {}, std::size_t payloads = 100) {
    SuiteResult r{"teleport"};
    Rng rng(0x7e1e9047);
    for (std::size_t n = 0; n < payloads; ++n) {
        const QubitState psi = random_qubit(rng);
        for (unsigned s = 0; s < 4; ++s) {
            for (unsigned o = 0; o < 4; ++o) {
                ++r.cases;
                StateVector state = StateVector::from_qubit(psi);
                state.append(make_bell(label_of(s)));
                const BsmOutcome out = outcome_of(o);
                state.project_bell(0, 1, {out.first, out.second});
                const QubitHandle receiver{2, 0};
                undo_pauli(state, receiver, hooks.frame(label_of(s), out));
                if (std::abs(fidelity(state, receiver, psi) - 1.0) > kTolerance) {
                    ++r.failures;
                }
            }
        }
    }
    return r;
}

/// All 64 (shared1, shared2, outcome) cases against the contraction oracle,
/// plus the statevector route for the same label.
inline SuiteResult selftest_swap(const SelftestHooks& hooks = {}) {
    SuiteResult r{"swap"};
    for (unsigned s1 = 0; s1 < 4; ++s1) {
        for (unsigned s2 = 0; s2 < 4; ++s2) {
            for (unsigned o = 0; o < 4; ++o) {
                ++r.cases;
                const BellLabel claimed = hooks.swap_label(label_of(s1), label_of(s2), outcome_of(o));
                const auto expected = oracle::swap_label(label_of(s1), label_of(s2), outcome_of(o));
                StateVector state = make_bell(label_of(s1));
                state.append(make_bell(label_of(s2)));
                state.project_bell(1, 2, label_of(o));
                const std::size_t outer[] = {0, 3};
                const bool physical = state.extract(outer).equals_up_to_phase(make_bell(claimed));
                if (!expected || !(*expected == claimed) || !physical) {
                    ++r.failures;
                }
            }
        }
    }
    return r;
}

/// The frame table on all 16 inputs against the contraction oracle.
inline SuiteResult selftest_frame(const SelftestHooks& hooks = {}) {
    SuiteResult r{"frame"};
    for (unsigned s = 0; s < 4; ++s) {
        for (unsigned o = 0; o < 4; ++o) {
            ++r.cases;
            const auto expected = oracle::teleport_frame(label_of(s), outcome_of(o));
            if (!expected || !(*expected == hooks.frame(label_of(s), outcome_of(o)))) {
                ++r.failures;
            }
        }
    }
    return r;
}

/// The single announced bit must let a verifier who knows the label recover
/// the sigma_z exponent of the physical frame.
inline SuiteResult selftest_reduction(const SelftestHooks& hooks = {}) {
    SuiteResult r{"reduction"};
    for (unsigned s = 0; s < 4; ++s) {
        for (unsigned o = 0; o < 4; ++o) {
            ++r.cases;
            const auto expected = oracle::teleport_frame(label_of(s), outcome_of(o));
            const Bit p = hooks.reduce(outcome_of(o), label_of(s));
            if (!expected || z_exponent(AnnouncedBit{p}, label_of(s)) != expected->k) {
                ++r.failures;
            }
        }
    }
    return r;
}

inline const std::vector<std::string>& selftest_suites() {
    static const std::vector<std::string> names{"teleport", "swap", "frame", "reduction"};
    return names;
}

inline SuiteResult run_selftest_suite(const std::string& name, const SelftestHooks& hooks = {}) {
    if (name == "teleport") {
        return selftest_teleport(hooks);
    }
    if (name == "swap") {
        return selftest_swap(hooks);
    }
    if (name == "frame") {
        return selftest_frame(hooks);
    }
    if (name == "reduction") {
        return selftest_reduction(hooks);
    }
    throw ConfigError("unknown selftest suite '" + name + "'");
}

}  // namespace qpv

#endif  // QPV_SELFTEST_HPP
