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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "qpv/oracles.hpp"
#include "qpv/quantum_core.hpp"
#include "qpv/random.hpp"
#include "qpv/selftest.hpp"

using namespace qpv;

namespace {

constexpr double kTol = 1e-9;

/// payload (x) |shared>: qubit 0 payload, 1 sender half, 2 receiver half.
StateVector teleport_register(const QubitState& payload, BellLabel shared) {
    StateVector s = StateVector::from_qubit(payload);
    s.append(make_bell(shared));
    return s;
}

/// Upper edge of the chi-squared statistic with 3 degrees of freedom at 3 sigma.
const double kChi2Limit3 = 3.0 + 3.0 * std::sqrt(6.0);

}  // namespace

TEST(StateVector, StartsInAllZero) {
    StateVector s(3);
    EXPECT_EQ(s.dimension(), 8U);
    EXPECT_EQ(s.amplitude(0), Amplitude(1.0));
    EXPECT_NEAR(s.norm_squared(), 1.0, kTol);
}

TEST(StateVector, BigEndianOrdering) {
    StateVector s(2);
    s.apply_x(0);
    EXPECT_NEAR(std::abs(s.amplitude(2)), 1.0, kTol);
    s.apply_x(0);
    s.apply_x(1);
    EXPECT_NEAR(std::abs(s.amplitude(1)), 1.0, kTol);
}

TEST(StateVector, RejectsBadInput) {
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(StateVector(25), std::length_error);
    StateVector s(2);
    EXPECT_THROW(s.apply_x(2), InvalidTarget);
    EXPECT_THROW(s.bell_probability(1, 1, {}), InvalidTarget);
}

TEST(StateVector, AppendTensorsOntoTheEnd) {
    StateVector s = StateVector::from_qubit(ket_one());
    const auto first = s.append(StateVector::from_qubit(ket_plus()));
    EXPECT_EQ(first, 1U);
    EXPECT_NEAR(std::abs(s.amplitude(2)), kInvSqrt2, kTol);
    EXPECT_NEAR(std::abs(s.amplitude(3)), kInvSqrt2, kTol);
}

TEST(StateVector, EqualityIsUpToGlobalPhase) {
    auto a = StateVector::from_qubit(ket_plus());
    auto b = StateVector::from_qubit({Amplitude(0.0, kInvSqrt2), Amplitude(0.0, kInvSqrt2)});
    EXPECT_TRUE(a.equals_up_to_phase(b));
    EXPECT_EQ(a, b);
    EXPECT_FALSE(a.equals_up_to_phase(StateVector::from_qubit(ket_minus())));
}

TEST(MakeBell, MatchesLabelDefinition) {
    for (unsigned i = 0; i < 4; ++i) {
        const BellLabel l = label_of(i);
        const auto s = make_bell(l);
        const auto expect = oracle::bell(l.a, l.b);
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_NEAR(std::abs(s.amplitude(k) - expect[k]), 0.0, kTol);
        }
    }
}

TEST(Bsm, BellStateProjectsOntoItself) {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        StateVector s = make_bell({0, 0});
        EXPECT_NEAR(s.bell_probability(0, 1, {0, 0}), 1.0, kTol);
        EXPECT_EQ(bsm(s, {0}, {1}, rng), (BsmOutcome{0, 0}));
    }
}

TEST(Bsm, PayloadWithBellHalfIsUniform) {
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        const QubitState psi = random_qubit(rng);
        for (unsigned s = 0; s < 4; ++s) {
            const StateVector reg = teleport_register(psi, label_of(s));
            const auto oracle_p = oracle::teleport_probabilities({psi[0], psi[1]}, label_of(s));
            for (unsigned o = 0; o < 4; ++o) {
                EXPECT_NEAR(reg.bell_probability(0, 1, label_of(o)), 0.25, kTol);
                EXPECT_NEAR(oracle_p[o], 0.25, kTol);
            }
        }
    }
}

TEST(Bsm, PlusPlusNeverYieldsOddParity) {
    StateVector s = StateVector::from_qubit(ket_plus());
    s.append(StateVector::from_qubit(ket_plus()));
    EXPECT_NEAR(s.bell_probability(0, 1, {0, 0}), 0.5, kTol);
    EXPECT_NEAR(s.bell_probability(0, 1, {0, 1}), 0.5, kTol);
    EXPECT_NEAR(s.bell_probability(0, 1, {1, 0}), 0.0, kTol);
    EXPECT_NEAR(s.bell_probability(0, 1, {1, 1}), 0.0, kTol);
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        StateVector c = s;
        EXPECT_EQ(bsm(c, {0}, {1}, rng).first, 0);
    }
}

TEST(Bsm, ZeroProbabilityProjectionThrows) {
    StateVector s = make_bell({0, 0});
    EXPECT_THROW(s.project_bell(0, 1, {1, 1}), std::domain_error);
}

TEST(Bsm, OutcomesPassChiSquared) {
    Rng rng(4);
    for (unsigned shared = 0; shared < 4; ++shared) {
        const QubitState psi = random_qubit(rng);
        std::array<int, 4> counts{};
        const int samples = 10000;
        for (int t = 0; t < samples; ++t) {
            StateVector s = teleport_register(psi, label_of(shared));
            const auto o = teleport(s, {0}, {1}, label_of(shared), rng).outcome;
            ++counts[o.first * 2 + o.second];
        }
        double chi2 = 0.0;
        for (int c : counts) {
            chi2 += (c - samples / 4.0) * (c - samples / 4.0) / (samples / 4.0);
        }
        EXPECT_LE(chi2, kChi2Limit3) << "shared label " << shared;
    }
}

TEST(PauliFrame, LiteralFourCaseTable) {
    for (unsigned s = 0; s < 4; ++s) {
        for (unsigned o = 0; o < 4; ++o) {
            const BellLabel shared = label_of(s);
            const BsmOutcome out = outcome_of(o);
            const Bit b = out.first, bp = out.second;
            PauliFrame expect;
            if (shared == BellLabel{0, 0}) {
                expect = {b, bp};
            } else if (shared == BellLabel{0, 1}) {
                expect = {b, static_cast<Bit>(1 ^ bp)};
            } else if (shared == BellLabel{1, 0}) {
                expect = {static_cast<Bit>(1 ^ b), bp};
            } else {
                expect = {static_cast<Bit>(1 ^ b), static_cast<Bit>(1 ^ bp)};
            }
            EXPECT_EQ(pauli_frame_from(shared, out), expect);
            EXPECT_EQ(oracle::teleport_frame(shared, out), expect);
        }
    }
}

TEST(PauliFrame, TableExamples) {
    EXPECT_EQ(pauli_frame_from({0, 0}, {1, 0}), (PauliFrame{1, 0}));
    EXPECT_EQ(pauli_frame_from({0, 1}, {0, 0}), (PauliFrame{0, 1}));
    EXPECT_EQ(pauli_frame_from({1, 1}, {1, 1}), (PauliFrame{0, 0}));
}

TEST(ApplyPauli, Examples) {
    auto zero = StateVector::from_qubit(ket_zero());
    apply_pauli(zero, {0}, {0, 1});
    EXPECT_EQ(zero, StateVector::from_qubit(ket_one()));

    auto plus = StateVector::from_qubit(ket_plus());
    apply_pauli(plus, {0}, {1, 0});
    EXPECT_EQ(plus, StateVector::from_qubit(ket_minus()));

    auto plus2 = StateVector::from_qubit(ket_plus());
    apply_pauli(plus2, {0}, {0, 1});
    EXPECT_NEAR(std::abs(plus2.amplitude(0) - kInvSqrt2), 0.0, kTol);
    EXPECT_NEAR(std::abs(plus2.amplitude(1) - kInvSqrt2), 0.0, kTol);
}

TEST(ApplyPauli, XBeforeZ) {
    // Z X |0> = Z |1> = -|1>, whereas X Z |0> = |1>.
    auto s = StateVector::from_qubit(ket_zero());
    apply_pauli(s, {0}, {1, 1});
    EXPECT_NEAR(std::abs(s.amplitude(1) - Amplitude(-1.0)), 0.0, kTol);
    undo_pauli(s, {0}, {1, 1});
    EXPECT_NEAR(std::abs(s.amplitude(0) - Amplitude(1.0)), 0.0, kTol);
}

TEST(ApplyPauli, XInvarianceOnHadamardEigenstates) {
    for (Bit v = 0; v < 2; ++v) {
        for (Bit k = 0; k < 2; ++k) {
            auto a = StateVector::from_qubit(hadamard_eigenstate(v));
            auto b = a;
            apply_pauli(a, {0}, {k, 0});
            apply_pauli(b, {0}, {k, 1});
            for (std::size_t i = 0; i < 2; ++i) {
                EXPECT_NEAR(std::abs(a.amplitude(i)), std::abs(b.amplitude(i)), kTol);
            }
            for (Bit h = 0; h < 2; ++h) {
                EXPECT_NEAR(a.hadamard_probability(0, h), b.hadamard_probability(0, h), kTol);
            }
            EXPECT_NEAR(a.hadamard_probability(0, static_cast<Bit>(v ^ k)), 1.0, kTol);
        }
    }
}

TEST(HadamardMeasure, Examples) {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        auto plus = StateVector::from_qubit(ket_plus());
        EXPECT_EQ(hadamard_measure(plus, {0}, rng), 0);
        auto flipped = StateVector::from_qubit(ket_plus());
        apply_pauli(flipped, {0}, {1, 0});
        EXPECT_EQ(hadamard_measure(flipped, {0}, rng), 1);
    }
    auto zero = StateVector::from_qubit(ket_zero());
    EXPECT_NEAR(zero.hadamard_probability(0, 0), 0.5, kTol);
    EXPECT_NEAR(zero.hadamard_probability(0, 1), 0.5, kTol);
    const Bit v = hadamard_measure(zero, {0}, rng);
    EXPECT_EQ(zero, StateVector::from_qubit(hadamard_eigenstate(v)));
}

TEST(Teleport, PlusOverIdentityChannelWithZOutcome) {
    auto s = teleport_register(ket_plus(), {0, 0});
    s.project_bell(0, 1, {1, 0});
    EXPECT_NEAR(fidelity(s, {2}, ket_minus()), 1.0, kTol);
    EXPECT_EQ(pauli_frame_from({0, 0}, {1, 0}), (PauliFrame{1, 0}));
}

TEST(Teleport, IdentityFrameDeliversPayload) {
    Rng rng(6);
    const QubitState psi = random_qubit(rng);
    auto s = teleport_register(psi, {0, 0});
    s.project_bell(0, 1, {0, 0});
    EXPECT_NEAR(fidelity(s, {2}, psi), 1.0, kTol);
}

TEST(Teleport, RoundTripAllLabelsAndOutcomes) {
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        const QubitState psi = random_qubit(rng);
        for (unsigned sh = 0; sh < 4; ++sh) {
            for (unsigned o = 0; o < 4; ++o) {
                auto s = teleport_register(psi, label_of(sh));
                s.project_bell(0, 1, label_of(o));
                const PauliFrame f = pauli_frame_from(label_of(sh), outcome_of(o));
                auto recv = s.extract_qubit(2);
                auto undone = s;
                undo_pauli(undone, {2}, f);
                EXPECT_NEAR(fidelity(undone, {2}, psi), 1.0, kTol);
                auto redo = StateVector::from_qubit(psi);
                apply_pauli(redo, {0}, f);
                EXPECT_EQ(StateVector::from_qubit(recv), redo);
                EXPECT_NEAR(s.norm_squared(), 1.0, kTol);
            }
        }
    }
}

TEST(Teleport, SampledRoundTrip) {
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        const QubitState psi = random_qubit(rng);
        const BellLabel shared = label_of(static_cast<unsigned>(t % 4));
        auto s = teleport_register(psi, shared);
        const auto r = teleport(s, {0}, {1}, shared, rng);
        undo_pauli(s, {2}, r.frame);
        EXPECT_NEAR(fidelity(s, {2}, psi), 1.0, kTol);
    }
}

TEST(Teleport, ReceiverIgnorantWithoutOutcome) {
    Rng rng(9);
    const int samples = 10000;
    for (const QubitState& psi : {ket_plus(), ket_zero(), random_qubit(rng)}) {
        int minus = 0;
        for (int t = 0; t < samples; ++t) {
            auto s = teleport_register(psi, {0, 0});
            teleport(s, {0}, {1}, {0, 0}, rng);
            minus += hadamard_measure(s, {2}, rng);
        }
        const double sigma = std::sqrt(samples * 0.25);
        EXPECT_LE(std::abs(minus - samples / 2.0), 3.0 * sigma);
    }
}

TEST(EntanglementSwap, IdentityLabelsReturnOutcome) {
    for (unsigned o = 0; o < 4; ++o) {
        EXPECT_EQ(swapped_label({0, 0}, {0, 0}, outcome_of(o)), label_of(o));
    }
}

TEST(EntanglementSwap, ExhaustiveAgainstOracle) {
    for (unsigned s1 = 0; s1 < 4; ++s1) {
        for (unsigned s2 = 0; s2 < 4; ++s2) {
            for (unsigned o = 0; o < 4; ++o) {
                const auto expect = oracle::swap_label(label_of(s1), label_of(s2), outcome_of(o));
                ASSERT_TRUE(expect.has_value());
                EXPECT_EQ(swapped_label(label_of(s1), label_of(s2), outcome_of(o)), *expect);

                // Statevector: (outer1, mid1) (mid2, outer2) = qubits 0 1 2 3.
                StateVector s = make_bell(label_of(s1));
                s.append(make_bell(label_of(s2)));
                s.project_bell(1, 2, label_of(o));
                const std::array<std::size_t, 2> outer{0, 3};
                EXPECT_EQ(s.extract(outer), make_bell(*expect));
            }
        }
    }
}

TEST(EntanglementSwap, SampledOuterPairMatchesLabel) {
    Rng rng(10);
    for (int t = 0; t < 64; ++t) {
        const BellLabel s1 = label_of(static_cast<unsigned>(t % 4)), s2 = label_of(static_cast<unsigned>(t / 4 % 4));
        StateVector s = make_bell(s1);
        s.append(make_bell(s2));
        const auto r = entanglement_swap(s, {1}, {2}, s1, s2, rng);
        const std::array<std::size_t, 2> outer{0, 3};
        EXPECT_EQ(s.extract(outer), make_bell(r.outer));
    }
}

TEST(Fidelity, Examples) {
    const auto plus = StateVector::from_qubit(ket_plus());
    EXPECT_NEAR(fidelity(plus, {0}, ket_plus()), 1.0, kTol);
    EXPECT_NEAR(fidelity(plus, {0}, ket_minus()), 0.0, kTol);
    EXPECT_NEAR(fidelity(StateVector::from_qubit(ket_zero()), {0}, ket_plus()), 0.5, kTol);
}

TEST(Fidelity, EntangledQubitThrows) {
    const auto bell = make_bell({1, 1});
    EXPECT_THROW(fidelity(bell, {0}, ket_plus()), NotProductState);
}

TEST(Determinism, SameSeedSameAmplitudes) {
    auto run = [](std::uint64_t seed) {
        Rng rng(seed);
        StateVector s = teleport_register(random_qubit(rng), {1, 0});
        s.append(make_bell({0, 1}));
        bsm(s, {0}, {1}, rng);
        bsm(s, {2}, {3}, rng);
        hadamard_measure(s, {4}, rng);
        return std::vector<Amplitude>(s.amplitudes().begin(), s.amplitudes().end());
    };
    EXPECT_EQ(run(11), run(11));
    EXPECT_NE(run(11), run(12));
}

TEST(Random, DerivedSeedsAreOrderIndependent) {
    EXPECT_EQ(derive_seed(42, 1, 4, 7), derive_seed(42, 1, 4, 7));
    EXPECT_NE(derive_seed(42, 1, 4, 7), derive_seed(42, 1, 4, 8));
    EXPECT_NE(derive_seed(42, 1, 4, 7), derive_seed(42, 2, 4, 7));
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.uniform(), b.uniform());
    }
}
