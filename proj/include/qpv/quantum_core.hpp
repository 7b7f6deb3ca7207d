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

#ifndef QPV_QUANTUM_CORE_HPP
#define QPV_QUANTUM_CORE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpv/common.hpp"
#include "qpv/random.hpp"

/// Exact statevector simulation of the primitives used by the positioning
/// protocol: Bell pairs, Bell-state measurement, Pauli frames, Hadamard-basis
/// measurement, teleportation and entanglement swapping.
///
/// Basis ordering is big-endian: qubit 0 is the most significant bit of the
/// basis index, so amplitudes of a two-qubit state are |00>, |01>, |10>, |11>.
namespace qpv {

using Amplitude = std::complex<double>;
using QubitState = std::array<Amplitude, 2>;

inline constexpr std::size_t kDefaultMaxQubits = 24;
inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// Label |ab> of a Bell state: (|0>|b> + (-1)^a |1>|1^b>) / sqrt(2).
struct BellLabel {
    Bit a = 0;
    Bit b = 0;
    friend bool operator==(const BellLabel&, const BellLabel&) = default;
};

/// Two-bit result of a Bell-state measurement, using the BellLabel convention:
/// outcome (first, second) means the pair was projected onto |first second>.
struct BsmOutcome {
    Bit first = 0;
    Bit second = 0;
    friend bool operator==(const BsmOutcome&, const BsmOutcome&) = default;
};

/// Exponents of the correction sigma_z^k sigma_x^k_prime.
struct PauliFrame {
    Bit k = 0;
    Bit k_prime = 0;
    friend bool operator==(const PauliFrame&, const PauliFrame&) = default;
};

struct QubitHandle {
    std::size_t index = 0;
    ActorId owner = 0;
};

inline QubitState ket_zero() { return {1.0, 0.0}; }
inline QubitState ket_one() { return {0.0, 1.0}; }
inline QubitState ket_plus() { return {kInvSqrt2, kInvSqrt2}; }
inline QubitState ket_minus() { return {kInvSqrt2, -kInvSqrt2}; }

/// Hadamard-basis eigenstate: 0 -> |+>, 1 -> |->.
inline QubitState hadamard_eigenstate(Bit value) { return value ? ket_minus() : ket_plus(); }

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits = 0, std::size_t max_qubits = kDefaultMaxQubits)
        : num_qubits_(num_qubits), max_qubits_(max_qubits) {
        check_size(num_qubits_);
        amplitudes_.assign(std::size_t{1} << num_qubits_, Amplitude{0.0, 0.0});
        amplitudes_[0] = 1.0;
    }

    static StateVector from_qubit(const QubitState& q) {
        StateVector s(1);
        s.amplitudes_ = {q[0], q[1]};
        s.require_normalized();
        return s;
    }

    static StateVector from_amplitudes(std::vector<Amplitude> amps, std::size_t max_qubits = kDefaultMaxQubits) {
        std::size_t n = 0;
        while ((std::size_t{1} << n) < amps.size()) {
            ++n;
        }
        if (amps.empty() || (std::size_t{1} << n) != amps.size()) {
            throw std::invalid_argument("amplitude count must be a power of two");
        }
        StateVector s(0, max_qubits);
        s.check_size(n);
        s.num_qubits_ = n;
        s.amplitudes_ = std::move(amps);
        s.require_normalized();
        return s;
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    std::size_t max_qubits() const noexcept { return max_qubits_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
    Amplitude amplitude(std::size_t basis) const { return amplitudes_.at(basis); }

    double norm_squared() const noexcept {
        double total = 0.0;
        for (const auto& a : amplitudes_) {
            total += std::norm(a);
        }
        return total;
    }

    /// Mask of qubit `q` inside a basis index.
    std::size_t mask(std::size_t q) const {
        if (q >= num_qubits_) {
            throw InvalidTarget("qubit " + std::to_string(q) + " not in register of " +
                                std::to_string(num_qubits_));
        }
        return std::size_t{1} << (num_qubits_ - 1 - q);
    }

    /// Tensor `other` onto the end of the register. Returns the index of its first qubit.
    std::size_t append(const StateVector& other) {
        check_size(num_qubits_ + other.num_qubits_);
        const std::size_t first = num_qubits_;
        std::vector<Amplitude> out(amplitudes_.size() * other.amplitudes_.size());
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (amplitudes_[i] == Amplitude{}) {
                continue;
            }
            for (std::size_t j = 0; j < other.amplitudes_.size(); ++j) {
                out[i * other.amplitudes_.size() + j] = amplitudes_[i] * other.amplitudes_[j];
            }
        }
        amplitudes_ = std::move(out);
        num_qubits_ += other.num_qubits_;
        return first;
    }

    std::size_t append(const QubitState& q) { return append(from_qubit(q)); }

    void apply_x(std::size_t q) {
        const std::size_t m = mask(q);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (!(i & m)) {
                std::swap(amplitudes_[i], amplitudes_[i | m]);
            }
        }
    }

    void apply_z(std::size_t q) {
        const std::size_t m = mask(q);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (i & m) {
                amplitudes_[i] = -amplitudes_[i];
            }
        }
    }

    void apply_h(std::size_t q) {
        const std::size_t m = mask(q);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (!(i & m)) {
                const Amplitude a0 = amplitudes_[i];
                const Amplitude a1 = amplitudes_[i | m];
                amplitudes_[i] = (a0 + a1) * kInvSqrt2;
                amplitudes_[i | m] = (a0 - a1) * kInvSqrt2;
            }
        }
    }

    /// Probability of projecting (q1, q2) onto Bell state `label`. Does not modify the state.
    double bell_probability(std::size_t q1, std::size_t q2, BellLabel label) const {
        const auto [m1, m2] = pair_masks(q1, q2);
        double p = 0.0;
        for_each_rest(m1 | m2, [&](std::size_t base) { p += std::norm(bell_overlap(base, m1, m2, label)); });
        return p;
    }

    /// Project (q1, q2) onto Bell state `label` and renormalize. Returns the
    /// pre-projection probability. Throws if that probability is zero.
    double project_bell(std::size_t q1, std::size_t q2, BellLabel label) {
        const auto [m1, m2] = pair_masks(q1, q2);
        double p = 0.0;
        for_each_rest(m1 | m2, [&](std::size_t base) {
            const Amplitude overlap = bell_overlap(base, m1, m2, label);
            p += std::norm(overlap);
            // Bell components c_{xy}: c_{0,b} = 1/sqrt2, c_{1,1^b} = (-1)^a / sqrt2.
            const Amplitude c = overlap * kInvSqrt2;
            amplitudes_[base] = Amplitude{};
            amplitudes_[base | m2] = Amplitude{};
            amplitudes_[base | m1] = Amplitude{};
            amplitudes_[base | m1 | m2] = Amplitude{};
            amplitudes_[base | (label.b ? m2 : 0)] = c;
            amplitudes_[base | m1 | (label.b ? 0 : m2)] = label.a ? -c : c;
        });
        renormalize(p);
        return p;
    }

    /// Probability that qubit q reads `value` in the Hadamard basis (0 = |+>, 1 = |->).
    double hadamard_probability(std::size_t q, Bit value) const {
        const std::size_t m = mask(q);
        const double sign = value ? -1.0 : 1.0;
        double p = 0.0;
        for_each_rest(m, [&](std::size_t base) {
            p += std::norm((amplitudes_[base] + sign * amplitudes_[base | m]) * kInvSqrt2);
        });
        return p;
    }

    double project_hadamard(std::size_t q, Bit value) {
        const std::size_t m = mask(q);
        const double sign = value ? -1.0 : 1.0;
        double p = 0.0;
        for_each_rest(m, [&](std::size_t base) {
            const Amplitude overlap = (amplitudes_[base] + sign * amplitudes_[base | m]) * kInvSqrt2;
            p += std::norm(overlap);
            amplitudes_[base] = overlap * kInvSqrt2;
            amplitudes_[base | m] = sign * overlap * kInvSqrt2;
        });
        renormalize(p);
        return p;
    }

    /// Pure state of `qubits` (in the given order) when they are unentangled
    /// with the rest of the register; NotProductState otherwise.
    StateVector extract(std::span<const std::size_t> qubits, double tol = kTolerance) const {
        std::vector<std::size_t> masks;
        std::size_t sub_mask = 0;
        for (std::size_t q : qubits) {
            const std::size_t m = mask(q);
            if (sub_mask & m) {
                throw InvalidTarget("qubit " + std::to_string(q) + " listed twice");
            }
            sub_mask |= m;
            masks.push_back(m);
        }
        const std::size_t sub_dim = std::size_t{1} << qubits.size();
        auto embed = [&](std::size_t sub) {
            std::size_t offset = 0;
            for (std::size_t k = 0; k < masks.size(); ++k) {
                if (sub & (std::size_t{1} << (masks.size() - 1 - k))) {
                    offset |= masks[k];
                }
            }
            return offset;
        };
        // Pick the rest-configuration carrying the most weight as the candidate column.
        std::size_t best_base = 0;
        double best_weight = -1.0;
        for_each_rest(sub_mask, [&](std::size_t base) {
            double w = 0.0;
            for (std::size_t s = 0; s < sub_dim; ++s) {
                w += std::norm(amplitudes_[base | embed(s)]);
            }
            if (w > best_weight) {
                best_weight = w;
                best_base = base;
            }
        });
        std::vector<Amplitude> sub(sub_dim);
        for (std::size_t s = 0; s < sub_dim; ++s) {
            sub[s] = amplitudes_[best_base | embed(s)] / std::sqrt(best_weight);
        }
        // Rank-one test: weight not captured by projecting every column onto `sub`.
        double residual = 0.0;
        for_each_rest(sub_mask, [&](std::size_t base) {
            Amplitude overlap{};
            double w = 0.0;
            for (std::size_t s = 0; s < sub_dim; ++s) {
                const Amplitude a = amplitudes_[base | embed(s)];
                overlap += std::conj(sub[s]) * a;
                w += std::norm(a);
            }
            residual += w - std::norm(overlap);
        });
        if (residual > tol) {
            throw NotProductState("subsystem is entangled with the rest of the register (residual " +
                                  std::to_string(residual) + ")");
        }
        StateVector out(0, max_qubits_);
        out.num_qubits_ = qubits.size();
        out.amplitudes_ = std::move(sub);
        return out;
    }

    QubitState extract_qubit(std::size_t q, double tol = kTolerance) const {
        const std::size_t qs[] = {q};
        const auto s = extract(qs, tol);
        return {s.amplitudes_[0], s.amplitudes_[1]};
    }

    /// Copy with the first amplitude above tolerance rotated to be real positive.
    StateVector canonical_phase() const {
        StateVector out = *this;
        for (const auto& a : amplitudes_) {
            if (std::abs(a) > kTolerance) {
                const Amplitude phase = std::conj(a) / std::abs(a);
                for (auto& b : out.amplitudes_) {
                    b *= phase;
                }
                break;
            }
        }
        return out;
    }

    bool equals_up_to_phase(const StateVector& other, double tol = kTolerance) const {
        if (num_qubits_ != other.num_qubits_) {
            return false;
        }
        const StateVector lhs = canonical_phase();
        const StateVector rhs = other.canonical_phase();
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (std::abs(lhs.amplitudes_[i] - rhs.amplitudes_[i]) > tol) {
                return false;
            }
        }
        return true;
    }

    /// Physical equality: up to global phase within tolerance. Compare
    /// amplitudes() directly for bit-level identity.
    friend bool operator==(const StateVector& lhs, const StateVector& rhs) { return lhs.equals_up_to_phase(rhs); }

  private:
    void check_size(std::size_t n) const {
        if (n > max_qubits_) {
            throw std::length_error("register of " + std::to_string(n) + " qubits exceeds maximum " +
                                    std::to_string(max_qubits_));
        }
    }

    void require_normalized() const {
        if (std::abs(norm_squared() - 1.0) > kTolerance) {
            throw std::invalid_argument("state is not normalized");
        }
    }

    std::pair<std::size_t, std::size_t> pair_masks(std::size_t q1, std::size_t q2) const {
        if (q1 == q2) {
            throw InvalidTarget("Bell measurement needs two distinct qubits, got " + std::to_string(q1) + " twice");
        }
        return {mask(q1), mask(q2)};
    }

    /// Calls f(base) for every basis index with all bits in `excluded` cleared.
    template <typename F>
    void for_each_rest(std::size_t excluded, F&& f) const {
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (!(i & excluded)) {
                f(i);
            }
        }
    }

    Amplitude bell_overlap(std::size_t base, std::size_t m1, std::size_t m2, BellLabel label) const {
        const Amplitude first = amplitudes_[base | (label.b ? m2 : 0)];
        const Amplitude second = amplitudes_[base | m1 | (label.b ? 0 : m2)];
        return (first + (label.a ? -second : second)) * kInvSqrt2;
    }

    void renormalize(double p) {
        if (p <= 0.0) {
            throw std::domain_error("projection onto a zero-probability outcome");
        }
        const double scale = 1.0 / std::sqrt(p);
        for (auto& a : amplitudes_) {
            a *= scale;
        }
    }

    std::size_t num_qubits_ = 0;
    std::size_t max_qubits_ = kDefaultMaxQubits;
    std::vector<Amplitude> amplitudes_;
};

inline StateVector make_bell(BellLabel label) {
    std::vector<Amplitude> amps(4);
    amps[label.b] = kInvSqrt2;
    amps[2 + (1 ^ label.b)] = label.a ? -kInvSqrt2 : kInvSqrt2;
    return StateVector::from_amplitudes(std::move(amps));
}

/// Frame acquired by the receiver when the sender's Bell measurement yields
/// `outcome` over a channel prepared as `shared`:
///   |00>: k = b,   k' = b'        |01>: k = b,   k' = 1^b'
///   |10>: k = 1^b, k' = b'        |11>: k = 1^b, k' = 1^b'
/// where (b, b') = (outcome.first, outcome.second).
inline PauliFrame pauli_frame_from(BellLabel shared, BsmOutcome outcome) {
    return {static_cast<Bit>(outcome.first ^ shared.a), static_cast<Bit>(outcome.second ^ shared.b)};
}

/// Samples a Bell-state measurement on (q1, q2). Consumes exactly one uniform draw.
inline BsmOutcome bsm(StateVector& state, QubitHandle q1, QubitHandle q2, Rng& rng) {
    std::array<double, 4> probs{};
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        probs[i] = state.bell_probability(q1.index, q2.index, {static_cast<Bit>(i >> 1), static_cast<Bit>(i & 1)});
        total += probs[i];
    }
    const double u = rng.uniform() * total;
    std::size_t chosen = 4;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (probs[i] <= 0.0) {
            continue;
        }
        cumulative += probs[i];
        chosen = i;
        if (u < cumulative) {
            break;
        }
    }
    const BellLabel label{static_cast<Bit>(chosen >> 1), static_cast<Bit>(chosen & 1)};
    state.project_bell(q1.index, q2.index, label);
    return {label.a, label.b};
}

/// Applies sigma_z^k sigma_x^k' to q: sigma_x first, then sigma_z.
inline void apply_pauli(StateVector& state, QubitHandle q, PauliFrame frame) {
    if (frame.k_prime) {
        state.apply_x(q.index);
    }
    if (frame.k) {
        state.apply_z(q.index);
    }
}

/// Undoes `frame`: sigma_x^k' sigma_z^k.
inline void undo_pauli(StateVector& state, QubitHandle q, PauliFrame frame) {
    if (frame.k) {
        state.apply_z(q.index);
    }
    if (frame.k_prime) {
        state.apply_x(q.index);
    }
}

/// Projective measurement in {|+>, |->}; 0 for |+>, 1 for |->. Consumes one uniform draw.
inline Bit hadamard_measure(StateVector& state, QubitHandle q, Rng& rng) {
    const double p_plus = state.hadamard_probability(q.index, 0);
    const double p_minus = state.hadamard_probability(q.index, 1);
    const double u = rng.uniform() * (p_plus + p_minus);
    const Bit value = (p_minus > 0.0 && (p_plus <= 0.0 || u >= p_plus)) ? 1 : 0;
    state.project_hadamard(q.index, value);
    return value;
}

struct TeleportResult {
    BsmOutcome outcome;
    PauliFrame frame;
};

/// Bell-measures (payload, sender_half). The partner of sender_half then holds
/// sigma_z^k sigma_x^k' |payload> up to global phase.
inline TeleportResult teleport(StateVector& state, QubitHandle payload, QubitHandle sender_half, BellLabel shared,
                               Rng& rng) {
    const BsmOutcome outcome = bsm(state, payload, sender_half, rng);
    return {outcome, pauli_frame_from(shared, outcome)};
}

struct SwapResult {
    BsmOutcome outcome;
    BellLabel outer;
};

/// Label the outer pair is left in after a Bell measurement on the middle
/// qubits of (outer1, mid1) = |shared1> and (mid2, outer2) = |shared2>.
inline BellLabel swapped_label(BellLabel shared1, BellLabel shared2, BsmOutcome outcome) {
    return {static_cast<Bit>(outcome.first ^ shared1.a ^ shared2.a),
            static_cast<Bit>(outcome.second ^ shared1.b ^ shared2.b)};
}

inline SwapResult entanglement_swap(StateVector& state, QubitHandle mid1, QubitHandle mid2, BellLabel shared1,
                                    BellLabel shared2, Rng& rng) {
    const BsmOutcome outcome = bsm(state, mid1, mid2, rng);
    return {outcome, swapped_label(shared1, shared2, outcome)};
}

/// |<target|q>|^2 for a qubit that is unentangled with the rest of the register.
inline double fidelity(const StateVector& state, QubitHandle q, const QubitState& target) {
    const QubitState reduced = state.extract_qubit(q.index);
    const Amplitude overlap = std::conj(target[0]) * reduced[0] + std::conj(target[1]) * reduced[1];
    return std::clamp(std::norm(overlap), 0.0, 1.0);
}

}  // namespace qpv

#endif  // QPV_QUANTUM_CORE_HPP
