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

#ifndef QPV_ORACLES_HPP
#define QPV_ORACLES_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "qpv/quantum_core.hpp"

/// Brute-force reference computations on plain amplitude vectors. Nothing
/// here calls StateVector's gates or projections, so they can check them.
namespace qpv::oracle {

using Vec = std::vector<std::complex<double>>;

/// Bell vector written out term by term from (|0>|b> + (-1)^a |1>|1^b>)/sqrt2.
inline Vec bell(Bit a, Bit b) {
    Vec v(4);
    const double r = 1.0 / std::sqrt(2.0);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const int partner = x == 0 ? b : 1 - b;
            if (y == partner) {
                v[2 * x + y] = (x == 1 && a == 1) ? -r : r;
            }
        }
    }
    return v;
}

inline Vec kron(const Vec& l, const Vec& r) {
    Vec out(l.size() * r.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            out[i * r.size() + j] = l[i] * r[j];
        }
    }
    return out;
}

inline std::complex<double> inner(const Vec& l, const Vec& r) {
    std::complex<double> s{};
    for (std::size_t i = 0; i < l.size(); ++i) {
        s += std::conj(l[i]) * r[i];
    }
    return s;
}

/// Contracts the leading two qubits of `state` with <bra| and returns the
/// (unnormalized) remainder.
inline Vec contract_front_pair(const Vec& bra, const Vec& state) {
    const std::size_t rest = state.size() / 4;
    Vec out(rest);
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t r = 0; r < rest; ++r) {
            out[r] += std::conj(bra[k]) * state[k * rest + r];
        }
    }
    return out;
}

/// Contracts the middle pair of a four-qubit state with <bra|; the outer pair remains.
inline Vec contract_middle_pair(const Vec& bra, const Vec& state) {
    Vec out(4);
    for (int o1 = 0; o1 < 2; ++o1) {
        for (int m = 0; m < 4; ++m) {
            for (int o2 = 0; o2 < 2; ++o2) {
                out[2 * o1 + o2] += std::conj(bra[m]) * state[8 * o1 + 2 * m + o2];
            }
        }
    }
    return out;
}

inline double norm2(const Vec& v) { return std::real(inner(v, v)); }

/// True when a and b agree up to global phase (both normalized).
inline bool same_ray(const Vec& a, const Vec& b, double tol = 1e-9) {
    return std::abs(std::abs(inner(a, b)) - 1.0) <= tol;
}

inline Vec normalized(Vec v) {
    const double n = std::sqrt(norm2(v));
    for (auto& c : v) {
        c /= n;
    }
    return v;
}

/// sigma_z^k sigma_x^kp applied to a qubit vector, written as matrices.
inline Vec pauli(Bit k, Bit kp, const Vec& psi) {
    Vec v = psi;
    if (kp) {
        v = {v[1], v[0]};
    }
    if (k) {
        v = {v[0], -v[1]};
    }
    return v;
}

/// Frame observed when teleporting over |shared> with outcome `out`, found by
/// contraction and matching against all four Paulis on two probe payloads.
inline std::optional<PauliFrame> teleport_frame(BellLabel shared, BsmOutcome out) {
    const Vec probes[] = {Vec{0.6, std::complex<double>(0.0, 0.8)}, Vec{0.8, -0.6}};
    std::optional<PauliFrame> found;
    for (Bit k = 0; k < 2; ++k) {
        for (Bit kp = 0; kp < 2; ++kp) {
            bool all = true;
            for (const auto& psi : probes) {
                const Vec full = kron(psi, bell(shared.a, shared.b));
                const Vec receiver = normalized(contract_front_pair(bell(out.first, out.second), full));
                all = all && same_ray(receiver, pauli(k, kp, psi));
            }
            if (all) {
                found = PauliFrame{k, kp};
            }
        }
    }
    return found;
}

/// Label of the outer pair after projecting the middle of |s1> (x) |s2> onto |out>.
inline std::optional<BellLabel> swap_label(BellLabel s1, BellLabel s2, BsmOutcome out) {
    const Vec full = kron(bell(s1.a, s1.b), bell(s2.a, s2.b));
    const Vec outer = normalized(contract_middle_pair(bell(out.first, out.second), full));
    for (Bit a = 0; a < 2; ++a) {
        for (Bit b = 0; b < 2; ++b) {
            if (same_ray(outer, bell(a, b))) {
                return BellLabel{a, b};
            }
        }
    }
    return std::nullopt;
}

/// Born probabilities of the four Bell outcomes on (payload, first half of |shared>).
inline std::array<double, 4> teleport_probabilities(const Vec& payload, BellLabel shared) {
    const Vec full = kron(payload, bell(shared.a, shared.b));
    std::array<double, 4> p{};
    for (int i = 0; i < 4; ++i) {
        p[i] = norm2(contract_front_pair(bell(static_cast<Bit>(i >> 1), static_cast<Bit>(i & 1)), full));
    }
    return p;
}

}  // namespace qpv::oracle

#endif  // QPV_ORACLES_HPP
