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

#ifndef QPV_PROTOCOL_HPP
#define QPV_PROTOCOL_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qpv/common.hpp"
#include "qpv/quantum_core.hpp"
#include "qpv/random.hpp"
#include "qpv/spacetime.hpp"

namespace qpv {

enum class Variant { two_bit, single_bit };

inline std::string to_string(Variant v) { return v == Variant::two_bit ? "two_bit" : "single_bit"; }

inline Variant parse_variant(std::string_view s) {
    if (s == "two_bit" || s == "two-bit") {
        return Variant::two_bit;
    }
    if (s == "single_bit" || s == "single-bit") {
        return Variant::single_bit;
    }
    throw ConfigError("unknown variant '" + std::string(s) + "' (expected two-bit or single-bit)");
}

/// Challenge states are Hadamard eigenstates; 0 is |+>, 1 is |->.
inline const char* challenge_name(Bit psi) { return psi ? "minus" : "plus"; }

struct ProtocolConfig {
    std::size_t n = 4;
    double x = 1.0;
    /// Per-pair challenge (0 = plus, 1 = minus). Empty: sampled uniformly per trial.
    std::vector<Bit> challenge_states;
    /// Per-pair channel labels. Empty: |00> everywhere.
    std::vector<BellLabel> bell_labels_v1;
    std::vector<BellLabel> bell_labels_v2;
    Variant variant = Variant::two_bit;
    double deadline_slack = 0.0;
    /// Extra emission delay at the prover. Zero is the ideal protocol.
    double prover_latency = 0.0;
    /// Require V1 to hold its own copy of every announcement by the deadline.
    bool strict_duplicates = false;
    /// Diagnostic mode: pool after all traffic has arrived and ignore the deadline.
    bool diagnostic = false;

    void validate() const {
        if (n < 1) {
            throw ConfigError("n must be at least 1");
        }
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw ConfigError("x must be a positive finite distance");
        }
        if (!challenge_states.empty() && challenge_states.size() != n) {
            throw ConfigError("challenge_states must have exactly n entries");
        }
        for (Bit b : challenge_states) {
            if (b > 1) {
                throw ConfigError("challenge state must be plus or minus");
            }
        }
        for (const auto* labels : {&bell_labels_v1, &bell_labels_v2}) {
            if (!labels->empty() && labels->size() != n) {
                throw ConfigError("bell labels must have exactly n entries");
            }
            for (const auto& l : *labels) {
                if (l.a > 1 || l.b > 1) {
                    throw ConfigError("bell label bits must be 0 or 1");
                }
            }
        }
        if (!(deadline_slack >= 0.0) || !std::isfinite(deadline_slack)) {
            throw ConfigError("deadline_slack must be >= 0");
        }
        if (!(prover_latency >= 0.0) || !std::isfinite(prover_latency)) {
            throw ConfigError("prover_latency must be >= 0");
        }
    }

    BellLabel label_v1(std::size_t i) const { return bell_labels_v1.empty() ? BellLabel{} : bell_labels_v1[i]; }
    BellLabel label_v2(std::size_t i) const { return bell_labels_v2.empty() ? BellLabel{} : bell_labels_v2[i]; }
};

/// Latest admissible arrival of a response: 2x/c plus slack.
inline double deadline(const ProtocolConfig& config) { return 2.0 * config.x + config.deadline_slack; }

/// Single-bit announcement of the prover's Bell measurement.
struct AnnouncedBit {
    Bit p = 0;
    friend bool operator==(const AnnouncedBit&, const AnnouncedBit&) = default;
};

using Announcement = std::variant<BsmOutcome, AnnouncedBit>;

/// The bit a prover announces in the single-bit variant. The prover never
/// learns the channel label, so the bit is the first bit of its outcome;
/// together with `shared` it fixes whether the frame is in {I, X} or {Z, ZX}.
inline Bit reduce_announcement(BsmOutcome pp_prime, [[maybe_unused]] BellLabel shared) { return pp_prime.first; }

/// sigma_z exponent a verifier reconstructs from an announcement.
inline Bit z_exponent(const Announcement& announcement, BellLabel shared) {
    if (const auto* full = std::get_if<BsmOutcome>(&announcement)) {
        return pauli_frame_from(shared, *full).k;
    }
    return static_cast<Bit>(std::get<AnnouncedBit>(announcement).p ^ shared.a);
}

/// V1's check: the reported Hadamard value of the teleported state must be
/// psi flipped by the sigma_z exponent of V1's own frame. sigma_x only adds a
/// phase to |+-> and never changes the value.
inline bool verify_v1(Bit psi, Bit reported_state, BsmOutcome w_prime, BellLabel shared) {
    const Bit expected = static_cast<Bit>(psi ^ pauli_frame_from(shared, w_prime).k);
    return reported_state == expected;
}

/// V2's check: its own Hadamard reading must be the reported value flipped by
/// the sigma_z exponent implied by the announcement.
inline bool verify_v2(Bit reported_state, const Announcement& announcement, Bit v2_measured, BellLabel shared,
                      Variant variant) {
    const bool full = std::holds_alternative<BsmOutcome>(announcement);
    if (full != (variant == Variant::two_bit)) {
        throw ConfigError("announcement does not match the " + to_string(variant) + " variant");
    }
    return v2_measured == (reported_state ^ z_exponent(announcement, shared));
}

inline std::string announcement_string(const Announcement& a) {
    if (const auto* full = std::get_if<BsmOutcome>(&a)) {
        return std::string{static_cast<char>('0' + full->first), static_cast<char>('0' + full->second)};
    }
    return std::string(1, static_cast<char>('0' + std::get<AnnouncedBit>(a).p));
}

inline Announcement announcement_from_value(const ClassicalValue& v) {
    if (v.width == 2) {
        return BsmOutcome{static_cast<Bit>((v.bits >> 1) & 1U), static_cast<Bit>(v.bits & 1U)};
    }
    return AnnouncedBit{static_cast<Bit>(v.bits & 1U)};
}

/// What the pooled verifiers see for one pair. Items are present only if
/// they reached the verifier by the pooling time.
struct PairEvidence {
    Bit challenge = 0;
    BellLabel v1_label;
    BellLabel v2_label;
    std::optional<BsmOutcome> w_prime;
    std::optional<Bit> report_v1;
    std::optional<Announcement> announce_v1;
    std::optional<Bit> report_v2;
    std::optional<Announcement> announce_v2;
    std::optional<Bit> v2_measured;
    /// Latest first-arrival among required items; kNever if one is missing.
    double complete_time = kNever;
};

struct PairChecks {
    bool on_time = false;
    bool v1_pass = false;
    bool v2_pass = false;
    bool reports_agree = false;
    bool announcements_agree = false;
    bool pass = false;
};

/// Pooled per-pair decision. V2's check covers its own consistency plus
/// agreement with the state report and announcement that V1 received.
inline PairChecks evaluate_pair(const PairEvidence& e, double deadline_time, Variant variant, bool strict_duplicates,
                                bool check_timing = true) {
    PairChecks c;
    const bool complete = e.report_v1 && e.report_v2 && e.announce_v2 && e.v2_measured &&
                          (!strict_duplicates || e.announce_v1);
    c.on_time = complete && e.complete_time <= deadline_time;
    c.v1_pass = e.report_v1 && e.w_prime && verify_v1(e.challenge, *e.report_v1, *e.w_prime, e.v1_label);
    const bool v2_own = e.report_v2 && e.announce_v2 && e.v2_measured &&
                        verify_v2(*e.report_v2, *e.announce_v2, *e.v2_measured, e.v2_label, variant);
    c.reports_agree = e.report_v1 && e.report_v2 && *e.report_v1 == *e.report_v2;
    if (e.announce_v1 && e.announce_v2) {
        c.announcements_agree = *e.announce_v1 == *e.announce_v2;
    } else {
        c.announcements_agree = !strict_duplicates;
    }
    c.v2_pass = v2_own && c.reports_agree && c.announcements_agree;
    c.pass = (c.on_time || !check_timing) && c.v1_pass && c.v2_pass;
    return c;
}

enum class Reason { ok, timing, v1_inconsistent, v2_inconsistent };

inline const char* to_string(Reason r) {
    switch (r) {
        case Reason::ok:
            return "ok";
        case Reason::timing:
            return "timing";
        case Reason::v1_inconsistent:
            return "v1_inconsistent";
        case Reason::v2_inconsistent:
            return "v2_inconsistent";
    }
    return "?";
}

struct Verdict {
    bool accepted = false;
    Reason reason = Reason::timing;
    std::vector<bool> pair_pass;
    double pool_time = kNever;
};

/// accepted iff every pair passes and every response arrived in time. The
/// reason names the first failing category in the order timing, V1, V2.
inline Verdict pool_verdict(const std::vector<PairChecks>& checks, bool check_timing) {
    Verdict v;
    bool timing = true, v1 = true, v2 = true;
    for (const auto& c : checks) {
        v.pair_pass.push_back(c.pass);
        timing = timing && (c.on_time || !check_timing);
        v1 = v1 && c.v1_pass;
        v2 = v2 && c.v2_pass;
    }
    v.reason = !timing ? Reason::timing : !v1 ? Reason::v1_inconsistent : !v2 ? Reason::v2_inconsistent : Reason::ok;
    v.accepted = v.reason == Reason::ok;
    return v;
}

struct PairTimestamps {
    double prepare = kNever;
    double teleport = kNever;
    double prover_bsm = kNever;
    double report_v1 = kNever;
    double announce_v1 = kNever;
    double report_v2 = kNever;
    double announce_v2 = kNever;
    double v2_measure = kNever;
};

/// Observer record of one pair after the run has gone quiet. Holds every
/// arrival, including copies that came after the deadline.
struct PairTranscript {
    std::size_t index = 0;
    Bit challenge = 0;
    BellLabel v1_label;
    BellLabel v2_label;
    std::optional<BsmOutcome> w_prime;
    std::optional<Announcement> pp_prime;
    std::optional<Announcement> pp_prime_at_v1;
    std::optional<Bit> prover_state_report;
    std::optional<Bit> report_at_v2;
    std::optional<Bit> v2_outcome;
    PairTimestamps timestamps;
    PairChecks checks;
};

/// Shared mechanics for quantum operations performed at a site: ownership
/// checks, statevector update, ledger entry for the outcome.
class Lab {
  public:
    Lab(Timeline& timeline, Rng& rng, std::size_t max_qubits = kDefaultMaxQubits)
        : timeline_(timeline), rng_(rng), max_qubits_(max_qubits) {}

    std::uint32_t new_register() {
        registers_.emplace_back(0, max_qubits_);
        return static_cast<std::uint32_t>(registers_.size() - 1);
    }

    StateVector& state(std::uint32_t reg) { return registers_.at(reg); }
    const StateVector& state(std::uint32_t reg) const { return registers_.at(reg); }

    /// Adds `s` to register `reg`, held by `site`. Returns the first new qubit.
    QubitRef prepare(ActorId site, std::uint32_t reg, const StateVector& s) {
        const auto first = static_cast<std::uint32_t>(registers_.at(reg).append(s));
        for (std::uint32_t k = 0; k < s.num_qubits(); ++k) {
            timeline_.hold({reg, first + k}, site);
        }
        return {reg, first};
    }

    QubitRef prepare(ActorId site, std::uint32_t reg, const QubitState& q) {
        return prepare(site, reg, StateVector::from_qubit(q));
    }

    /// Bell-measures (q1, q2) at `site`; the outcome becomes a 2-bit value known only there.
    ValueId bsm_at(ActorId site, QubitRef q1, QubitRef q2, std::string name) {
        check_local(site, q1, q2);
        const BsmOutcome out = bsm(registers_[q1.reg], handle(q1, site), handle(q2, site), rng_);
        const ValueId v = timeline_.originate(site, std::move(name), (out.first << 1U) | out.second, 2);
        const QubitRef affected[] = {q1, q2};
        timeline_.collapse_notice(site, affected, v);
        return v;
    }

    ValueId measure_hadamard_at(ActorId site, QubitRef q, std::string name) {
        timeline_.require_holder(site, q);
        const Bit b = hadamard_measure(registers_[q.reg], handle(q, site), rng_);
        const ValueId v = timeline_.originate(site, std::move(name), b, 1);
        const QubitRef affected[] = {q};
        timeline_.collapse_notice(site, affected, v);
        return v;
    }

    static BsmOutcome outcome_of(const ClassicalValue& v) {
        return {static_cast<Bit>((v.bits >> 1) & 1U), static_cast<Bit>(v.bits & 1U)};
    }

    Rng& rng() noexcept { return rng_; }

  private:
    static QubitHandle handle(QubitRef q, ActorId owner) { return {q.index, owner}; }

    void check_local(ActorId site, QubitRef q1, QubitRef q2) const {
        if (q1.reg != q2.reg) {
            throw InvalidTarget("Bell measurement across independent registers");
        }
        timeline_.require_holder(site, q1);
        timeline_.require_holder(site, q2);
    }

    Timeline& timeline_;
    Rng& rng_;
    std::size_t max_qubits_;
    std::vector<StateVector> registers_;
};

/// One protocol instance: the two verifiers, the prover side supplied by the
/// caller, the pooling event and the transcript.
///
/// Actor ids: V1 = 0, V2 = 1, then the prover side in the order the caller
/// adds it, then the pool. Equal-time events therefore run verifiers first
/// and the pool last.
class Session {
  public:
    /// One message slot of a verifier's inbox: first copy to arrive.
    struct Slot {
        std::optional<ValueId> value;
        double arrival = kNever;

        void offer(ValueId v, double t) {
            if (t < arrival) {
                value = v;
                arrival = t;
            }
        }
    };

    struct PairState {
        std::uint32_t reg = 0;
        QubitRef v1, p1, v2, p2;
        Bit challenge = 0;
        BellLabel label_v1, label_v2;
        ValueId challenge_value = 0, label_v1_value = 0, label_v2_value = 0;
        std::optional<ValueId> w_prime;
        double teleport_time = kNever;
        Slot report_v1, announce_v1, report_v2, announce_v2;
        std::optional<ValueId> v2_measured;
        double v2_measure_time = kNever;
        double prover_bsm_time = kNever;
    };

    Session(ProtocolConfig config, std::uint64_t seed, bool record_log)
        : config_(std::move(config)), rng_(seed), timeline_(record_log), lab_(timeline_, rng_) {
        config_.validate();
        v1_ = timeline_.add_actor("V1", Role::verifier, 0.0);
        v2_ = timeline_.add_actor("V2", Role::verifier, 2.0 * config_.x);
        pairs_.resize(config_.n);
        // Draw order: all challenges first, then quantum sampling in event order.
        for (std::size_t i = 0; i < config_.n; ++i) {
            pairs_[i].challenge = config_.challenge_states.empty() ? rng_.bit() : config_.challenge_states[i];
            pairs_[i].label_v1 = config_.label_v1(i);
            pairs_[i].label_v2 = config_.label_v2(i);
        }
    }

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    const ProtocolConfig& config() const noexcept { return config_; }
    Timeline& timeline() noexcept { return timeline_; }
    const Timeline& timeline() const noexcept { return timeline_; }
    Lab& lab() noexcept { return lab_; }
    Rng& rng() noexcept { return rng_; }
    ActorId v1() const noexcept { return v1_; }
    ActorId v2() const noexcept { return v2_; }
    PairState& pair(std::size_t i) { return pairs_.at(i); }
    const PairState& pair(std::size_t i) const { return pairs_.at(i); }
    std::size_t num_pairs() const noexcept { return pairs_.size(); }

    /// Wires the verifiers. Halves of |v1 p1> go to `endpoint1`, of |v2 p2> to `endpoint2`.
    void start(ActorId endpoint1, ActorId endpoint2) {
        pool_ = timeline_.add_actor("POOL", Role::pool, config_.x);
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            pairs_[i].reg = lab_.new_register();
        }
        timeline_.at(v1_, 0.0, [this, endpoint1](Timeline&) { v1_prepare(endpoint1); });
        timeline_.at(v2_, 0.0, [this, endpoint2](Timeline&) { v2_prepare(endpoint2); });
        timeline_.at(v1_, config_.x, [this](Timeline&) { v1_teleport(); });
        timeline_.on_message(v1_, [this](Timeline&, const Message& m) { v1_receive(m); });
        timeline_.on_message(v2_, [this](Timeline&, const Message& m) { v2_receive(m); });
        if (!config_.diagnostic) {
            timeline_.at(pool_, deadline(config_), [this](Timeline& tl) { pool(tl.now()); });
        }
    }

    /// Runs to quiescence, pools (at the deadline, or at the end in
    /// diagnostic mode) and assembles the transcript.
    void run() {
        timeline_.run_until_quiescent();
        if (config_.diagnostic) {
            double end = deadline(config_);
            for (const auto& m : timeline_.messages()) {
                end = std::max(end, m.arrival_time);
            }
            pool(end);
        }
    }

    const Verdict& verdict() const { return verdict_; }

    std::vector<PairTranscript> transcripts() const {
        std::vector<PairTranscript> out;
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            const auto& p = pairs_[i];
            PairTranscript t;
            t.index = i;
            t.challenge = p.challenge;
            t.v1_label = p.label_v1;
            t.v2_label = p.label_v2;
            if (p.w_prime) {
                t.w_prime = Lab::outcome_of(timeline_.value(*p.w_prime));
            }
            if (p.announce_v2.value) {
                t.pp_prime = announcement_from_value(timeline_.value(*p.announce_v2.value));
            }
            if (p.announce_v1.value) {
                t.pp_prime_at_v1 = announcement_from_value(timeline_.value(*p.announce_v1.value));
            }
            if (p.report_v1.value) {
                t.prover_state_report = static_cast<Bit>(timeline_.value(*p.report_v1.value).bits);
            }
            if (p.report_v2.value) {
                t.report_at_v2 = static_cast<Bit>(timeline_.value(*p.report_v2.value).bits);
            }
            if (p.v2_measured) {
                t.v2_outcome = static_cast<Bit>(timeline_.value(*p.v2_measured).bits);
            }
            t.timestamps = {0.0,           p.teleport_time,       p.prover_bsm_time,     p.report_v1.arrival,
                            p.announce_v1.arrival, p.report_v2.arrival, p.announce_v2.arrival, p.v2_measure_time};
            t.checks = i < checks_.size() ? checks_[i] : PairChecks{};
            out.push_back(t);
        }
        return out;
    }

    /// Latest first-arrival of any required response item over all pairs.
    double complete_response_time() const {
        double t = 0.0;
        for (const auto& p : pairs_) {
            t = std::max({t, p.report_v1.arrival, p.report_v2.arrival, p.announce_v2.arrival});
            if (config_.strict_duplicates) {
                t = std::max(t, p.announce_v1.arrival);
            }
        }
        return t;
    }

    /// Latest arrival at either verifier.
    double last_verifier_arrival() const {
        double t = 0.0;
        for (const auto& m : timeline_.messages()) {
            if (m.receiver == v1_ || m.receiver == v2_) {
                t = std::max(t, m.arrival_time);
            }
        }
        return t;
    }

    /// Records a prover-side Bell measurement time for the transcript.
    void note_prover_bsm(std::size_t i, double t) { pairs_.at(i).prover_bsm_time = std::min(pairs_.at(i).prover_bsm_time, t); }

    /// Announcement value in the configured variant, derived from a full outcome at `site`.
    ValueId announce(ActorId site, std::size_t i, ValueId pp) {
        if (config_.variant == Variant::two_bit) {
            return pp;
        }
        const auto full = Lab::outcome_of(timeline_.value(pp));
        timeline_.read(site, pp);
        return timeline_.originate(site, "p[" + std::to_string(i) + "]", reduce_announcement(full, {}), 1, {pp});
    }

  private:
    void v1_prepare(ActorId endpoint) {
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            auto& p = pairs_[i];
            const std::string idx = "[" + std::to_string(i) + "]";
            p.challenge_value = timeline_.originate(v1_, "psi" + idx, p.challenge);
            p.label_v1_value = timeline_.originate(v1_, "label_v1" + idx, (p.label_v1.a << 1U) | p.label_v1.b, 2);
            p.v1 = lab_.prepare(v1_, p.reg, make_bell(p.label_v1));
            p.p1 = {p.reg, p.v1.index + 1};
            timeline_.send(v1_, endpoint, {}, {p.p1}, "half", static_cast<std::uint32_t>(i));
        }
    }

    void v2_prepare(ActorId endpoint) {
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            auto& p = pairs_[i];
            p.label_v2_value = timeline_.originate(v2_, "label_v2[" + std::to_string(i) + "]",
                                                   (p.label_v2.a << 1U) | p.label_v2.b, 2);
            p.v2 = lab_.prepare(v2_, p.reg, make_bell(p.label_v2));
            p.p2 = {p.reg, p.v2.index + 1};
            timeline_.send(v2_, endpoint, {}, {p.p2}, "half", static_cast<std::uint32_t>(i));
        }
    }

    void v1_teleport() {
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            auto& p = pairs_[i];
            const Bit psi = static_cast<Bit>(timeline_.read(v1_, p.challenge_value));
            const QubitRef payload = lab_.prepare(v1_, p.reg, hadamard_eigenstate(psi));
            p.w_prime = lab_.bsm_at(v1_, payload, p.v1, "w_prime[" + std::to_string(i) + "]");
            p.teleport_time = timeline_.now();
        }
    }

    /// Message tags understood by verifiers: "response" = [report, announcement],
    /// "report" = [report], "announce" = [announcement].
    void file(const Message& m, Slot& report, Slot& announcement) {
        if (m.tag == "response" && m.values.size() == 2) {
            report.offer(m.values[0], m.arrival_time);
            announcement.offer(m.values[1], m.arrival_time);
        } else if (m.tag == "report" && m.values.size() == 1) {
            report.offer(m.values[0], m.arrival_time);
        } else if (m.tag == "announce" && m.values.size() == 1) {
            announcement.offer(m.values[0], m.arrival_time);
        }
    }

    void v1_receive(const Message& m) {
        if (m.stream < pairs_.size()) {
            auto& p = pairs_[m.stream];
            file(m, p.report_v1, p.announce_v1);
        }
    }

    void v2_receive(const Message& m) {
        if (m.stream >= pairs_.size()) {
            return;
        }
        auto& p = pairs_[m.stream];
        file(m, p.report_v2, p.announce_v2);
        // V2 reads its half once the prover-side measurement has been announced.
        if (p.announce_v2.value && !p.v2_measured) {
            p.v2_measured = lab_.measure_hadamard_at(v2_, p.v2, "v2_outcome[" + std::to_string(m.stream) + "]");
            p.v2_measure_time = timeline_.now();
        }
    }

    /// Evidence a verifier holds at `t`. Only values already in its ledger count.
    std::optional<ValueId> seen(ActorId who, const Slot& s, double t) const {
        if (s.value && s.arrival <= t && timeline_.ledger().knows(who, *s.value, t)) {
            return s.value;
        }
        return std::nullopt;
    }

    void pool(double t) {
        checks_.clear();
        const bool check_timing = !config_.diagnostic;
        for (const auto& p : pairs_) {
            PairEvidence e;
            e.challenge = static_cast<Bit>(known(v1_, p.challenge_value, t));
            const auto l1 = known(v1_, p.label_v1_value, t);
            const auto l2 = known(v2_, p.label_v2_value, t);
            e.v1_label = {static_cast<Bit>(l1 >> 1), static_cast<Bit>(l1 & 1U)};
            e.v2_label = {static_cast<Bit>(l2 >> 1), static_cast<Bit>(l2 & 1U)};
            if (p.w_prime && timeline_.ledger().knows(v1_, *p.w_prime, t)) {
                e.w_prime = Lab::outcome_of(timeline_.value(*p.w_prime));
            }
            if (auto v = seen(v1_, p.report_v1, t)) {
                e.report_v1 = static_cast<Bit>(timeline_.value(*v).bits);
            }
            if (auto v = seen(v1_, p.announce_v1, t)) {
                e.announce_v1 = announcement_from_value(timeline_.value(*v));
            }
            if (auto v = seen(v2_, p.report_v2, t)) {
                e.report_v2 = static_cast<Bit>(timeline_.value(*v).bits);
            }
            if (auto v = seen(v2_, p.announce_v2, t)) {
                e.announce_v2 = announcement_from_value(timeline_.value(*v));
            }
            if (p.v2_measured && timeline_.ledger().knows(v2_, *p.v2_measured, t)) {
                e.v2_measured = static_cast<Bit>(timeline_.value(*p.v2_measured).bits);
            }
            e.complete_time = std::max({p.report_v1.arrival, p.report_v2.arrival, p.announce_v2.arrival});
            if (config_.strict_duplicates) {
                e.complete_time = std::max(e.complete_time, p.announce_v1.arrival);
            }
            checks_.push_back(evaluate_pair(e, deadline(config_), config_.variant, config_.strict_duplicates,
                                            check_timing));
        }
        verdict_ = pool_verdict(checks_, check_timing);
        verdict_.pool_time = t;
        timeline_.note(pool_, "pool",
                       std::string(verdict_.accepted ? "ACCEPT" : "REJECT") + " reason=" + to_string(verdict_.reason));
    }

    /// Value a verifier contributes to the pool; it must be in that verifier's ledger.
    std::uint32_t known(ActorId who, ValueId v, double t) const {
        if (!timeline_.ledger().knows(who, v, t)) {
            throw CausalityViolation("pool read a value its verifier did not hold");
        }
        return timeline_.value(v).bits;
    }

    ProtocolConfig config_;
    Rng rng_;
    Timeline timeline_;
    Lab lab_;
    ActorId v1_ = 0, v2_ = 1, pool_ = 0;
    std::vector<PairState> pairs_;
    std::vector<PairChecks> checks_;
    Verdict verdict_;
};

struct RunResult {
    Verdict verdict;
    std::vector<PairTranscript> pairs;
    std::string event_log;
    std::vector<std::string> audit;
    double complete_response_time = kNever;
    double last_verifier_arrival = kNever;
};

inline RunResult collect(const Session& s) {
    RunResult r;
    r.verdict = s.verdict();
    r.pairs = s.transcripts();
    r.event_log = s.timeline().export_log();
    r.audit = s.timeline().audit();
    r.complete_response_time = s.complete_response_time();
    r.last_verifier_arrival = s.last_verifier_arrival();
    return r;
}

/// Honest prover at x: on holding both halves of a pair it reads |psi'> in
/// the Hadamard basis, re-prepares that eigenstate, teleports it to V2 and
/// sends the state report and announcement to both verifiers.
class HonestProver {
  public:
    explicit HonestProver(Session& s) : s_(s) {
        id_ = s.timeline().add_actor("P", Role::prover, s.config().x, s.config().prover_latency);
        received_.assign(s.num_pairs(), 0);
        s.timeline().on_message(id_, [this](Timeline&, const Message& m) { receive(m); });
    }

    ActorId id() const noexcept { return id_; }

  private:
    void receive(const Message& m) {
        if (m.tag != "half" || m.stream >= received_.size() || ++received_[m.stream] < 2) {
            return;
        }
        const std::size_t i = m.stream;
        auto& tl = s_.timeline();
        auto& lab = s_.lab();
        const auto& p = s_.pair(i);
        const std::string idx = "[" + std::to_string(i) + "]";
        const ValueId report = lab.measure_hadamard_at(id_, p.p1, "report" + idx);
        const QubitRef fresh =
            lab.prepare(id_, p.reg, hadamard_eigenstate(static_cast<Bit>(tl.read(id_, report))));
        const ValueId pp = lab.bsm_at(id_, fresh, p.p2, "pp" + idx);
        s_.note_prover_bsm(i, tl.now());
        const ValueId ann = s_.announce(id_, i, pp);
        const auto stream = static_cast<std::uint32_t>(i);
        tl.send(id_, s_.v1(), {report, ann}, {}, "response", stream);
        tl.send(id_, s_.v2(), {report, ann}, {}, "response", stream);
    }

    Session& s_;
    ActorId id_ = 0;
    std::vector<int> received_;
};

inline RunResult run_honest(const ProtocolConfig& config, std::uint64_t seed, bool record_log = true) {
    Session session(config, seed, record_log);
    HonestProver prover(session);
    session.start(prover.id(), prover.id());
    session.run();
    return collect(session);
}

inline nlohmann::ordered_json to_json(const PairTranscript& t) {
    auto label = [](BellLabel l) { return std::string{static_cast<char>('0' + l.a), static_cast<char>('0' + l.b)}; };
    auto time = [](double v) -> nlohmann::ordered_json {
        if (v == kNever) {
            return nullptr;
        }
        return v;
    };
    nlohmann::ordered_json j;
    j["index"] = t.index;
    j["challenge"] = challenge_name(t.challenge);
    j["v1_label"] = label(t.v1_label);
    j["v2_label"] = label(t.v2_label);
    j["w_prime"] = t.w_prime ? nlohmann::ordered_json(announcement_string(*t.w_prime)) : nullptr;
    j["pp_prime"] = t.pp_prime ? nlohmann::ordered_json(announcement_string(*t.pp_prime)) : nullptr;
    j["pp_prime_at_v1"] = t.pp_prime_at_v1 ? nlohmann::ordered_json(announcement_string(*t.pp_prime_at_v1)) : nullptr;
    j["prover_state_report"] = t.prover_state_report ? nlohmann::ordered_json(*t.prover_state_report) : nullptr;
    j["report_at_v2"] = t.report_at_v2 ? nlohmann::ordered_json(*t.report_at_v2) : nullptr;
    j["v2_outcome"] = t.v2_outcome ? nlohmann::ordered_json(*t.v2_outcome) : nullptr;
    auto& ts = j["timestamps"];
    ts["prepare"] = time(t.timestamps.prepare);
    ts["teleport"] = time(t.timestamps.teleport);
    ts["prover_bsm"] = time(t.timestamps.prover_bsm);
    ts["report_v1"] = time(t.timestamps.report_v1);
    ts["announce_v1"] = time(t.timestamps.announce_v1);
    ts["report_v2"] = time(t.timestamps.report_v2);
    ts["announce_v2"] = time(t.timestamps.announce_v2);
    ts["v2_measure"] = time(t.timestamps.v2_measure);
    auto& c = j["checks"];
    c["on_time"] = t.checks.on_time;
    c["v1_pass"] = t.checks.v1_pass;
    c["v2_pass"] = t.checks.v2_pass;
    c["reports_agree"] = t.checks.reports_agree;
    c["announcements_agree"] = t.checks.announcements_agree;
    c["pass"] = t.checks.pass;
    return j;
}

inline nlohmann::ordered_json to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["accepted"] = v.accepted;
    j["reason"] = to_string(v.reason);
    j["pair_pass"] = v.pair_pass;
    j["pool_time"] = v.pool_time;
    return j;
}

/// Structured transcript document: verdict plus one record per pair.
inline nlohmann::ordered_json transcript_json(const RunResult& r) {
    nlohmann::ordered_json j;
    j["verdict"] = to_json(r.verdict);
    j["complete_response_time"] =
        r.complete_response_time == kNever ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.complete_response_time);
    j["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : r.pairs) {
        j["pairs"].push_back(to_json(p));
    }
    return j;
}

}  // namespace qpv

#endif  // QPV_PROTOCOL_HPP
