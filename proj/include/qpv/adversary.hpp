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

#ifndef QPV_ADVERSARY_HPP
#define QPV_ADVERSARY_HPP

#include <cstdint>
#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpv/protocol.hpp"

/// Colluding dishonest provers P1 at x - delta and P2 at x + delta. They
/// intercept both channel halves at t = x - delta and share unlimited
/// entanglement. Every classical value they use passes through the ledger,
/// so a strategy that peeks outside its light cone fails loudly.
namespace qpv {

enum class StrategyKind { guess, swap_and_forward, bounded_rounds };

inline std::string to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::guess:
            return "guess";
        case StrategyKind::swap_and_forward:
            return "swap-and-forward";
        case StrategyKind::bounded_rounds:
            return "bounded-rounds";
    }
    return "?";
}

inline StrategyKind parse_strategy(std::string_view s) {
    if (s == "guess") {
        return StrategyKind::guess;
    }
    if (s == "swap-and-forward" || s == "swap_and_forward") {
        return StrategyKind::swap_and_forward;
    }
    if (s == "bounded-rounds" || s == "bounded_rounds") {
        return StrategyKind::bounded_rounds;
    }
    throw ConfigError("unknown strategy '" + std::string(s) + "' (expected guess, swap-and-forward, bounded-rounds)");
}

struct AttackConfig {
    StrategyKind strategy = StrategyKind::guess;
    double delta = 0.1;
    /// Pre-shared P1-P2 Bell pairs available. Unset: unlimited.
    std::optional<std::size_t> preshared_pairs;
    /// Teleportation rounds for bounded_rounds.
    std::size_t rounds = 1;
    ProtocolConfig base;

    /// Pre-shared pairs the strategy consumes for the whole run.
    std::size_t preshared_needed() const {
        switch (strategy) {
            case StrategyKind::guess:
                return 0;
            case StrategyKind::swap_and_forward:
                return base.n;
            case StrategyKind::bounded_rounds:
                return base.n * (1 + rounds);
        }
        return 0;
    }

    void validate() const {
        base.validate();
        if (!(delta > 0.0) || !(delta < base.x)) {
            throw ConfigError("delta must satisfy 0 < delta < x");
        }
        if (strategy == StrategyKind::bounded_rounds && rounds < 1) {
            throw ConfigError("bounded-rounds needs at least one round");
        }
        if (preshared_pairs && *preshared_pairs < preshared_needed()) {
            throw ConfigError("insufficient pre-shared pairs: strategy needs " + std::to_string(preshared_needed()) +
                              ", have " + std::to_string(*preshared_pairs));
        }
    }
};

/// Handles a strategy gets: the session, both colluders and a record of
/// when they first agreed on everything a response needs.
class AttackContext {
  public:
    AttackContext(Session& s, const AttackConfig& config) : s_(s), config_(config) {
        const double x = s.config().x;
        p1_ = s.timeline().add_actor("P1", Role::adversary, x - config.delta);
        p2_ = s.timeline().add_actor("P2", Role::adversary, x + config.delta);
        agreement_.assign(s.num_pairs(), kNever);
    }

    Session& session() noexcept { return s_; }
    Timeline& timeline() noexcept { return s_.timeline(); }
    Lab& lab() noexcept { return s_.lab(); }
    const AttackConfig& config() const noexcept { return config_; }
    double x() const noexcept { return s_.config().x; }
    ActorId p1() const noexcept { return p1_; }
    ActorId p2() const noexcept { return p2_; }

    /// Marks that `who` now knows everything needed for pair i's responses.
    /// Agreement is when the second colluder gets there.
    void agree(ActorId who, std::size_t i) {
        auto& slot = agreed_by_[i];
        slot.push_back(who);
        timeline().note(who, "agree", "pair " + std::to_string(i));
        if (slot.size() == 2) {
            agreement_[i] = timeline().now();
        }
    }

    double agreement_time() const {
        double t = 0.0;
        for (double a : agreement_) {
            t = std::max(t, a);
        }
        return t;
    }

    bool any_agreement() const {
        return std::any_of(agreement_.begin(), agreement_.end(), [](double a) { return a != kNever; });
    }

  private:
    Session& s_;
    const AttackConfig& config_;
    ActorId p1_ = 0, p2_ = 0;
    std::vector<double> agreement_;
    std::map<std::size_t, std::vector<ActorId>> agreed_by_;
};

class Strategy {
  public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    /// Which classical values each colluder relies on, and when it has them.
    virtual std::string footprint() const = 0;
    virtual void install(AttackContext& ctx) = 0;
};

namespace detail {

inline std::string idx(std::size_t i) { return "[" + std::to_string(i) + "]"; }

inline BsmOutcome outcome(Timeline& tl, ActorId who, ValueId v) {
    const auto bits = tl.read(who, v);
    return {static_cast<Bit>((bits >> 1) & 1U), static_cast<Bit>(bits & 1U)};
}

/// Announcement value (two-bit or single-bit) for a given sigma_z-relevant
/// first bit and second bit, derived at `who` from `deps`.
inline ValueId derive_announcement(AttackContext& ctx, ActorId who, std::size_t i, Bit first, Bit second,
                                   std::vector<ValueId> deps) {
    if (ctx.session().config().variant == Variant::two_bit) {
        return ctx.timeline().originate(who, "ann" + idx(i), (first << 1U) | second, 2, std::move(deps));
    }
    return ctx.timeline().originate(who, "ann" + idx(i), first, 1, std::move(deps));
}

}  // namespace detail

/// P1 answers V1 from the qubit it holds; P2 must commit V2's material
/// before anything from P1's side of time x can reach it, so it guesses the
/// Hadamard value of |psi'>. P2 teleports the guess at interception and
/// relays its outcome to P1, who forwards it so both verifiers see the same
/// announcement in time.
class GuessStrategy : public Strategy {
  public:
    std::string name() const override { return "guess"; }

    std::string footprint() const override {
        return "P2: guess (own coin, t=x-delta), pp (own BSM, t=x-delta). "
               "P1: report (own measurement, t=x), ann relayed from P2 (t=x+delta).";
    }

    void install(AttackContext& ctx) override {
        ctx_ = &ctx;
        auto& tl = ctx.timeline();
        tl.on_message(ctx.p1(), [this](Timeline&, const Message& m) { p1_receive(m); });
        tl.on_message(ctx.p2(), [this](Timeline&, const Message& m) { p2_receive(m); });
    }

  private:
    void p1_receive(const Message& m) {
        auto& ctx = *ctx_;
        auto& tl = ctx.timeline();
        const std::size_t i = m.stream;
        if (m.tag == "half") {
            // |psi'> appears on this half only once V1 teleports at x.
            tl.at(ctx.p1(), ctx.x(), [this, i](Timeline& t) {
                auto& c = *ctx_;
                const auto& p = c.session().pair(i);
                const ValueId report = c.lab().measure_hadamard_at(c.p1(), p.p1, "report" + detail::idx(i));
                t.send(c.p1(), c.session().v1(), {report}, {}, "report", static_cast<std::uint32_t>(i));
                t.send(c.p1(), c.session().v2(), {report}, {}, "report", static_cast<std::uint32_t>(i));
            });
        } else if (m.tag == "relay") {
            tl.send(ctx.p1(), ctx.session().v1(), {m.values[0]}, {}, "announce", m.stream);
        }
    }

    void p2_receive(const Message& m) {
        if (m.tag != "half") {
            return;
        }
        auto& ctx = *ctx_;
        auto& tl = ctx.timeline();
        auto& s = ctx.session();
        const std::size_t i = m.stream;
        const auto& p = s.pair(i);
        const ValueId guess = tl.originate(ctx.p2(), "guess" + detail::idx(i), s.rng().bit());
        const QubitRef fresh = ctx.lab().prepare(ctx.p2(), p.reg, hadamard_eigenstate(static_cast<Bit>(tl.read(ctx.p2(), guess))));
        const ValueId pp = ctx.lab().bsm_at(ctx.p2(), fresh, p.p2, "pp" + detail::idx(i));
        s.note_prover_bsm(i, tl.now());
        const ValueId ann = s.announce(ctx.p2(), i, pp);
        const auto stream = static_cast<std::uint32_t>(i);
        tl.send(ctx.p2(), s.v2(), {guess, ann}, {}, "response", stream);
        tl.send(ctx.p2(), ctx.p1(), {ann}, {}, "relay", stream);
    }

    AttackContext* ctx_ = nullptr;
};

/// P1 swaps its intercepted half with a pre-shared pair at x - delta, so the
/// teleported state lands on P2's qubit at x. P2 reads it and teleports it
/// on to V2; each side then needs the other's outcomes, which costs one
/// crossing of the 2 delta gap.
class SwapAndForwardStrategy : public Strategy {
  public:
    std::string name() const override { return "swap-and-forward"; }

    std::string footprint() const override {
        return "P1: swap outcome s (t=x-delta); m2, r from P2 (t=x+2delta). "
               "P2: m2, r (own, t=x); s from P1 (t=x+delta).";
    }

    void install(AttackContext& ctx) override {
        ctx_ = &ctx;
        auto& s = ctx.session();
        state_.resize(s.num_pairs());
        auto& tl = ctx.timeline();
        tl.at(ctx.p1(), 0.0, [this](Timeline&) { share_pairs(); });
        tl.on_message(ctx.p1(), [this](Timeline&, const Message& m) { p1_receive(m); });
        tl.on_message(ctx.p2(), [this](Timeline&, const Message& m) { p2_receive(m); });
    }

  private:
    struct PairState {
        QubitRef q1, q2;
        std::optional<ValueId> swap, m2, r;
    };

    void share_pairs() {
        auto& ctx = *ctx_;
        for (std::size_t i = 0; i < state_.size(); ++i) {
            auto& st = state_[i];
            st.q1 = ctx.lab().prepare(ctx.p1(), ctx.session().pair(i).reg, make_bell({0, 0}));
            st.q2 = {st.q1.reg, st.q1.index + 1};
            ctx.timeline().hold(st.q2, ctx.p2());
        }
    }

    void p1_receive(const Message& m) {
        auto& ctx = *ctx_;
        auto& tl = ctx.timeline();
        const std::size_t i = m.stream;
        auto& st = state_[i];
        if (m.tag == "half") {
            st.swap = ctx.lab().bsm_at(ctx.p1(), ctx.session().pair(i).p1, st.q1, "swap" + detail::idx(i));
            tl.send(ctx.p1(), ctx.p2(), {*st.swap}, {}, "relay", m.stream);
        } else if (m.tag == "relay") {
            st.m2 = m.values[0];
            st.r = m.values[1];
            respond(ctx.p1(), i, ctx.session().v1());
        }
    }

    void p2_receive(const Message& m) {
        auto& ctx = *ctx_;
        auto& tl = ctx.timeline();
        const std::size_t i = m.stream;
        auto& st = state_[i];
        if (m.tag == "half") {
            tl.at(ctx.p2(), ctx.x(), [this, i](Timeline& t) {
                auto& c = *ctx_;
                auto& s = state_[i];
                s.m2 = c.lab().measure_hadamard_at(c.p2(), s.q2, "m2" + detail::idx(i));
                s.r = c.lab().bsm_at(c.p2(), s.q2, c.session().pair(i).p2, "r" + detail::idx(i));
                c.session().note_prover_bsm(i, t.now());
                t.send(c.p2(), c.p1(), {*s.m2, *s.r}, {}, "relay", static_cast<std::uint32_t>(i));
            });
        } else if (m.tag == "relay") {
            st.swap = m.values[0];
            respond(ctx.p2(), i, ctx.session().v2());
        }
    }

    /// Report = m2 ^ s.a; announcement = s ^ r, the frame V2's half carries.
    void respond(ActorId who, std::size_t i, ActorId verifier) {
        auto& ctx = *ctx_;
        auto& tl = ctx.timeline();
        auto& st = state_[i];
        const BsmOutcome s = detail::outcome(tl, who, *st.swap);
        const BsmOutcome r = detail::outcome(tl, who, *st.r);
        const Bit m2 = static_cast<Bit>(tl.read(who, *st.m2));
        const ValueId report =
            tl.originate(who, "report" + detail::idx(i), static_cast<Bit>(m2 ^ s.first), 1, {*st.m2, *st.swap});
        const ValueId ann = detail::derive_announcement(ctx, who, i, static_cast<Bit>(s.first ^ r.first),
                                                        static_cast<Bit>(s.second ^ r.second), {*st.swap, *st.r});
        ctx.agree(who, i);
        tl.send(who, verifier, {report, ann}, {}, "response", static_cast<std::uint32_t>(i));
    }

    AttackContext* ctx_ = nullptr;
    std::vector<PairState> state_;
};

/// Abstract instantaneous nonlocal computation: after P1's swap, the state
/// is teleported back and forth `rounds` times at t = x at no cost. Each
/// round adds a sigma_z flip known only to the sender, so decoding needs one
/// classical exchange, which lands at x + 2 delta on both sides.
class BoundedRoundsStrategy : public Strategy {
  public:
    explicit BoundedRoundsStrategy(std::size_t rounds) : rounds_(rounds) {}

    std::string name() const override { return "bounded-rounds(" + std::to_string(rounds_) + ")"; }

    std::string footprint() const override {
        return "Each colluder: own swap/round outcomes and the final reading (t<=x); "
               "the other's outcomes after one exchange (t=x+2delta).";
    }

    void install(AttackContext& ctx) override {
        ctx_ = &ctx;
        state_.resize(ctx.session().num_pairs());
        auto& tl = ctx.timeline();
        tl.at(ctx.p1(), 0.0, [this](Timeline&) { share_pairs(); });
        tl.on_message(ctx.p1(), [this](Timeline&, const Message& m) { receive(ctx_->p1(), m); });
        tl.on_message(ctx.p2(), [this](Timeline&, const Message& m) { receive(ctx_->p2(), m); });
    }

  private:
    struct Side {
        std::vector<ValueId> own;
        std::vector<ValueId> theirs;
        bool got_theirs = false;
    };

    struct PairState {
        QubitRef swap_q1, swap_q2;
        std::vector<QubitRef> half_p1, half_p2;
        std::optional<ValueId> swap, r2, reading;
        std::vector<ValueId> round_outcomes;
        Side p1, p2;
    };

    void share_pairs() {
        auto& ctx = *ctx_;
        for (std::size_t i = 0; i < state_.size(); ++i) {
            auto& st = state_[i];
            const auto reg = ctx.session().pair(i).reg;
            st.swap_q1 = ctx.lab().prepare(ctx.p1(), reg, make_bell({0, 0}));
            st.swap_q2 = {reg, st.swap_q1.index + 1};
            ctx.timeline().hold(st.swap_q2, ctx.p2());
            for (std::size_t k = 0; k < rounds_; ++k) {
                const QubitRef a = ctx.lab().prepare(ctx.p1(), reg, make_bell({0, 0}));
                const QubitRef b{reg, a.index + 1};
                ctx.timeline().hold(b, ctx.p2());
                st.half_p1.push_back(a);
                st.half_p2.push_back(b);
            }
        }
    }

    Side& side(PairState& st, ActorId who) { return who == ctx_->p1() ? st.p1 : st.p2; }

    void receive(ActorId who, const Message& m) {
        auto& ctx = *ctx_;
        auto& tl = ctx.timeline();
        const std::size_t i = m.stream;
        auto& st = state_[i];
        if (m.tag == "half" && who == ctx.p1()) {
            st.swap = ctx.lab().bsm_at(who, ctx.session().pair(i).p1, st.swap_q1, "swap" + detail::idx(i));
            st.p1.own.push_back(*st.swap);
            tl.at(ctx.p2(), ctx.x(), [this, i](Timeline&) { round(i, 0, ctx_->p2(), state_[i].swap_q2); });
        } else if (m.tag == "half") {
            // V2's half is loaded with |+> now; the announcement is fixed once |psi'> is known.
            const QubitRef fresh = ctx.lab().prepare(who, ctx.session().pair(i).reg, ket_plus());
            st.r2 = ctx.lab().bsm_at(who, fresh, ctx.session().pair(i).p2, "r2" + detail::idx(i));
            ctx.session().note_prover_bsm(i, tl.now());
            st.p2.own.push_back(*st.r2);
        } else if (m.tag == "exchange") {
            auto& sd = side(st, who);
            sd.theirs = m.values;
            sd.got_theirs = true;
            respond(who, i);
        }
    }

    /// Round k: `holder` teleports `q` over round pair k to the other colluder.
    void round(std::size_t i, std::size_t k, ActorId holder, QubitRef q) {
        auto& ctx = *ctx_;
        auto& st = state_[i];
        if (k == rounds_) {
            st.reading = ctx.lab().measure_hadamard_at(holder, q, "reading" + detail::idx(i));
            side(st, holder).own.push_back(*st.reading);
            for (ActorId who : {ctx.p1(), ctx.p2()}) {
                ctx.timeline().at(who, ctx.x(), [this, i, who](Timeline& t) {
                    const ActorId other = who == ctx_->p1() ? ctx_->p2() : ctx_->p1();
                    t.send(who, other, side(state_[i], who).own, {}, "exchange", static_cast<std::uint32_t>(i));
                });
            }
            return;
        }
        const bool from_p2 = holder == ctx.p2();
        const QubitRef sender_half = from_p2 ? st.half_p2[k] : st.half_p1[k];
        const QubitRef receiver_half = from_p2 ? st.half_p1[k] : st.half_p2[k];
        const ValueId o = ctx.lab().bsm_at(holder, q, sender_half, "round" + std::to_string(k) + detail::idx(i));
        st.round_outcomes.push_back(o);
        side(st, holder).own.push_back(o);
        const ActorId next = from_p2 ? ctx.p1() : ctx.p2();
        ctx.timeline().at(next, ctx.x(), [this, i, k, next, receiver_half](Timeline&) {
            round(i, k + 1, next, receiver_half);
        });
    }

    /// report = reading ^ s.a ^ sum of round z-bits; announcement first bit = r2.a ^ report.
    void respond(ActorId who, std::size_t i) {
        auto& ctx = *ctx_;
        auto& tl = ctx.timeline();
        auto& st = state_[i];
        const auto& sd = side(st, who);
        std::vector<ValueId> deps = sd.own;
        deps.insert(deps.end(), sd.theirs.begin(), sd.theirs.end());
        Bit report_bit = static_cast<Bit>(tl.read(who, *st.reading));
        report_bit ^= detail::outcome(tl, who, *st.swap).first;
        for (ValueId o : st.round_outcomes) {
            report_bit ^= detail::outcome(tl, who, o).first;
        }
        const BsmOutcome r2 = detail::outcome(tl, who, *st.r2);
        const ValueId report = tl.originate(who, "report" + detail::idx(i), report_bit, 1, deps);
        const ValueId ann =
            detail::derive_announcement(ctx, who, i, static_cast<Bit>(r2.first ^ report_bit), r2.second, deps);
        ctx.agree(who, i);
        const ActorId verifier = who == ctx.p1() ? ctx.session().v1() : ctx.session().v2();
        tl.send(who, verifier, {report, ann}, {}, "response", static_cast<std::uint32_t>(i));
    }

    std::size_t rounds_;
    AttackContext* ctx_ = nullptr;
    std::vector<PairState> state_;
};

inline std::unique_ptr<Strategy> make_strategy(const AttackConfig& config) {
    switch (config.strategy) {
        case StrategyKind::guess:
            return std::make_unique<GuessStrategy>();
        case StrategyKind::swap_and_forward:
            return std::make_unique<SwapAndForwardStrategy>();
        case StrategyKind::bounded_rounds:
            return std::make_unique<BoundedRoundsStrategy>(config.rounds);
    }
    throw ConfigError("unknown strategy");
}

struct AttackOutcome {
    Verdict verdict;
    std::vector<bool> pair_accepted;
    double earliest_complete_response_time = kNever;
    /// When both colluders first held everything a response needs; kNever
    /// for strategies that never coordinate.
    double agreement_time = kNever;
    std::string strategy;
    std::string footprint;
    RunResult run;
};

/// Runs one attack trial with a caller-supplied strategy.
inline AttackOutcome run_attack(const AttackConfig& config, Strategy& strategy, std::uint64_t seed,
                                bool record_log = true) {
    config.validate();
    Session session(config.base, seed, record_log);
    AttackContext ctx(session, config);
    session.start(ctx.p1(), ctx.p2());
    strategy.install(ctx);
    session.run();
    AttackOutcome out;
    out.run = collect(session);
    out.verdict = out.run.verdict;
    out.pair_accepted = out.verdict.pair_pass;
    out.earliest_complete_response_time = out.run.complete_response_time;
    out.agreement_time = ctx.any_agreement() ? ctx.agreement_time() : kNever;
    out.strategy = strategy.name();
    out.footprint = strategy.footprint();
    return out;
}

inline AttackOutcome run_attack(const AttackConfig& config, std::uint64_t seed, bool record_log = true) {
    config.validate();
    auto strategy = make_strategy(config);
    return run_attack(config, *strategy, seed, record_log);
}

}  // namespace qpv

#endif  // QPV_ADVERSARY_HPP
