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

#ifndef QPV_SPACETIME_HPP
#define QPV_SPACETIME_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qpv/common.hpp"

/// One-dimensional event timeline with c = 1. Actors sit at fixed positions,
/// messages travel at light speed, and a knowledge ledger records when each
/// actor could first know each classical value. Quantum collapse is applied
/// to the global state at once; the classical outcome only enters the ledger
/// of the measuring site.
namespace qpv {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

enum class Role { verifier, prover, adversary, pool };

inline const char* to_string(Role r) {
    switch (r) {
        case Role::verifier:
            return "verifier";
        case Role::prover:
            return "prover";
        case Role::adversary:
            return "adversary";
        case Role::pool:
            return "pool";
    }
    return "?";
}

struct WorldPoint {
    double position = 0.0;
    double time = 0.0;
};

struct Actor {
    ActorId id = 0;
    std::string name;
    Role role = Role::prover;
    double position = 0.0;
    /// Processing delay added to every emission. Zero models negligible processing.
    double latency = 0.0;
};

/// Light-speed delay between two positions.
constexpr double light_travel_time(double p1, double p2) noexcept { return p1 < p2 ? p2 - p1 : p1 - p2; }

using ValueId = std::uint32_t;

struct ClassicalValue {
    std::string name;
    std::uint32_t bits = 0;
    std::uint8_t width = 1;
    ActorId origin = 0;
    double time = 0.0;
    std::vector<ValueId> deps;
};

/// A qubit in one of the per-pair registers.
struct QubitRef {
    std::uint32_t reg = 0;
    std::uint32_t index = 0;
    friend auto operator<=>(const QubitRef&, const QubitRef&) = default;
};

struct Message {
    ActorId sender = 0;
    ActorId receiver = 0;
    double emit_time = 0.0;
    double arrival_time = 0.0;
    std::vector<ValueId> values;
    std::vector<QubitRef> qubits;
    std::string tag;
    /// Application-level stream, e.g. the pair index a protocol message belongs to.
    std::uint32_t stream = 0;
};

struct Event {
    double time = 0.0;
    ActorId actor = 0;
    std::string kind;
    std::string detail;
};

/// First-knowable time of every value, per actor.
class KnowledgeLedger {
  public:
    void add_actor() { known_.emplace_back(num_values_, kNever); }

    void add_value() {
        ++num_values_;
        for (auto& row : known_) {
            row.push_back(kNever);
        }
    }

    void learn(ActorId actor, ValueId value, double time) {
        double& slot = known_.at(actor).at(value);
        if (time < slot) {
            slot = time;
        }
    }

    double known_time(ActorId actor, ValueId value) const { return known_.at(actor).at(value); }
    bool knows(ActorId actor, ValueId value, double time) const { return known_time(actor, value) <= time; }
    std::size_t num_actors() const noexcept { return known_.size(); }
    std::size_t num_values() const noexcept { return num_values_; }

  private:
    std::size_t num_values_ = 0;
    std::vector<std::vector<double>> known_;
};

class Timeline {
  public:
    using Action = std::function<void(Timeline&)>;
    using Handler = std::function<void(Timeline&, const Message&)>;

    static constexpr ActorId kInFlight = std::numeric_limits<ActorId>::max();

    explicit Timeline(bool record_log = true) : record_log_(record_log) {}

    Timeline(const Timeline&) = delete;
    Timeline& operator=(const Timeline&) = delete;

    ActorId add_actor(std::string name, Role role, double position, double latency = 0.0) {
        if (!std::isfinite(position) || !(latency >= 0.0)) {
            throw ConfigError("actor " + name + " needs a finite position and non-negative latency");
        }
        const auto id = static_cast<ActorId>(actors_.size());
        actors_.push_back({id, std::move(name), role, position, latency});
        handlers_.emplace_back();
        ledger_.add_actor();
        return id;
    }

    const Actor& actor(ActorId id) const { return actors_.at(id); }
    std::span<const Actor> actors() const noexcept { return actors_; }

    void on_message(ActorId id, Handler h) { handlers_.at(id) = std::move(h); }

    /// Schedules a local action of `id` at absolute `time`.
    void at(ActorId id, double time, Action action) {
        if (time < now_) {
            throw std::logic_error("cannot schedule into the past");
        }
        push(time, id, std::move(action));
    }

    double now() const noexcept { return now_; }
    ActorId current_actor() const noexcept { return current_; }

    /// Creates a classical value at actor `id` now. Every dependency must
    /// already be in that actor's ledger.
    ValueId originate(ActorId id, std::string name, std::uint32_t bits, std::uint8_t width = 1,
                      std::vector<ValueId> deps = {}) {
        for (ValueId d : deps) {
            require_known(id, d, "derive " + name);
        }
        const auto v = static_cast<ValueId>(values_.size());
        values_.push_back({std::move(name), bits, width, id, now_, std::move(deps)});
        ledger_.add_value();
        ledger_.learn(id, v, now_);
        return v;
    }

    /// Reads a value as actor `id` at the current time.
    std::uint32_t read(ActorId id, ValueId v) {
        require_known(id, v, "read");
        return values_[v].bits;
    }

    const ClassicalValue& value(ValueId v) const { return values_.at(v); }
    std::span<const ClassicalValue> values() const noexcept { return values_; }
    const KnowledgeLedger& ledger() const noexcept { return ledger_; }

    /// Emits a message now (plus the sender's latency). Payload values must be
    /// known to the sender and payload qubits held by it.
    const Message& send(ActorId from, ActorId to, std::vector<ValueId> values, std::vector<QubitRef> qubits,
                        std::string tag, std::uint32_t stream = 0) {
        const double emit = now_ + actors_.at(from).latency;
        for (ValueId v : values) {
            require_known(from, v, "send " + tag);
        }
        for (const QubitRef& q : qubits) {
            require_holder(from, q);
            holders_[q] = kInFlight;
        }
        Message m{from, to, emit, emit + light_travel_time(actors_.at(from).position, actors_.at(to).position),
                  std::move(values), std::move(qubits), std::move(tag), stream};
        messages_.push_back(m);
        const std::size_t index = messages_.size() - 1;
        if (record_log_) {
            log(now_, from, "send", describe(m));
        }
        push(m.arrival_time, to, index);
        return messages_.back();
    }

    void hold(QubitRef q, ActorId id) { holders_[q] = id; }

    ActorId holder(QubitRef q) const {
        auto it = holders_.find(q);
        return it == holders_.end() ? kInFlight : it->second;
    }

    void require_holder(ActorId id, QubitRef q) const {
        if (holder(q) != id) {
            throw CausalityViolation(actors_.at(id).name + " does not hold qubit " + std::to_string(q.reg) + ":" +
                                     std::to_string(q.index) + " at t=" + fmt_time(now_));
        }
    }

    /// Records that a measurement at `site` collapsed `affected` (global) and
    /// produced `outcome`, which so far only `site` knows.
    void collapse_notice(ActorId site, std::span<const QubitRef> affected, ValueId outcome) {
        const auto& v = values_.at(outcome);
        if (v.origin != site || v.time != now_) {
            throw std::logic_error("collapse outcome must originate at the measuring site now");
        }
        if (record_log_) {
            std::string detail = v.name + "=" + bits_string(v) + " qubits";
            for (const auto& q : affected) {
                detail += " " + std::to_string(q.reg) + ":" + std::to_string(q.index);
            }
            log(now_, site, "collapse", detail);
        }
    }

    void note(ActorId id, std::string kind, std::string detail) {
        if (record_log_) {
            log(now_, id, std::move(kind), std::move(detail));
        }
    }

    bool record_log() const noexcept { return record_log_; }

    /// Processes events in (time, actor id, sequence) order until none remain.
    void run_until_quiescent() {
        while (!queue_.empty()) {
            Pending p = queue_.top();
            queue_.pop();
            now_ = p.time;
            current_ = p.actor;
            if (auto* action = std::get_if<Action>(&p.what)) {
                (*action)(*this);
            } else {
                deliver(std::get<std::size_t>(p.what));
            }
        }
    }

    std::span<const Message> messages() const noexcept { return messages_; }
    std::span<const Event> events() const noexcept { return events_; }
    std::size_t causality_violations() const noexcept { return violations_; }

    /// Mechanical light-cone audit over everything recorded so far. Returns
    /// one line per violation; empty means the run never signalled faster
    /// than light.
    std::vector<std::string> audit() const {
        std::vector<std::string> problems;
        for (const auto& m : messages_) {
            const double expect =
                m.emit_time + light_travel_time(actors_[m.sender].position, actors_[m.receiver].position);
            if (m.arrival_time != expect) {
                problems.push_back("message " + m.tag + " arrival not at light speed");
            }
            for (ValueId v : m.values) {
                if (ledger_.known_time(m.sender, v) > m.emit_time) {
                    problems.push_back("message " + m.tag + " carries " + values_[v].name + " before sender knew it");
                }
            }
        }
        for (ValueId v = 0; v < values_.size(); ++v) {
            const auto& val = values_[v];
            for (ValueId d : val.deps) {
                if (ledger_.known_time(val.origin, d) > val.time) {
                    problems.push_back(val.name + " derived from " + values_[d].name + " outside light cone");
                }
            }
            for (const auto& a : actors_) {
                const double t = ledger_.known_time(a.id, v);
                if (t == kNever) {
                    continue;
                }
                const double earliest = val.time + light_travel_time(actors_[val.origin].position, a.position);
                if (t < earliest - kTolerance) {
                    problems.push_back(a.name + " knew " + val.name + " at t=" + fmt_time(t) +
                                       " before its light cone t=" + fmt_time(earliest));
                }
            }
        }
        return problems;
    }

    /// One JSON object per line: {"t","actor","kind","detail"}.
    std::string export_log() const {
        std::string out;
        for (const auto& e : events_) {
            nlohmann::ordered_json j;
            j["t"] = e.time;
            j["actor"] = actors_[e.actor].name;
            j["kind"] = e.kind;
            j["detail"] = e.detail;
            out += j.dump();
            out += '\n';
        }
        return out;
    }

    static std::string fmt_time(double t) {
        std::ostringstream os;
        os.precision(12);
        os << t;
        return os.str();
    }

    static std::string bits_string(const ClassicalValue& v) {
        std::string s;
        for (int i = v.width - 1; i >= 0; --i) {
            s += ((v.bits >> i) & 1U) ? '1' : '0';
        }
        return s;
    }

  private:
    struct Pending {
        double time;
        ActorId actor;
        std::uint64_t seq;
        std::variant<Action, std::size_t> what;
    };

    struct Later {
        bool operator()(const Pending& l, const Pending& r) const {
            if (l.time != r.time) {
                return l.time > r.time;
            }
            if (l.actor != r.actor) {
                return l.actor > r.actor;
            }
            return l.seq > r.seq;
        }
    };

    void push(double time, ActorId actor, std::variant<Action, std::size_t> what) {
        queue_.push(Pending{time, actor, next_seq_++, std::move(what)});
    }

    void require_known(ActorId id, ValueId v, const std::string& context) {
        if (v >= values_.size()) {
            throw std::out_of_range("unknown value id");
        }
        if (!ledger_.knows(id, v, now_)) {
            ++violations_;
            throw CausalityViolation(actors_.at(id).name + " cannot " + context + ": " + values_[v].name +
                                     " is outside its past light cone at t=" + fmt_time(now_));
        }
    }

    void deliver(std::size_t index) {
        const Message& m = messages_[index];
        for (ValueId v : m.values) {
            ledger_.learn(m.receiver, v, m.arrival_time);
        }
        for (const QubitRef& q : m.qubits) {
            holders_[q] = m.receiver;
        }
        if (record_log_) {
            log(now_, m.receiver, "receive", describe(m));
        }
        if (handlers_[m.receiver]) {
            // Copy: the handler may send, which can reallocate messages_.
            const Message copy = m;
            handlers_[m.receiver](*this, copy);
        }
    }

    std::string describe(const Message& m) const {
        std::string s = m.tag + "[" + std::to_string(m.stream) + "] " + actors_[m.sender].name + "->" + actors_[m.receiver].name + " emit=" +
                        fmt_time(m.emit_time) + " arrive=" + fmt_time(m.arrival_time);
        for (ValueId v : m.values) {
            s += " " + values_[v].name + "=" + bits_string(values_[v]);
        }
        for (const auto& q : m.qubits) {
            s += " qubit " + std::to_string(q.reg) + ":" + std::to_string(q.index);
        }
        return s;
    }

    void log(double t, ActorId id, std::string kind, std::string detail) {
        events_.push_back({t, id, std::move(kind), std::move(detail)});
    }

    bool record_log_ = true;
    double now_ = 0.0;
    ActorId current_ = 0;
    std::uint64_t next_seq_ = 0;
    std::size_t violations_ = 0;
    std::vector<Actor> actors_;
    std::vector<Handler> handlers_;
    std::vector<ClassicalValue> values_;
    std::vector<Message> messages_;
    std::vector<Event> events_;
    std::map<QubitRef, ActorId> holders_;
    KnowledgeLedger ledger_;
    std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
};

}  // namespace qpv

#endif  // QPV_SPACETIME_HPP
