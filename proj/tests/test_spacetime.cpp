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

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpv/protocol.hpp"
#include "qpv/spacetime.hpp"

using namespace qpv;

namespace {

ProtocolConfig with_pairs(std::size_t n) {
    ProtocolConfig c;
    c.n = n;
    return c;
}

}  // namespace

TEST(LightTravelTime, Examples) {
    EXPECT_EQ(light_travel_time(0.0, 0.0), 0.0);
    EXPECT_EQ(light_travel_time(0.0, 1.5), 1.5);
    EXPECT_EQ(light_travel_time(1.5, 0.0), 1.5);
    const double x = 1.0, d = 0.25;
    EXPECT_NEAR(light_travel_time(x - d, x + d), 2 * d, 1e-12);
}

TEST(Timeline, EmptyScheduleGivesEmptyLog) {
    Timeline tl;
    tl.run_until_quiescent();
    EXPECT_TRUE(tl.events().empty());
    EXPECT_EQ(tl.export_log(), "");
    EXPECT_TRUE(tl.audit().empty());
}

TEST(Timeline, EqualTimesProcessInActorOrder) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    const auto b = tl.add_actor("B", Role::verifier, 2.0);
    const auto c = tl.add_actor("C", Role::prover, 1.0);
    std::vector<ActorId> order;
    tl.on_message(a, [&](Timeline&, const Message&) { order.push_back(a); });
    tl.on_message(b, [&](Timeline&, const Message&) { order.push_back(b); });
    // Both messages land at t = 1; B was scheduled first but A has the lower id.
    tl.at(c, 0.0, [&](Timeline& t) {
        t.send(c, b, {}, {}, "ping");
        t.send(c, a, {}, {}, "ping");
    });
    tl.run_until_quiescent();
    ASSERT_EQ(order.size(), 2U);
    EXPECT_EQ(order[0], a);
    EXPECT_EQ(order[1], b);
}

TEST(Timeline, ArrivalIsEmitPlusDistance) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    const auto b = tl.add_actor("B", Role::verifier, 3.5, 0.0);
    const auto p = tl.add_actor("P", Role::prover, 0.1, 0.2);
    tl.at(a, 0.5, [&](Timeline& t) { t.send(a, b, {}, {}, "x"); });
    tl.at(p, 0.0, [&](Timeline& t) { t.send(p, b, {}, {}, "y"); });
    tl.run_until_quiescent();
    for (const auto& m : tl.messages()) {
        EXPECT_EQ(m.arrival_time - m.emit_time,
                  light_travel_time(tl.actor(m.sender).position, tl.actor(m.receiver).position));
    }
    EXPECT_EQ(tl.messages()[0].emit_time, 0.2);
    EXPECT_EQ(tl.messages()[1].arrival_time, 4.0);
}

TEST(Timeline, ReadOutsideLightConeThrows) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    const auto b = tl.add_actor("B", Role::verifier, 1.0);
    ValueId v = 0;
    tl.at(a, 0.0, [&](Timeline& t) {
        v = t.originate(a, "secret", 1);
        t.send(a, b, {v}, {}, "carry");
    });
    bool early_threw = false;
    std::uint32_t late = 0;
    tl.at(b, 0.5, [&](Timeline& t) {
        try {
            t.read(b, v);
        } catch (const CausalityViolation&) {
            early_threw = true;
        }
    });
    tl.at(b, 1.5, [&](Timeline& t) { late = t.read(b, v); });
    tl.run_until_quiescent();
    EXPECT_TRUE(early_threw);
    EXPECT_EQ(late, 1U);
    EXPECT_EQ(tl.causality_violations(), 1U);
    EXPECT_EQ(tl.ledger().known_time(b, v), 1.0);
    EXPECT_TRUE(tl.audit().empty());
}

TEST(Timeline, CannotSendUnknownValueOrUnheldQubit) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    const auto b = tl.add_actor("B", Role::verifier, 1.0);
    ValueId v = 0;
    tl.at(a, 0.0, [&](Timeline& t) {
        v = t.originate(a, "v", 0);
        t.hold({0, 0}, a);
    });
    tl.run_until_quiescent();
    tl.at(b, 0.0, [&](Timeline& t) { t.send(b, a, {v}, {}, "leak"); });
    EXPECT_THROW(tl.run_until_quiescent(), CausalityViolation);
    tl.at(b, 0.0, [&](Timeline& t) { t.send(b, a, {}, {{0, 0}}, "steal"); });
    EXPECT_THROW(tl.run_until_quiescent(), CausalityViolation);
}

TEST(Timeline, DerivedValueNeedsKnownDependencies) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    const auto b = tl.add_actor("B", Role::verifier, 1.0);
    tl.at(a, 0.0, [&](Timeline& t) {
        const ValueId v = t.originate(a, "v", 0);
        EXPECT_THROW(t.originate(b, "w", 0, 1, {v}), CausalityViolation);
        EXPECT_NO_THROW(t.originate(a, "u", 1, 1, {v}));
    });
    tl.run_until_quiescent();
}

TEST(Timeline, QubitInFlightHasNoHolder) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    const auto b = tl.add_actor("B", Role::prover, 1.0);
    const QubitRef q{0, 0};
    tl.hold(q, a);
    ActorId mid = 0, end = 0;
    tl.on_message(b, [&](Timeline& t, const Message& m) {
        end = m.receiver;
        t.hold(m.qubits.front(), m.receiver);
    });
    tl.at(a, 0.0, [&](Timeline& t) { t.send(a, b, {}, {q}, "half"); });
    tl.at(a, 0.5, [&](Timeline& t) { mid = t.holder(q); });
    tl.run_until_quiescent();
    EXPECT_EQ(mid, Timeline::kInFlight);
    EXPECT_EQ(end, b);
    EXPECT_EQ(tl.holder(q), b);
}

TEST(Timeline, CollapseNoticeOnlyInformsTheSite) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    const auto b = tl.add_actor("B", Role::prover, 1.0);
    ValueId w = 0;
    tl.at(a, 1.0, [&](Timeline& t) {
        w = t.originate(a, "w", 2, 2);
        const std::vector<QubitRef> affected{{0, 0}, {0, 1}, {0, 2}};
        t.collapse_notice(a, affected, w);
    });
    tl.run_until_quiescent();
    EXPECT_EQ(tl.ledger().known_time(a, w), 1.0);
    EXPECT_EQ(tl.ledger().known_time(b, w), kNever);
    ASSERT_EQ(tl.events().size(), 1U);
    EXPECT_EQ(tl.events()[0].kind, "collapse");
}

TEST(Timeline, ActionsWithoutMeasurementLeaveLedgersUnchanged) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    tl.at(a, 1.0, [&](Timeline& t) { t.note(a, "idle", ""); });
    tl.run_until_quiescent();
    EXPECT_EQ(tl.ledger().num_values(), 0U);
}

TEST(Timeline, SchedulingIntoThePastIsRefused) {
    Timeline tl;
    const auto a = tl.add_actor("A", Role::verifier, 0.0);
    tl.at(a, 1.0, [&](Timeline& t) { EXPECT_THROW(t.at(a, 0.5, [](Timeline&) {}), std::logic_error); });
    tl.run_until_quiescent();
    EXPECT_TRUE(tl.audit().empty());
}

TEST(Timeline, ExportLogIsJsonLines) {
    const auto r = run_honest(with_pairs(2), 3);
    std::istringstream in(r.event_log);
    std::string line;
    std::size_t lines = 0;
    double last = 0.0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j.contains("t") && j.contains("actor") && j.contains("kind") && j.contains("detail"));
        EXPECT_GE(j["t"].get<double>(), last);
        last = j["t"].get<double>();
        ++lines;
    }
    EXPECT_GT(lines, 0U);
}

TEST(Geometry, HonestRoundTripIsTwoX) {
    for (double x : {1.0, 2.5, 3.5}) {
        ProtocolConfig c;
        c.n = 3;
        c.x = x;
        const auto r = run_honest(c, 1);
        EXPECT_EQ(r.last_verifier_arrival, 2 * x);
        EXPECT_TRUE(r.audit.empty());
    }
}

TEST(Determinism, IdenticalSeedsGiveIdenticalLogs) {
    ProtocolConfig c;
    c.n = 5;
    EXPECT_EQ(run_honest(c, 99).event_log, run_honest(c, 99).event_log);
    EXPECT_NE(run_honest(c, 99).event_log, run_honest(c, 100).event_log);
}
