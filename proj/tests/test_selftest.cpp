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

#include "qpv/selftest.hpp"

using namespace qpv;

TEST(Selftest, AllSuitesPassOnAFreshBuild) {
    for (const auto& name : selftest_suites()) {
        const auto r = run_selftest_suite(name);
        EXPECT_TRUE(r.ok()) << name << ": " << r.failures << " failures";
    }
}

TEST(Selftest, CaseCounts) {
    EXPECT_EQ(run_selftest_suite("teleport").cases, 1600U);
    EXPECT_EQ(run_selftest_suite("swap").cases, 64U);
    EXPECT_EQ(run_selftest_suite("frame").cases, 16U);
    EXPECT_EQ(run_selftest_suite("reduction").cases, 16U);
}

TEST(Selftest, UnknownSuiteIsAnError) { EXPECT_THROW(run_selftest_suite("bogus"), ConfigError); }

TEST(Selftest, MutatedFrameTableFails) {
    SelftestHooks hooks;
    hooks.frame = [](BellLabel shared, BsmOutcome out) {
        auto f = pauli_frame_from(shared, out);
        if (shared == BellLabel{1, 0}) {
            f.k ^= 1;
        }
        return f;
    };
    EXPECT_FALSE(run_selftest_suite("frame", hooks).ok());
    EXPECT_FALSE(run_selftest_suite("teleport", hooks).ok());
}

TEST(Selftest, MutatedSwapLabelFails) {
    SelftestHooks hooks;
    hooks.swap_label = [](BellLabel, BellLabel, BsmOutcome out) { return BellLabel{out.first, out.second}; };
    const auto r = run_selftest_suite("swap", hooks);
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(r.failures, 48U);
}

TEST(Selftest, MutatedReductionFails) {
    SelftestHooks hooks;
    hooks.reduce = [](BsmOutcome pp, BellLabel) { return pp.second; };
    EXPECT_FALSE(run_selftest_suite("reduction", hooks).ok());
}
