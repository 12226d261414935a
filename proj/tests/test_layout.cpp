// Copyright 2026 The psc Authors
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

#include "psc/error.hpp"
#include "psc/layout.hpp"

namespace psc {
namespace {

TEST(Layout, ShortChunksCoincideWithBrickwall) {
    const CircuitLayout ps = build_ps_layout({8, 1, 2, 1});
    EXPECT_EQ(ps.depth(), 2);
    EXPECT_TRUE(same_placements(ps, build_brickwall_layout(8, 1)));
}

TEST(Layout, LongChunkCoincidesWithSequential) {
    const CircuitLayout ps = build_ps_layout({8, 2, 7, 1});
    EXPECT_EQ(ps.depth(), 9);
    EXPECT_TRUE(same_placements(ps, build_sequential_layout(8, 2)));
}

TEST(Layout, ChunkCountAndDepth) {
    const CircuitLayout ps = build_ps_layout({30, 1, 5, 2});
    EXPECT_EQ(ps.num_chunks(), 6);
    EXPECT_EQ(ps.depth(), 6);
    EXPECT_EQ(ps.formula_depth(), 6);
}

TEST(Layout, BrickwallFourQubitSchedule) {
    const CircuitLayout bw = build_brickwall_layout(4, 1);
    ASSERT_EQ(bw.depth(), 2);
    const auto steps = bw.steps();
    ASSERT_EQ(steps.size(), 2u);
    ASSERT_EQ(steps[0].size(), 2u);
    EXPECT_EQ(bw.placements()[steps[0][0]].bond, 1);
    EXPECT_EQ(bw.placements()[steps[0][1]].bond, 3);
    ASSERT_EQ(steps[1].size(), 1u);
    EXPECT_EQ(bw.placements()[steps[1][0]].bond, 2);
}

TEST(Layout, BrickwallTwoLayers) {
    const CircuitLayout bw = build_brickwall_layout(8, 2);
    EXPECT_EQ(bw.depth(), 4);
    EXPECT_EQ(bw.gate_count(), 14u);
}

TEST(Layout, SingleBondBrickwallStacksGates) {
    const CircuitLayout bw = build_brickwall_layout(2, 3);
    EXPECT_EQ(bw.gate_count(), 3u);
    EXPECT_EQ(bw.depth(), 3);
}

TEST(Layout, SequentialStaircaseTimes) {
    const CircuitLayout one = build_sequential_layout(10, 1);
    EXPECT_EQ(one.depth(), 9);
    for (const auto &p : one.placements()) EXPECT_EQ(p.time_step, p.bond);
    const CircuitLayout two = build_sequential_layout(10, 2);
    EXPECT_EQ(two.depth(), 11);
    for (const auto &p : two.placements()) EXPECT_EQ(p.time_step, p.bond + 2 * (p.layer - 1));
    EXPECT_EQ(build_sequential_layout(3, 1).gate_count(), 2u);
}

TEST(Layout, WiderOverlapUsesFewerGatesThanExtraLayer) {
    EXPECT_LT(build_ps_layout({30, 1, 5, 3}).gate_count(), build_ps_layout({30, 2, 5, 1}).gate_count());
}

TEST(Layout, BrickwallLightConeWidth) {
    const auto cone = inverse_light_cone(build_brickwall_layout(8, 1), 4);
    EXPECT_EQ(cone.size(), 4u);
    for (int s = 1; s <= 8; ++s) {
        const auto c = inverse_light_cone(build_brickwall_layout(8, 2), s);
        EXPECT_GE(*c.begin(), 1);
        EXPECT_LE(*c.rbegin(), 8);
    }
}

TEST(Layout, JunctionCorrelationDistance) {
    EXPECT_EQ(max_junction_correlation_distance(build_ps_layout({60, 1, 10, 1})), 2);
    EXPECT_EQ(max_junction_correlation_distance(build_ps_layout({60, 2, 10, 2})), 4);
    EXPECT_EQ(max_junction_correlation_distance(build_sequential_layout(9, 1)), 8);
}

TEST(Layout, RejectsInvalidParameters) {
    EXPECT_THROW(build_ps_layout({8, 1, 2, 3}), ParameterError);
    EXPECT_THROW(build_ps_layout({8, 0, 2, 1}), ParameterError);
    EXPECT_THROW(build_ps_layout({1, 1, 2, 1}), ParameterError);
}

TEST(Layout, JsonRoundTrip) {
    const CircuitLayout a = build_ps_layout({14, 2, 5, 2});
    const CircuitLayout b = layout_from_json(layout_to_json(a));
    EXPECT_TRUE(same_placements(a, b));
    EXPECT_EQ(a.depth(), b.depth());
    EXPECT_EQ(a.params(), b.params());
}

}  // namespace
}  // namespace psc
