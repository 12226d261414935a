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

#include <cmath>

#include "psc/errorprop.hpp"

namespace psc {
namespace {

TEST(ErrorProp, GateRuleFrequencies) {
    Rng rng = make_rng(3);
    const int trials = 100000;
    int spread = 0;
    for (int t = 0; t < trials; ++t) {
        ErrorString s{1, 0};
        step_gate(s, 1, rng);
        ASSERT_EQ(s[0], s[1]);
        spread += s[0];
    }
    const double sigma = std::sqrt(0.8 * 0.2 / trials);
    EXPECT_NEAR(spread / static_cast<double>(trials), 0.8, 3 * sigma);
    ErrorString clean{0, 0}, full{1, 1};
    step_gate(clean, 1, rng);
    step_gate(full, 1, rng);
    EXPECT_EQ(clean, (ErrorString{0, 0}));
    EXPECT_EQ(full, (ErrorString{1, 1}));
}

TEST(ErrorProp, GatelessEchoMatchesClosedForm) {
    EchoOptions o;
    o.samples = 400;
    const PropagationRecord r = run_echo_mc(gateless_schedule(1000, 10), 0.002, o);
    const double exact = idle_eta_closed_form(0.002, 10);
    EXPECT_NEAR(exact, 1.0 - std::pow(0.998, 20), 1e-15);
    EXPECT_LT(std::abs(r.eta_over_n - exact), 4 * r.stderr_);
}

TEST(ErrorProp, EchoScheduleMirrorsLayout) {
    const CircuitLayout l = build_ps_layout({20, 2, 5, 1});
    const EchoSchedule s = echo_schedule(l);
    ASSERT_EQ(s.total_depth(), 2 * l.depth());
    for (int t = 0; t < l.depth(); ++t) EXPECT_EQ(s.steps[t], s.steps[s.total_depth() - 1 - t]);
}

TEST(ErrorProp, StringLengthRecursion) {
    EXPECT_NEAR(sequential_string_length(1), 4.0, 1e-12);
    EXPECT_NEAR(sequential_string_length(2), 6.4, 1e-12);
    EXPECT_NEAR(sequential_string_length(3), 8.704, 1e-12);
    EXPECT_NEAR(sequential_string_length(4), 10.97728, 1e-12);
    EXPECT_NEAR(sequential_string_length(50), 2.0 + 9.0 * 50 / 4.0, 1e-6);
}

TEST(ErrorProp, GrowthPerLayer) {
    EXPECT_NEAR(mean_growth_per_layer(), 3.0, 1e-14);
    EXPECT_NEAR(mean_growth_partial_sum(200), 3.0, 1e-12);
}

TEST(ErrorProp, SingleLayerMonteCarloMatchesRecursion) {
    const MeanStderr l1 = sequential_string_length_mc(1, 200, 20000, 5);
    EXPECT_LT(std::abs(l1.mean - 4.0), 3 * l1.stderr_);
}

TEST(ErrorProp, WorkerCountIndependent) {
    const CircuitLayout l = build_brickwall_layout(200, 3);
    EchoOptions o;
    o.samples = 300;
    o.workers = 1;
    const PropagationRecord a = run_echo_mc(l, 0.001, o);
    o.workers = 4;
    const PropagationRecord b = run_echo_mc(l, 0.001, o);
    EXPECT_EQ(a.eta_over_n, b.eta_over_n);
    EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(ErrorProp, EtaFitRecoversPlantedCoefficients) {
    std::vector<PropagationRecord> recs;
    for (int m = 1; m <= 4; ++m)
        for (int t : {10, 20}) {
            PropagationRecord r;
            r.params = {1000, m, 8, 1};
            r.depth = t;
            r.p1 = 1e-4;
            r.eta_over_n = r.p1 * t * (1.5 + 0.7 * m);
            r.stderr_ = 1e-6;
            recs.push_back(r);
        }
    const EtaCoefficients f = fit_eta_coefficients(recs);
    EXPECT_NEAR(f.c1, 1.5, 0.015);
    EXPECT_NEAR(f.c2, 0.7, 0.007);
    EXPECT_FALSE(f.regime_warning);
}

TEST(ErrorProp, PowerLawFitRecoversExponent) {
    std::vector<PropagationRecord> recs;
    for (int t : {4, 8, 16, 32}) {
        PropagationRecord r;
        r.depth = t;
        r.eta_over_n = 3e-4 * t * t;
        r.stderr_ = 1e-3 * r.eta_over_n;
        recs.push_back(r);
    }
    const PowerLawFit f = fit_power_law(recs);
    EXPECT_NEAR(f.exponent, 2.0, 1e-10);
    EXPECT_NEAR(f.prefactor, 3e-4, 1e-12);
}

}  // namespace
}  // namespace psc
