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

#include <array>
#include <cmath>

#include "psc/gradvar.hpp"

namespace psc {
namespace {

TEST(GradVar, ZeroAnglesGiveIdentity) {
    const std::array<double, kGateParams> zero{};
    EXPECT_LT((gate_from_params(zero) - Mat4::Identity()).norm(), 1e-15);
}

TEST(GradVar, ParameterizedGateIsUnitary) {
    const ParamCircuit pc = random_param_circuit(build_ps_layout({6, 2, 3, 1}), 3);
    for (const Mat4 &g : pc.to_circuit().gates) EXPECT_LT(unitarity_error(g), 1e-12);
}

TEST(GradVar, GateDerivativeMatchesDifference) {
    const ParamCircuit pc = random_param_circuit(build_brickwall_layout(2, 1), 4);
    std::array<double, kGateParams> a{};
    std::copy(pc.angles.begin(), pc.angles.end(), a.begin());
    for (int j = 0; j < kGateParams; ++j) {
        auto hi = a, lo = a;
        hi[j] += 1e-6;
        lo[j] -= 1e-6;
        const Mat4 fd = (gate_from_params(hi) - gate_from_params(lo)) / 2e-6;
        EXPECT_LT((fd - gate_param_derivative(a, j)).norm(), 1e-8) << j;
    }
}

TEST(GradVar, FitReachesHaarUnitaries) {
    for (uint64_t s = 0; s < 5; ++s) {
        Rng rng = make_rng(99, s);
        const Mat4 u = haar_unitary(4, rng);
        EXPECT_LT(fit_gate_params(u, s).residual, 1e-8) << s;
    }
}

TEST(GradVar, AdjointMatchesParameterShift) {
    const ParamCircuit pc = random_param_circuit(build_ps_layout({6, 2, 3, 1}), 3);
    for (const NoiseModel nm : {NoiseModel{0.0, 0.0}, NoiseModel{0.01, 0.02}}) {
        const auto g = all_gradients(pc, nm);
        ASSERT_EQ(static_cast<int>(g.size()), pc.num_params());
        for (int j = 0; j < pc.num_params(); j += 7)
            EXPECT_NEAR(g[j], gradient_parameter_shift(pc, nm, j), 1e-10) << j;
    }
}

TEST(GradVar, ParameterShiftMatchesFiniteDifference) {
    const ParamCircuit pc = random_param_circuit(build_ps_layout({5, 1, 2, 1}), 11);
    for (int j = 0; j < pc.num_params(); j += 5) {
        const double ps = gradient_parameter_shift(pc, {0.0, 0.0}, j);
        const double fd = gradient_finite_difference(pc, {0.0, 0.0}, j);
        EXPECT_LE(std::abs(ps - fd), 1e-6 * std::max(1.0, std::abs(ps))) << j;
    }
}

TEST(GradVar, VarianceIsWorkerCountIndependent) {
    const CircuitLayout layout = build_ps_layout({6, 1, 3, 1});
    VarianceOptions o{16, 4, 5, 1};
    const VarianceRecord a = estimate_gradient_variance(layout, {0.0, 0.0}, o);
    o.workers = 3;
    const VarianceRecord b = estimate_gradient_variance(layout, {0.0, 0.0}, o);
    EXPECT_EQ(a.variance, b.variance);
    EXPECT_EQ(a.stderr_, b.stderr_);
    EXPECT_GT(a.variance, 0.0);
}

TEST(GradVar, ExponentFitRecoversPlantedModel) {
    std::vector<VarianceRecord> recs;
    for (int m = 1; m <= 3; ++m)
        for (double p1 : {0.0, 0.01, 0.02}) {
            VarianceRecord r;
            r.params = {8, m, 2, 1};
            r.depth = 2 * m + 2;
            r.p1 = p1;
            r.p2 = 0.005;
            r.variance = std::exp(-1.0 - 0.6 * m - 5.5 * (p1 * r.depth + 2 * r.p2 * m));
            recs.push_back(r);
        }
    const VarianceExponents f = fit_variance_exponents(recs);
    EXPECT_NEAR(f.alpha, 0.6, 1e-10);
    EXPECT_NEAR(f.c_v, 5.5, 1e-10);
    EXPECT_NEAR(f.log_prefactor, -1.0, 1e-10);
}

TEST(GradVar, LogDepthIsEven) {
    for (int n = 4; n <= 64; n *= 2) EXPECT_EQ(log_depth(n) % 2, 0);
    EXPECT_EQ(log_depth(8), 4);
}

}  // namespace
}  // namespace psc
