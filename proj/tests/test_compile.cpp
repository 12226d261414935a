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

#include "psc/compile.hpp"
#include "psc/error.hpp"

namespace psc {
namespace {

BulkTensor family_rc(double g) { return canonicalize_right(family_tensor(g)); }

TEST(Compile, SequentialWindowIsIsometry) {
    const BulkTensor b = family_rc(-1.0 / 3.0);
    for (int q = 1; q <= 6; ++q) {
        const Mat w = build_bulk_wseq(b, q);
        EXPECT_LT((w.adjoint() * w - Mat::Identity(2, 2)).norm(), 1e-12) << "q=" << q;
    }
}

TEST(Compile, ExactWindowHasNoError) {
    const BulkTensor b = family_rc(-1.0 / 3.0);
    const Mat w = build_bulk_wseq(b, 2);
    EXPECT_NEAR(window_cost(w, w), 0.0, 1e-12);
    const Mat4 e = overlap_matrix(w, w);
    EXPECT_NEAR(error_density(b, e), 0.0, 1e-12);
    EXPECT_NEAR(ps_fidelity_bulk_ti(b, e, 18, 6, 2), 1.0, 1e-12);
}

TEST(Compile, PredictedFidelityMatchesSimulation) {
    const BulkTensor b = family_rc(-1.0 / 3.0);
    const int n = 18, l = 6, q = 2;
    const WpsResult w = best_window(b, q, {});
    const Mat4 e = overlap_matrix(build_bulk_wseq(b, q), wps_isometry(w.gates, q));
    const double f = ps_fidelity_bulk_ti(b, e, n, l, q);
    const Vec psi = run_statevector(build_bulk_ps_circuit(b, n, l, q, w.gates));
    const Vec ref = to_statevector(build_bulk_ti_mps(b, n));
    EXPECT_NEAR(std::norm(ref.dot(psi)), f, 1e-8);
    EXPECT_LT(f, 1.0);
}

TEST(Compile, ErrorDensityDecreasesWithOverlap) {
    const BulkTensor b = family_rc(family_coupling_for_length(3.8));
    double prev = 1.0;
    for (int q = 1; q <= 4; ++q) {
        const WpsResult w = best_window(b, q, {});
        const double k = error_density(b, overlap_matrix(build_bulk_wseq(b, q), wps_isometry(w.gates, q)));
        EXPECT_LT(k, prev) << "q=" << q;
        prev = k;
    }
}

TEST(Compile, KappaFitRecoversPlantedValues) {
    std::vector<std::pair<int, double>> pts;
    for (int q = 1; q <= 6; ++q) pts.emplace_back(q, 0.3 * std::exp(-2.0 * q / 1.5));
    const KappaFit f = fit_kappa_scaling(pts, 1.5);
    EXPECT_NEAR(f.kappa0, 0.3, 1e-10);
    EXPECT_NEAR(f.gamma, 2.0, 1e-10);
    EXPECT_EQ(f.points_used, 6);
}

TEST(Compile, IsometryDepthBound) {
    EXPECT_EQ(t_iso(0, 2), 1);
    EXPECT_EQ(t_iso(2, 2), 3);
    EXPECT_EQ(t_iso(2, 3), 10);
}

TEST(Compile, RgBounds) {
    EXPECT_EQ(rg_cnot_depth_bounds(2, 6).seq_rg, 53);
    EXPECT_THROW(rg_cnot_depth_bounds(2, 2), ParameterError);
    EXPECT_GT(rg_cnot_depth_bounds(4, 6).tree_rg, rg_cnot_depth_bounds(4, 6).seq_rg);
}

TEST(Compile, PsCnotDepthIsThreeTimesDepth) {
    const CircuitLayout l = build_ps_layout({30, 1, 5, 2});
    EXPECT_EQ(ps_cnot_depth(l), 3 * l.depth());
}

TEST(Compile, SmallWindowAlwaysSucceeds) {
    EXPECT_DOUBLE_EQ(success_probability(family_rc(-1.0 / 3.0), 1, 30, 1e-3, 5, 1), 1.0);
}

TEST(Compile, EndToEndMeetsTarget) {
    const CompileResult r = compile_end_to_end(family_tensor(-0.333), 30, 0.05);
    EXPECT_GE(r.report.fidelity, 0.95);
    EXPECT_EQ(r.report.l, r.report.q + 1);
    EXPECT_EQ(r.report.cnot_depth, 3 * r.report.depth);
    EXPECT_EQ(r.circuit.num_qubits(), 30);
}

}  // namespace
}  // namespace psc
