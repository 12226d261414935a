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

#include "psc/error.hpp"
#include "psc/vqe.hpp"

namespace psc {
namespace {

TEST(Vqe, FreeFermionEnergyMatchesDiagonalization) {
    for (int n = 2; n <= 10; ++n) EXPECT_NEAR(xy_ground_energy_exact(n), xy_ground_energy_dense(n), 1e-10) << n;
    EXPECT_THROW(xy_ground_energy_dense(15), CapacityError);
}

TEST(Vqe, MatrixFreeHamiltonianMatchesTerms) {
    const XYHamiltonian h{7};
    const Vec psi = run_statevector(haar_circuit(build_ps_layout({7, 2, 3, 1}), 2));
    EXPECT_NEAR(h.energy(psi), statevector_expectation(psi, 7, h.terms()), 1e-12);
    EXPECT_NEAR(psi.dot(h.apply(psi)).real(), h.energy(psi), 1e-12);
}

TEST(Vqe, SingleGateReachesTwoSiteGroundState) {
    const VqeResult r = optimize_energy(build_brickwall_layout(2, 1));
    EXPECT_LT(r.report.nu_xy, 1e-10);
    EXPECT_GE(r.report.nu_xy, -1e-9);
}

TEST(Vqe, EnergyTraceNeverRises) {
    VqeOptions o;
    o.restarts = 2;
    const VqeResult r = optimize_energy(build_ps_layout({8, 1, 3, 1}), o);
    ASSERT_FALSE(r.report.sweep_trace.empty());
    for (size_t k = 1; k < r.report.sweep_trace.size(); ++k)
        EXPECT_LE(r.report.sweep_trace[k], r.report.sweep_trace[k - 1] + 1e-12);
    EXPECT_NEAR(r.report.energy, XYHamiltonian{8}.energy(run_statevector(r.circuit)), 1e-10);
}

TEST(Vqe, SameSeedSameResult) {
    VqeOptions o;
    o.restarts = 2;
    const auto layout = build_ps_layout({6, 1, 3, 1});
    EXPECT_EQ(optimize_energy(layout, o).report.energy, optimize_energy(layout, o).report.energy);
}

TEST(Vqe, DeeperCircuitReachesLowerError) {
    VqeOptions o;
    o.restarts = 3;
    const double one = optimize_energy(build_brickwall_layout(6, 1), o).report.nu_xy;
    const double three = optimize_energy(build_brickwall_layout(6, 3), o).report.nu_xy;
    EXPECT_LT(three, one);
}

TEST(Vqe, ErrorSplitAddsUp) {
    VqeOptions o;
    o.restarts = 2;
    const EnergyReport ps = optimize_energy(build_ps_layout({8, 1, 3, 1}), o).report;
    const EnergyReport seq = optimize_energy(build_sequential_layout(8, 1), o).report;
    const ErrorSplit s = decompose_error(ps, seq);
    EXPECT_NEAR(s.nu_ent, seq.nu_xy, 1e-15);
    if (!s.clamped) EXPECT_NEAR(s.nu_ent + s.nu_cor, ps.nu_xy, 1e-12);
    EXPECT_GE(s.nu_cor, 0.0);
}

TEST(Vqe, NoisyEnergyBackendsAgree) {
    const PSCircuit c = haar_circuit(build_ps_layout({6, 1, 3, 1}), 3);
    const NoiseModel noise{0.001, 0.01};
    const MeanStderr dm = noisy_energy(c, noise);
    NoisyEnergyOptions t;
    t.backend = NoiseBackend::trajectories;
    t.num_trajectories = 4000;
    const MeanStderr tr = noisy_energy(c, noise, t);
    EXPECT_EQ(dm.stderr_, 0.0);
    EXPECT_LT(std::abs(dm.mean - tr.mean), 3.0 * tr.stderr_ + 1e-12);
    const double clean = noisy_energy(c, {0.0, 0.0}).mean;
    EXPECT_NEAR(clean, (XYHamiltonian{6}.energy(run_statevector(c)) - xy_ground_energy_exact(6)) / 6.0, 1e-12);
}

TEST(Vqe, PhaseTablePicksMinima) {
    std::vector<ScanRow> rows(3);
    rows[0].params = {8, 1, 2, 1};
    rows[0].kind = LayoutKind::brickwall;
    rows[0].nu_noisy = 0.3;
    rows[1].params = {8, 1, 4, 1};
    rows[1].nu_noisy = 0.2;
    rows[2].params = {8, 2, 2, 1};
    rows[2].kind = LayoutKind::brickwall;
    rows[2].nu_noisy = 0.25;
    const auto cells = phase_table(rows);
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_DOUBLE_EQ(cells[0].nu_bw, 0.25);
    EXPECT_DOUBLE_EQ(cells[0].nu_ps, 0.2);
    EXPECT_EQ(cells[0].best.chunk_length, 4);
}

TEST(Vqe, PhaseBoundaryBetweenNeighbours) {
    std::vector<PhaseCell> cells(2);
    cells[0] = {0.0, 0.01, 0.3, 0.2, {}};
    cells[1] = {0.01, 0.01, 0.3, 0.3, {}};
    const auto b = phase_boundary(cells);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_DOUBLE_EQ(b[0].p1, 0.005);
    EXPECT_DOUBLE_EQ(b[0].p2, 0.01);
}

}  // namespace
}  // namespace psc
