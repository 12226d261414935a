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

#include "psc/mps.hpp"
#include "psc/sim.hpp"

namespace psc {
namespace {

TEST(Mps, FamilyTransferSpectrum) {
    const TransferMatrix e = transfer_matrix(canonicalize(family_tensor(-1.0 / 3.0)));
    ASSERT_EQ(e.eigenvalues.size(), 4u);
    EXPECT_NEAR(std::abs(e.eigenvalues[0]), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e.eigenvalues[1]), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(e.eigenvalues[2]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e.eigenvalues[3]), 0.0, 1e-12);
}

TEST(Mps, FamilyCorrelationLength) {
    EXPECT_NEAR(correlation_length_family(-1.0 / 3.0), 1.0 / std::log(2.0), 1e-12);
    EXPECT_NEAR(family_coupling_for_length(1.0), -(std::exp(1.0) - 1.0) / (std::exp(1.0) + 1.0), 1e-12);
    EXPECT_NEAR(correlation_length(canonicalize(family_tensor(-1.0 / 3.0))), 1.0 / std::log(2.0), 1e-10);
}

TEST(Mps, RandomTensorIsLeftCanonicalAndDeterministic) {
    for (uint64_t s = 0; s < 20; ++s) {
        const BulkTensor t = random_bulk_tensor(s);
        EXPECT_LT(t.left_canonical_error(), 1e-12);
        const BulkTensor u = random_bulk_tensor(s);
        EXPECT_EQ((t.a[0] - u.a[0]).norm(), 0.0);
        EXPECT_EQ((t.a[1] - u.a[1]).norm(), 0.0);
    }
}

TEST(Mps, BulkStateIsNormalized) {
    EXPECT_NEAR(norm(build_bulk_ti_mps(family_tensor(-0.4), 3)), 1.0, 1e-10);
    EXPECT_NEAR(norm(build_bulk_ti_mps(random_bulk_tensor(5), 9)), 1.0, 1e-10);
}

TEST(Mps, OverlapOfBasisStates) {
    const MPSState a = product_state_mps({Eigen::Vector2cd(1, 0), Eigen::Vector2cd(0, 1)});
    const MPSState b = product_state_mps({Eigen::Vector2cd(0, 1), Eigen::Vector2cd(0, 1)});
    EXPECT_NEAR(std::abs(overlap(a, a)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(overlap(a, b)), 0.0, 1e-14);
}

TEST(Mps, FamilyCorrelationsDecayAtHalfPerSite) {
    const MPSState mps = build_bulk_ti_mps(family_tensor(-1.0 / 3.0), 20);
    const Mat2 z = pauli(3);
    const double c4 = std::abs(correlation_function(mps, z, z, 6, 10));
    const double c5 = std::abs(correlation_function(mps, z, z, 6, 11));
    ASSERT_GT(c4, 1e-8);
    EXPECT_NEAR(c5 / c4, 0.5, 1e-6);
}

TEST(Mps, SequentialGatesReproduceFamilyState) {
    const MPSState mps = build_bulk_ti_mps(family_tensor(-1.0 / 3.0), 10);
    const PSCircuit circuit{build_sequential_layout(10, 1), mps_to_sequential_gates(mps)};
    const Vec psi = run_statevector(circuit);
    EXPECT_GT(std::norm(to_statevector(mps).dot(psi)), 1.0 - 1e-10);
}

TEST(Mps, GhzLimitCircuitKeepsSchmidtSpectrum) {
    const MPSState mps = build_bulk_ti_mps(family_tensor(0.0, true), 6);
    const PSCircuit circuit{build_sequential_layout(6, 1), mps_to_sequential_gates(mps)};
    const double s = entanglement_entropy(run_statevector(circuit), 6, 3);
    EXPECT_NEAR(s, entanglement_entropy(mps, 3), 1e-8);
    EXPECT_GT(s, 0.5);
    EXPECT_LE(s, 1.0 + 1e-12);
}

TEST(Mps, JsonRoundTrip) {
    const MPSState a = build_bulk_ti_mps(random_bulk_tensor(3), 6);
    const MPSState b = mps_from_json(mps_to_json(a));
    EXPECT_NEAR(std::abs(overlap(a, b)), 1.0, 1e-14);
}

}  // namespace
}  // namespace psc
