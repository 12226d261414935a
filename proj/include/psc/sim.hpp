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


#ifndef PSC_SIM_HPP
#define PSC_SIM_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "psc/layout.hpp"
#include "psc/linalg.hpp"
#include "psc/mps.hpp"

namespace psc {

/// A layout with one 4x4 unitary per placement; gates[k] belongs to
/// layout.placements()[k]. Basis index of a gate on bond b is 2 i_b + i_{b+1}.
struct PSCircuit {
    CircuitLayout layout;
    std::vector<Mat4> gates;

    int num_qubits() const { return layout.num_qubits(); }
    /// Throws ParameterError on a count mismatch or a non-unitary gate (1e-10).
    void validate() const;
};

PSCircuit identity_circuit(const CircuitLayout &layout);
PSCircuit haar_circuit(const CircuitLayout &layout, uint64_t seed);

/// Layout plus gates in placement order; each gate is {"re": [...], "im": [...]}
/// with 16 row-major entries.
nlohmann::json circuit_to_json(const PSCircuit &circuit);
PSCircuit circuit_from_json(const nlohmann::json &j);

struct NoiseModel {
    double p1 = 0.0;  // idling, per qubit per time step
    double p2 = 0.0;  // per involved qubit per two-qubit gate

    void validate() const;
    bool noiseless() const { return p1 == 0.0 && p2 == 0.0; }
};

/// Statevector helpers; qubit 1 is the most significant bit.
void apply_two_qubit(Vec &psi, int num_qubits, int bond, const Mat4 &u);
void apply_single_qubit(Vec &psi, int num_qubits, int qubit, const Mat2 &u);
Vec zero_state(int num_qubits);

/// Gates in time-step order on |0...0>.
Vec run_statevector(const PSCircuit &circuit, int max_qubits = 24);

struct MpsRunOptions {
    double truncation_threshold = 1e-12;  // singular values below are dropped
    int max_bond = 256;
};

struct MpsRunResult {
    MPSState state;
    int max_bond = 1;
};

/// Gate-by-gate evolution with SVD splitting. Throws CapacityError once a bond
/// would exceed options.max_bond.
MpsRunResult run_mps(const PSCircuit &circuit, const MpsRunOptions &options = {});

/// rho -> (1-p) rho + p (I/2) (x) Tr_q rho on qubit q (1-indexed).
void depolarize(Mat &rho, int num_qubits, int qubit, double p);

/// rho -> U rho for a two-qubit gate on `bond`.
void left_multiply_gate(Mat &rho, int num_qubits, int bond, const Mat4 &u);

/// rho -> U rho U^dagger for a two-qubit gate on `bond`.
void conjugate_gate(Mat &rho, int num_qubits, int bond, const Mat4 &u);

/// Per time step: gates, then p2 on both qubits of every gate, then p1 on all qubits.
Mat run_density_matrix(const PSCircuit &circuit, const NoiseModel &noise, int max_qubits = 10);

/// Tr(rho sum_k terms_k), real part.
double density_expectation(const Mat &rho, int num_qubits, const std::vector<TwoSiteTerm> &terms);

/// <psi| sum_k terms_k |psi>, real part.
double statevector_expectation(const Vec &psi, int num_qubits, const std::vector<TwoSiteTerm> &terms);

using Estimator = std::function<double(const MPSState &)>;
Estimator observable_estimator(std::vector<TwoSiteTerm> terms);
Estimator fidelity_estimator(MPSState reference);

/// Pauli unraveling of the density-matrix noise model: at each noise location
/// X, Y or Z is inserted with probability p/4 each. Trajectory k draws from
/// the stream (seed, k); the reduction runs in index order.
MeanStderr run_trajectories(const PSCircuit &circuit, const NoiseModel &noise, int num_samples,
                            const Estimator &estimator, uint64_t seed, int workers = 0,
                            const MpsRunOptions &options = {});

/// Von Neumann entropy in bits across the cut between qubits `cut` and cut+1.
double entanglement_entropy(const Vec &psi, int num_qubits, int cut);
double entanglement_entropy(const MPSState &mps, int cut);

/// Schmidt coefficients across the cut between sites `cut` and cut+1.
std::vector<double> schmidt_values(const MPSState &mps, int cut);

}  // namespace psc

#endif  // PSC_SIM_HPP
