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


#ifndef PSC_COMPILE_HPP
#define PSC_COMPILE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"
#include "psc/linalg.hpp"
#include "psc/mps.hpp"
#include "psc/sim.hpp"

namespace psc {

// Window conventions. A window at a junction whose right chunk starts at site s
// spans the q+2 qubits s-1 .. s+q (local 0 .. q+1). Its input is the bond
// carried on local qubit 0; its outputs are the physical sites s-1 .. s+q-1
// and the outgoing bond on local qubit q+1. Isometries are 2^{q+2} x 2
// matrices with local qubit 0 most significant.

/// Unitary completing the right-canonical bulk map |alpha>|0> -> sum B^i_{ab} |i>|b>.
Mat4 bulk_gate(const BulkTensor &right_canonical);

/// Unitary preparing (|00> + |11>)/sqrt(2) on qubits (1, 2): the left boundary leg.
Mat4 boundary_gate();

/// Contracts mps_gates[bond_start-1 .. bond_start+q-1] (gate k acts on bond k+1)
/// in ascending order with |0> on the fresh qubits.
Mat build_wseq(const std::vector<Mat4> &mps_gates, int bond_start, int q);

/// Exact window of a bulk-TI state: q+1 copies of the bulk gate.
Mat build_bulk_wseq(const BulkTensor &right_canonical, int q);

/// The 2q-gate inverted window: gates[0..q-1] are the fresh gates of the right
/// chunk on local bonds (1,2) .. (q,q+1) applied first, gates[q..2q-1] the
/// left chunk's continuation on local bonds (0,1) .. (q-1,q) applied after.
Mat wps_isometry(const std::vector<Mat4> &gates, int q);

enum class WpsInit { identity_noise, haar };

struct WpsOptions {
    int max_sweeps = 3000;
    double tol = 1e-13;
    WpsInit init = WpsInit::identity_noise;
    double noise_scale = 1e-2;
    uint64_t seed = 1;
};

struct WpsResult {
    std::vector<Mat4> gates;
    double cost = 1.0;
    int sweeps = 0;
    bool converged = false;
    std::vector<double> cost_trace;  // cost after each sweep
};

/// C = 1 - Re Tr(W_PS^dagger W_SEQ) / 2, lowered by cyclic polar updates of one
/// gate at a time. Throws ConsistencyError if an update raises the cost.
WpsResult optimize_wps(const Mat &wseq, int q, const WpsOptions &options = {});
WpsResult optimize_wps(const Mat &wseq, int q, std::vector<Mat4> initial, const WpsOptions &options);

/// 1 - Re Tr(W_PS^dagger W_SEQ) / 2.
double window_cost(const Mat &wseq, const Mat &wps);

/// E_AW[(2a'+a), (2b'+b)] = sum_p conj(W_PS)[p b', a'] W_SEQ[p b, a].
Mat4 overlap_matrix(const Mat &wseq, const Mat &wps);

/// Multiplies the last window gate by a phase making l^T E_AW r real and
/// nonnegative, with (l, r) the fixed points of the bulk transfer matrix.
void fix_window_phase(const BulkTensor &right_canonical, const Mat &wseq, std::vector<Mat4> &gates, int q);

/// -ln |l^T E_AW r|^2. Throws NumericalError for a non-injective tensor.
double error_density(const BulkTensor &right_canonical, const Mat4 &e_aw);

/// Input qubits (s - 1) of the windows that fit in an N-qubit layout.
std::vector<int> window_inputs(int num_qubits, int chunk_length, int overlap);

/// |<phi|psi_PS>|^2 by transfer-matrix contraction, with the boundary legs of
/// build_bulk_ti_mps and every fitting window replaced by e_aw.
double ps_fidelity_bulk_ti(const BulkTensor &right_canonical, const Mat4 &e_aw, int num_qubits,
                           int chunk_length, int overlap);

/// M = 1 PS circuit for the bulk-TI state: boundary gate on bond 1, window
/// gates at every fitting junction, the bulk gate elsewhere. Junctions whose
/// window does not fit keep the exact sequential gates.
PSCircuit build_bulk_ps_circuit(const BulkTensor &right_canonical, int num_qubits, int chunk_length,
                                int overlap, const std::vector<Mat4> &window_gates);

struct KappaFit {
    double kappa0 = 0.0;
    double gamma = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
};

/// ln kappa = ln kappa0 - gamma q / xi by least squares; points with
/// kappa < 1e-12 are skipped and at least three must remain.
KappaFit fit_kappa_scaling(const std::vector<std::pair<int, double>> &q_kappa, double xi);

/// Fraction of Haar-initialized optimizations whose kappa is within rel_tol of
/// the best kappa among them.
double success_probability(const BulkTensor &tensor, int q, int num_restarts, double rel_tol, uint64_t seed,
                           int workers = 0);

/// ceil((2^{n+m+1} - 2^{2m} - 2n - m - 1) / 4).
long long t_iso(int m, int n);

/// 3 T.
int ps_cnot_depth(const CircuitLayout &layout);

struct RgDepthBounds {
    long long seq_rg = 0;
    long long tree_rg = 0;
};

/// Lower bounds for blocking size q_b > 2k, k = ceil(log2 D).
RgDepthBounds rg_cnot_depth_bounds(int bond_dim, int q_b);

struct CompileReport {
    double kappa = 0.0;
    double fidelity = 1.0;            // exact contraction on the built circuit
    double predicted_fidelity = 1.0;  // exp(-kappa (ceil(N/l) - 1))
    double kappa0 = 0.0;
    double gamma = 0.0;
    int q = 1;
    int l = 2;
    int n_chunks = 1;
    int depth = 0;
    int cnot_depth = 0;
    std::vector<std::pair<int, double>> kappa_by_q;
    std::vector<double> cost_trace;
};

nlohmann::json report_to_json(const CompileReport &report);

struct CompileOptions {
    WpsOptions wps;
    int restarts = 4;  // identity-noise restarts per q, best kept
};

struct CompileResult {
    PSCircuit circuit;
    CompileReport report;
};

/// Tensor is right-canonicalized first. Scans q = 1, 2, ... with l = q + 1 and
/// keeps the first q whose predicted fidelity reaches 1 - eps.
/// Throws ParameterError if no q <= N/2 meets the target.
CompileResult compile_end_to_end(const BulkTensor &tensor, int num_qubits, double eps,
                                 const CompileOptions &options = {});

/// Best-of-restarts optimized window for overlap q, phase fixed.
WpsResult best_window(const BulkTensor &right_canonical, int q, const CompileOptions &options);

}  // namespace psc

#endif  // PSC_COMPILE_HPP
