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


#ifndef PSC_VQE_HPP
#define PSC_VQE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "psc/layout.hpp"
#include "psc/sim.hpp"

namespace psc {

/// H = sum_b (X_b X_{b+1} + Y_b Y_{b+1}) on an open chain.
struct XYHamiltonian {
    int num_qubits = 2;

    std::vector<TwoSiteTerm> terms() const;
    /// H psi without building matrices (each term swaps |01> and |10> with weight 2).
    Vec apply(const Vec &psi) const;
    double energy(const Vec &psi) const;
};

/// Sum of the negative single-particle energies 4 cos(k pi / (N+1)), k = 1..N.
double xy_ground_energy_exact(int num_qubits);

/// Lowest eigenvalue from dense diagonalization of every magnetization sector.
/// Throws CapacityError for N > 14.
double xy_ground_energy_dense(int num_qubits);

struct VqeOptions {
    int max_sweeps = 20;
    double tol = 1e-10;  // stop once a sweep lowers E by less than this
    int restarts = 5;
    uint64_t seed = 1;
    int max_qubits = 20;
    int polish_iterations = 2000;  // L-BFGS steps after the sweeps; 0 keeps sweeps only
    double polish_tol = 1e-6;      // stop once 50 steps lower E by less than this
    int screen_iterations = 150;   // polish budget per restart before only the best one continues
};

struct EnergyReport {
    double energy = 0.0;
    double ground_energy = 0.0;
    double nu_xy = 0.0;
    double nu_ent = 0.0;
    double nu_cor = 0.0;
    bool converged = false;
    int sweeps = 0;
    int rejected_updates = 0;
    int polish_steps = 0;
    LayoutParams params;
    std::string kind;
    int depth = 0;
    std::vector<double> sweep_trace;  // energy after each sweep, then after each polish step
};

nlohmann::json energy_report_to_json(const EnergyReport &report);

struct VqeResult {
    PSCircuit circuit;
    EnergyReport report;
};

/// Cyclic single-gate updates: gate k becomes polar(Tr_rest(R^dagger (c - H) R G |phi><phi|))
/// for the first shift c in {-0.3 c_max, 0, c_max / 4, c_max}, c_max = 2(N-1), whose
/// recomputed energy does not rise. At c_max the operator c - H is positive
/// semidefinite and the step cannot raise E. The sweeps are followed by L-BFGS
/// on U(4)^K in left-translated coordinates G_k -> exp(A_k) G_k with an Armijo
/// line search, so every accepted step lowers E. Every restart (Haar initialization
/// from the stream (seed, r)) gets `screen_iterations` polish steps; the lowest
/// one then runs the remaining budget.
VqeResult optimize_energy(const CircuitLayout &layout, const VqeOptions &options = {});

/// Continues from the given gates (one restart).
VqeResult optimize_energy(const PSCircuit &initial, const VqeOptions &options);

struct ErrorSplit {
    double nu_ent = 0.0;
    double nu_cor = 0.0;
    bool clamped = false;
};

/// nu_ent = nu_XY of the sequential reference with the same M,
/// nu_cor = max(0, nu_XY - nu_ent).
ErrorSplit decompose_error(const EnergyReport &report, const EnergyReport &sequential_same_m);

enum class NoiseBackend { density_matrix, trajectories };

struct NoisyEnergyOptions {
    NoiseBackend backend = NoiseBackend::density_matrix;
    int num_trajectories = 1000;
    uint64_t seed = 1;
    int workers = 0;
};

/// (Tr(rho H) - E_GS) / N, with its standard error (zero for the density matrix).
MeanStderr noisy_energy(const PSCircuit &circuit, const NoiseModel &noise, const NoisyEnergyOptions &options = {});

struct ScanLayout {
    LayoutParams params;
    LayoutKind kind = LayoutKind::parallel_sequential;
};

struct ScanRow {
    LayoutParams params;
    LayoutKind kind = LayoutKind::parallel_sequential;
    int depth = 0;
    size_t gates = 0;
    double nu_xy = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double nu_noisy = 0.0;
};

/// Optimizes every layout noiselessly once, then evaluates it on each noise
/// point with the density-matrix backend. Layouts run as independent tasks.
std::vector<ScanRow> layout_scan(int num_qubits, const std::vector<int> &m_list, const std::vector<int> &l_list,
                                 int q, const std::vector<NoiseModel> &noise_grid, const VqeOptions &options,
                                 int workers = 0);

struct PhaseCell {
    double p1 = 0.0;
    double p2 = 0.0;
    double nu_bw = 0.0;  // min over brickwall rows
    double nu_ps = 0.0;  // min over all rows
    LayoutParams best;   // minimizer of nu_ps
};

std::vector<PhaseCell> phase_table(const std::vector<ScanRow> &rows);

struct BoundaryPoint {
    double p1 = 0.0;
    double p2 = 0.0;
};

/// Midpoints between grid neighbours (along p1 or p2) where nu_bw - nu_ps
/// switches between <= tol and > tol.
std::vector<BoundaryPoint> phase_boundary(const std::vector<PhaseCell> &cells, double tol = 1e-9);

}  // namespace psc

#endif  // PSC_VQE_HPP
