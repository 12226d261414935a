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

#ifndef PSC_GRADVAR_HPP
#define PSC_GRADVAR_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "psc/layout.hpp"
#include "psc/linalg.hpp"
#include "psc/sim.hpp"

namespace psc {

inline constexpr int kGateParams = 15;

/// Angles per gate: [A1 (b, g, d), A2 (b, g, d), core (a, b, c), A3 (b, g, d), A4 (b, g, d)],
/// U = (A3 (x) A4) core (A1 (x) A2), A = Rz(b) Ry(g) Rz(d), core = exp(i (a XX + b YY + c ZZ) / 2).
/// A1 and A3 act on the lower qubit of the bond. Zero angles give the identity.
/// Every angle enters through one factor exp(-i s theta P / 2) with s = +-1.
Mat4 gate_from_params(std::span<const double> angles);

/// dU / d angles[j].
Mat4 gate_param_derivative(std::span<const double> angles, int j);

struct GateFit {
    std::array<double, kGateParams> angles{};
    double residual = 0.0;  // min over global phase of ||U - e^{i phi} U(theta)||_F
};

/// Fits the 15 angles to `target` up to a global phase by gradient descent from random starts.
GateFit fit_gate_params(const Mat4 &target, uint64_t seed, int restarts = 20);

struct ParamCircuit {
    CircuitLayout layout;
    std::vector<double> angles;  // kGateParams per placement, in placement order

    int num_params() const { return static_cast<int>(angles.size()); }
    PSCircuit to_circuit() const;
    void validate() const;
};

/// Angles uniform in [0, 2 pi) from the stream (seed, 0).
ParamCircuit random_param_circuit(const CircuitLayout &layout, uint64_t seed);

/// E_noisy = Tr(rho H_XY): density matrix when noisy (N <= 10), statevector otherwise.
double noisy_energy_cost(const ParamCircuit &circuit, const NoiseModel &noise);

/// [E(theta_j + pi/2) - E(theta_j - pi/2)] / 2 by two direct evaluations.
double gradient_parameter_shift(const ParamCircuit &circuit, const NoiseModel &noise, int j);

/// Central difference [E(theta_j + h) - E(theta_j - h)] / (2h).
double gradient_finite_difference(const ParamCircuit &circuit, const NoiseModel &noise, int j, double h = 1e-5);

/// Every dE/dtheta_j from one forward and one backward pass. The noisy backward pass
/// runs rho through the inverse channels next to the Heisenberg-evolved H.
std::vector<double> all_gradients(const ParamCircuit &circuit, const NoiseModel &noise);

struct VarianceOptions {
    int num_samples = 64;
    int num_batches = 8;
    uint64_t seed = 1;
    int workers = 0;  // 0: default_worker_count()
};

struct VarianceRecord {
    LayoutParams params;
    std::string kind;
    int depth = 0;
    double p1 = 0.0;
    double p2 = 0.0;
    double variance = 0.0;  // pooled over samples and all parameter indices
    double stderr_ = 0.0;   // spread of per-batch variances / sqrt(batches)
    int samples = 0;
    int num_params = 0;
};

nlohmann::json variance_record_to_json(const VarianceRecord &record);

/// Sample s draws its angles from random_param_circuit(layout, mix_seed(seed, s)).
VarianceRecord estimate_gradient_variance(const CircuitLayout &layout, const NoiseModel &noise,
                                          const VarianceOptions &options = {});

/// ln V = c0 - alpha M - c_V (p1 T + 2 p2 M).
struct VarianceExponents {
    double log_prefactor = 0.0;
    double alpha = 0.0;
    double c_v = 0.0;
    double r2 = 0.0;
};

/// Joint least squares over the records; needs at least 3 records spanning M and noise.
VarianceExponents fit_variance_exponents(const std::vector<VarianceRecord> &records);

/// Brickwall depth 2 round(0.75 log2 N), at least 2.
int log_depth(int num_qubits);

struct ScalingRow {
    std::string family;  // "sequential", "brickwall", "ps"
    int num_qubits = 0;
    VarianceRecord record;
};

/// Per N: sequential (M = 1), brickwall of depth log_depth(N), and PS with M = 1, q = 1, l = log_depth(N).
std::vector<ScalingRow> variance_scaling_experiment(const std::vector<int> &n_list, const NoiseModel &noise,
                                                    const VarianceOptions &options = {});

}  // namespace psc

#endif  // PSC_GRADVAR_HPP
