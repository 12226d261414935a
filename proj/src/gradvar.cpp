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

#include "psc/gradvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "psc/error.hpp"
#include "psc/parallel.hpp"
#include "psc/vqe.hpp"

namespace psc {

namespace {

struct Factor {
    int param;
    Mat4 pauli;
    double sign;
};

// Factors in application order; factor j is exp(-i sign theta P / 2).
const std::array<Factor, kGateParams> &factors() {
    static const std::array<Factor, kGateParams> table = [] {
        const Mat2 id = pauli(0), y = pauli(2), z = pauli(3);
        const auto k2 = [](const Mat2 &a, const Mat2 &b) -> Mat4 { return kron(a, b); };
        const Mat4 xx = k2(pauli(1), pauli(1)), yy = k2(y, y), zz = k2(z, z);
        return std::array<Factor, kGateParams>{{{2, k2(z, id), 1.0},
                                                 {1, k2(y, id), 1.0},
                                                 {0, k2(z, id), 1.0},
                                                 {5, k2(id, z), 1.0},
                                                 {4, k2(id, y), 1.0},
                                                 {3, k2(id, z), 1.0},
                                                 {6, xx, -1.0},
                                                 {7, yy, -1.0},
                                                 {8, zz, -1.0},
                                                 {11, k2(z, id), 1.0},
                                                 {10, k2(y, id), 1.0},
                                                 {9, k2(z, id), 1.0},
                                                 {14, k2(id, z), 1.0},
                                                 {13, k2(id, y), 1.0},
                                                 {12, k2(id, z), 1.0}}};
    }();
    return table;
}

Mat4 factor_matrix(const Factor &f, double theta) {
    return std::cos(theta / 2) * Mat4::Identity() - cplx(0.0, f.sign * std::sin(theta / 2)) * f.pauli;
}

void check_angles(std::span<const double> angles) {
    if (angles.size() != static_cast<size_t>(kGateParams))
        throw ParameterError("gate_from_params: expected 15 angles, got " + std::to_string(angles.size()));
}

}  // namespace

Mat4 gate_from_params(std::span<const double> angles) {
    check_angles(angles);
    Mat4 u = Mat4::Identity();
    for (const auto &f : factors()) u = factor_matrix(f, angles[f.param]) * u;
    return u;
}

Mat4 gate_param_derivative(std::span<const double> angles, int j) {
    check_angles(angles);
    if (j < 0 || j >= kGateParams) throw ParameterError("gate_param_derivative: index out of range");
    Mat4 u = Mat4::Identity();
    for (const auto &f : factors()) {
        Mat4 m = factor_matrix(f, angles[f.param]);
        if (f.param == j) m = (cplx(0.0, -0.5 * f.sign) * f.pauli) * m;
        u = m * u;
    }
    return u;
}

GateFit fit_gate_params(const Mat4 &target, uint64_t seed, int restarts) {
    GateFit best;
    best.residual = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int r = 0; r < std::max(1, restarts) && best.residual > 1e-9; ++r) {
        Rng rng = make_rng(seed, r);
        // Levenberg-Marquardt on the 32 real residuals of target - e^{i phi} U(theta); x = (theta, phi).
        Eigen::VectorXd x(kGateParams + 1);
        for (int j = 0; j <= kGateParams; ++j) x(j) = angle(rng);
        const auto residual = [&](const Eigen::VectorXd &v) {
            const Mat4 d = target - std::exp(cplx(0.0, v(kGateParams))) *
                                        gate_from_params(std::span<const double>(v.data(), kGateParams));
            Eigen::VectorXd out(32);
            for (int k = 0; k < 16; ++k) {
                out(2 * k) = d(k % 4, k / 4).real();
                out(2 * k + 1) = d(k % 4, k / 4).imag();
            }
            return out;
        };
        double lambda = 1e-3;
        Eigen::VectorXd res = residual(x);
        for (int it = 0; it < 300 && res.norm() > 1e-12; ++it) {
            const std::span<const double> th(x.data(), kGateParams);
            const cplx phase = std::exp(cplx(0.0, x(kGateParams)));
            Eigen::MatrixXd jac(32, kGateParams + 1);
            for (int j = 0; j <= kGateParams; ++j) {
                const Mat4 dm = j < kGateParams ? Mat4(-phase * gate_param_derivative(th, j))
                                                : Mat4(-cplx(0.0, 1.0) * phase * gate_from_params(th));
                for (int k = 0; k < 16; ++k) {
                    jac(2 * k, j) = dm(k % 4, k / 4).real();
                    jac(2 * k + 1, j) = dm(k % 4, k / 4).imag();
                }
            }
            const Eigen::MatrixXd jtj = jac.transpose() * jac;
            const Eigen::VectorXd grad = jac.transpose() * res;
            bool improved = false;
            for (int tries = 0; tries < 20 && !improved; ++tries) {
                Eigen::MatrixXd a = jtj;
                a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
                const Eigen::VectorXd step = a.ldlt().solve(-grad);
                const Eigen::VectorXd trial = x + step;
                const Eigen::VectorXd trial_res = residual(trial);
                if (trial_res.norm() < res.norm()) {
                    x = trial;
                    res = trial_res;
                    lambda = std::max(1e-12, lambda * 0.3);
                    improved = true;
                } else {
                    lambda *= 10.0;
                }
            }
            if (!improved) break;
        }
        if (res.norm() < best.residual) {
            best.residual = res.norm();
            for (int j = 0; j < kGateParams; ++j) best.angles[j] = x(j);
        }
    }
    return best;
}

PSCircuit ParamCircuit::to_circuit() const {
    validate();
    PSCircuit c{layout, {}};
    c.gates.reserve(layout.placements().size());
    for (size_t k = 0; k < layout.placements().size(); ++k)
        c.gates.push_back(gate_from_params(std::span<const double>(angles.data() + kGateParams * k, kGateParams)));
    return c;
}

void ParamCircuit::validate() const {
    if (angles.size() != kGateParams * layout.placements().size())
        throw ParameterError("ParamCircuit: need 15 angles per placement");
}

ParamCircuit random_param_circuit(const CircuitLayout &layout, uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    ParamCircuit c{layout, std::vector<double>(kGateParams * layout.placements().size())};
    for (double &a : c.angles) a = angle(rng);
    return c;
}

double noisy_energy_cost(const ParamCircuit &circuit, const NoiseModel &noise) {
    noise.validate();
    const int n = circuit.layout.num_qubits();
    const XYHamiltonian ham{n};
    const PSCircuit c = circuit.to_circuit();
    if (noise.noiseless()) return ham.energy(run_statevector(c));
    return density_expectation(run_density_matrix(c, noise), n, ham.terms());
}

double gradient_parameter_shift(const ParamCircuit &circuit, const NoiseModel &noise, int j) {
    if (j < 0 || j >= circuit.num_params()) throw ParameterError("gradient_parameter_shift: index out of range");
    ParamCircuit shifted = circuit;
    shifted.angles[j] = circuit.angles[j] + std::numbers::pi / 2;
    const double plus = noisy_energy_cost(shifted, noise);
    shifted.angles[j] = circuit.angles[j] - std::numbers::pi / 2;
    const double minus = noisy_energy_cost(shifted, noise);
    return 0.5 * (plus - minus);
}

double gradient_finite_difference(const ParamCircuit &circuit, const NoiseModel &noise, int j, double h) {
    if (j < 0 || j >= circuit.num_params()) throw ParameterError("gradient_finite_difference: index out of range");
    if (!(h > 0.0)) throw ParameterError("gradient_finite_difference: h must be positive");
    ParamCircuit shifted = circuit;
    shifted.angles[j] = circuit.angles[j] + h;
    const double plus = noisy_energy_cost(shifted, noise);
    shifted.angles[j] = circuit.angles[j] - h;
    const double minus = noisy_energy_cost(shifted, noise);
    return (plus - minus) / (2.0 * h);
}

namespace {

Mat xy_matrix(int n) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    Mat h = Mat::Zero(dim, dim);
    for (int b = 1; b < n; ++b) {
        const Eigen::Index lo = Eigen::Index(1) << (n - b - 1), hi = lo << 1, mask = lo | hi;
        for (Eigen::Index x = 0; x < dim; ++x) {
            const Eigen::Index bits = x & mask;
            if (bits == lo || bits == hi) h(x ^ mask, x) += 2.0;
        }
    }
    return h;
}

// Inverse of depolarize(rho, n, qubit, p) for p < 1.
void undepolarize(Mat &rho, int num_qubits, int qubit, double p) {
    if (p == 0.0) return;
    const Eigen::Index bit = Eigen::Index(1) << (num_qubits - qubit);
    const double inv = 1.0 / (1.0 - p);
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        for (Eigen::Index r = 0; r < rho.rows(); ++r) {
            const bool rb = r & bit, cb = c & bit;
            if (rb != cb) {
                rho(r, c) *= inv;
            } else if (!rb) {
                const cplx a = rho(r, c), b = rho(r | bit, c | bit);
                const cplx avg = 0.5 * p * (a + b);
                rho(r, c) = (a - avg) * inv;
                rho(r | bit, c | bit) = (b - avg) * inv;
            }
        }
    }
}

// dE/dtheta for the 15 angles of gate k given the 4x4 matrix T with dE = 2 Re Tr(dU T).
void gate_gradients(const ParamCircuit &circuit, size_t k, const Mat4 &t, std::vector<double> &out) {
    const std::span<const double> th(circuit.angles.data() + kGateParams * k, kGateParams);
    for (int j = 0; j < kGateParams; ++j)
        out[kGateParams * k + j] = 2.0 * (gate_param_derivative(th, j) * t).trace().real();
}

std::vector<double> gradients_statevector(const ParamCircuit &circuit) {
    const int n = circuit.layout.num_qubits();
    const auto &pl = circuit.layout.placements();
    const PSCircuit c = circuit.to_circuit();
    Vec state = run_statevector(c);
    Vec omega = XYHamiltonian{n}.apply(state);
    std::vector<double> out(circuit.angles.size());
    for (size_t k = pl.size(); k-- > 0;) {
        apply_two_qubit(state, n, pl[k].bond, c.gates[k].adjoint());
        // T[b][a] = sum_r conj(omega[(a, r)]) phi[(b, r)], so Tr(dU T) = <omega| dU |phi>.
        const Eigen::Index lo = Eigen::Index(1) << (n - pl[k].bond - 1), hi = lo << 1, mask = lo | hi;
        Mat4 t = Mat4::Zero();
        for (Eigen::Index x = 0; x < state.size(); ++x) {
            if (x & mask) continue;
            const Eigen::Index idx[4] = {x, x | lo, x | hi, x | hi | lo};
            for (int b = 0; b < 4; ++b)
                for (int a = 0; a < 4; ++a) t(b, a) += std::conj(omega(idx[a])) * state(idx[b]);
        }
        gate_gradients(circuit, k, t, out);
        apply_two_qubit(omega, n, pl[k].bond, c.gates[k].adjoint());
    }
    return out;
}

std::vector<double> gradients_density(const ParamCircuit &circuit, const NoiseModel &noise) {
    const int n = circuit.layout.num_qubits();
    const auto &pl = circuit.layout.placements();
    const PSCircuit c = circuit.to_circuit();
    Mat rho = run_density_matrix(c, noise);
    Mat obs = xy_matrix(n);
    std::vector<double> out(circuit.angles.size());
    const auto steps = circuit.layout.steps();
    for (size_t s = steps.size(); s-- > 0;) {
        const auto &step = steps[s];
        for (int q = 1; q <= n; ++q) {
            undepolarize(rho, n, q, noise.p1);
            depolarize(obs, n, q, noise.p1);
        }
        for (size_t k : step) {
            for (int q : {pl[k].bond, pl[k].bond + 1}) {
                undepolarize(rho, n, q, noise.p2);
                depolarize(obs, n, q, noise.p2);
            }
        }
        for (size_t i = step.size(); i-- > 0;) {
            const size_t k = step[i];
            const Mat4 g = c.gates[k];
            conjugate_gate(rho, n, pl[k].bond, g.adjoint());
            // dE = 2 Re Tr(O dU rho U^dagger); T[b][a] = sum_r <(U rho) col (b, r), O col (a, r)>.
            Mat u_rho = rho;
            left_multiply_gate(u_rho, n, pl[k].bond, g);
            const Eigen::Index lo = Eigen::Index(1) << (n - pl[k].bond - 1), hi = lo << 1, mask = lo | hi;
            Mat4 t = Mat4::Zero();
            for (Eigen::Index x = 0; x < rho.rows(); ++x) {
                if (x & mask) continue;
                const Eigen::Index idx[4] = {x, x | lo, x | hi, x | hi | lo};
                for (int b = 0; b < 4; ++b)
                    for (int a = 0; a < 4; ++a) t(b, a) += u_rho.col(idx[b]).dot(obs.col(idx[a]));
            }
            gate_gradients(circuit, k, t, out);
            conjugate_gate(obs, n, pl[k].bond, g.adjoint());
        }
    }
    return out;
}

}  // namespace

std::vector<double> all_gradients(const ParamCircuit &circuit, const NoiseModel &noise) {
    noise.validate();
    circuit.validate();
    if (noise.noiseless()) return gradients_statevector(circuit);
    return gradients_density(circuit, noise);
}

nlohmann::json variance_record_to_json(const VarianceRecord &r) {
    return {{"N", r.params.num_qubits}, {"M", r.params.num_layers}, {"l", r.params.chunk_length},
            {"q", r.params.overlap},    {"kind", r.kind},           {"T", r.depth},
            {"p1", r.p1},               {"p2", r.p2},               {"V_E", r.variance},
            {"stderr", r.stderr_},      {"samples", r.samples},     {"num_params", r.num_params}};
}

VarianceRecord estimate_gradient_variance(const CircuitLayout &layout, const NoiseModel &noise,
                                          const VarianceOptions &options) {
    noise.validate();
    if (options.num_samples < 2) throw ParameterError("estimate_gradient_variance: need at least 2 samples");
    const int batches = std::clamp(options.num_batches, 1, options.num_samples);
    if (!noise.noiseless() && layout.num_qubits() > 10)
        throw CapacityError("estimate_gradient_variance: density-matrix backend is capped at 10 qubits");
    const auto grads = parallel_map<std::vector<double>>(
        options.num_samples,
        [&](size_t s) { return all_gradients(random_param_circuit(layout, mix_seed(options.seed, s)), noise); },
        options.workers);
    const auto pooled_variance = [&](size_t begin, size_t end) {
        double sum = 0.0, sum_sq = 0.0;
        size_t count = 0;
        for (size_t s = begin; s < end; ++s)
            for (double g : grads[s]) {
                sum += g;
                sum_sq += g * g;
                ++count;
            }
        const double mean = sum / count;
        return std::max(0.0, sum_sq / count - mean * mean);
    };
    VarianceRecord rec;
    rec.params = layout.params();
    rec.kind = to_string(layout.kind());
    rec.depth = layout.depth();
    rec.p1 = noise.p1;
    rec.p2 = noise.p2;
    rec.samples = options.num_samples;
    rec.num_params = kGateParams * static_cast<int>(layout.placements().size());
    rec.variance = pooled_variance(0, grads.size());
    if (batches > 1) {
        std::vector<double> per_batch;
        for (int b = 0; b < batches; ++b)
            per_batch.push_back(pooled_variance(grads.size() * b / batches, grads.size() * (b + 1) / batches));
        rec.stderr_ = mean_and_stderr(per_batch).stderr_;
    }
    return rec;
}

VarianceExponents fit_variance_exponents(const std::vector<VarianceRecord> &records) {
    if (records.size() < 3) throw ParameterError("fit_variance_exponents: need at least 3 records");
    const Eigen::Index rows = static_cast<Eigen::Index>(records.size());
    Eigen::MatrixXd a(rows, 3);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto &r = records[i];
        if (!(r.variance > 0.0)) throw NumericalError("fit_variance_exponents: variance must be positive");
        const double m = r.params.num_layers;
        a(i, 0) = 1.0;
        a(i, 1) = -m;
        a(i, 2) = -(r.p1 * r.depth + 2.0 * r.p2 * m);
        y(i) = std::log(r.variance);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < 3) throw ParameterError("fit_variance_exponents: records do not vary both M and noise");
    const Eigen::VectorXd x = svd.solve(y);
    VarianceExponents out{x(0), x(1), x(2), 0.0};
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).square().sum();
    const double ss_res = (a * x - y).squaredNorm();
    out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

int log_depth(int num_qubits) {
    if (num_qubits < 2) throw ParameterError("log_depth: N >= 2 required");
    return 2 * std::max(1, static_cast<int>(std::lround(0.75 * std::log2(num_qubits))));
}

std::vector<ScalingRow> variance_scaling_experiment(const std::vector<int> &n_list, const NoiseModel &noise,
                                                    const VarianceOptions &options) {
    std::vector<ScalingRow> rows;
    for (int n : n_list) {
        const int t = log_depth(n);
        if (t > n - 1) throw ParameterError("variance_scaling_experiment: N too small for a depth-" +
                                            std::to_string(t) + " PS layout");
        const std::pair<std::string, CircuitLayout> families[] = {
            {"sequential", build_sequential_layout(n, 1)},
            {"brickwall", build_brickwall_layout(n, t / 2)},
            {"ps", build_ps_layout({n, 1, t, 1})}};
        for (const auto &[name, layout] : families)
            rows.push_back({name, n, estimate_gradient_variance(layout, noise, options)});
    }
    return rows;
}

}  // namespace psc
