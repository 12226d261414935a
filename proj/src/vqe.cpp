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


#include "psc/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "psc/error.hpp"
#include "psc/parallel.hpp"

namespace psc {

std::vector<TwoSiteTerm> XYHamiltonian::terms() const {
    const Mat4 h = kron(pauli(1), pauli(1)) + kron(pauli(2), pauli(2));
    std::vector<TwoSiteTerm> out;
    for (int b = 1; b < num_qubits; ++b) out.push_back({b, h});
    return out;
}

Vec XYHamiltonian::apply(const Vec &psi) const {
    Vec out = Vec::Zero(psi.size());
    for (int b = 1; b < num_qubits; ++b) {
        const Eigen::Index lo = Eigen::Index(1) << (num_qubits - b - 1), hi = lo << 1, mask = lo | hi;
        for (Eigen::Index x = 0; x < psi.size(); ++x) {
            const Eigen::Index bits = x & mask;
            if (bits == lo || bits == hi) out(x ^ mask) += 2.0 * psi(x);
        }
    }
    return out;
}

double XYHamiltonian::energy(const Vec &psi) const { return psi.dot(apply(psi)).real(); }

double xy_ground_energy_exact(int num_qubits) {
    if (num_qubits < 2) throw ParameterError("xy_ground_energy_exact: N >= 2 required");
    double e = 0.0;
    for (int k = 1; k <= num_qubits; ++k) {
        const double eps = 4.0 * std::cos(k * std::numbers::pi / (num_qubits + 1));
        if (eps < 0) e += eps;
    }
    return e;
}

double xy_ground_energy_dense(int num_qubits) {
    if (num_qubits < 2) throw ParameterError("xy_ground_energy_dense: N >= 2 required");
    if (num_qubits > 14) throw CapacityError("xy_ground_energy_dense: at most 14 qubits");
    const int n = num_qubits;
    double best = std::numeric_limits<double>::infinity();
    for (int ups = 0; ups <= n; ++ups) {
        std::vector<int> states;
        std::map<int, int> index;
        for (int x = 0; x < (1 << n); ++x)
            if (__builtin_popcount(x) == ups) {
                index[x] = static_cast<int>(states.size());
                states.push_back(x);
            }
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(states.size(), states.size());
        for (size_t c = 0; c < states.size(); ++c)
            for (int b = 0; b + 1 < n; ++b) {
                const int mask = 3 << b;
                const int bits = states[c] & mask;
                if (bits == (1 << b) || bits == (2 << b)) h(index[states[c] ^ mask], c) += 2.0;
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        best = std::min(best, es.eigenvalues()(0));
    }
    return best;
}

nlohmann::json energy_report_to_json(const EnergyReport &r) {
    return {{"energy", r.energy},
            {"ground_energy", r.ground_energy},
            {"nu_xy", r.nu_xy},
            {"nu_ent", r.nu_ent},
            {"nu_cor", r.nu_cor},
            {"converged", r.converged},
            {"sweeps", r.sweeps},
            {"rejected_updates", r.rejected_updates},
            {"polish_steps", r.polish_steps},
            {"params", {{"N", r.params.num_qubits}, {"M", r.params.num_layers}, {"l", r.params.chunk_length},
                        {"q", r.params.overlap}}},
            {"kind", r.kind},
            {"depth", r.depth},
            {"sweep_trace", r.sweep_trace}};
}

namespace {

// X(k, m) = sum over the other qubits of after[k] conj(before[m]).
void gate_environment(Mat4 &x, const Vec &after, const Vec &before, int n, int bond) {
    const Eigen::Index lo = Eigen::Index(1) << (n - bond - 1), hi = lo << 1, mask = lo | hi;
    for (Eigen::Index base = 0; base < after.size(); ++base) {
        if (base & mask) continue;
        const Eigen::Index idx[4] = {base, base | lo, base | hi, base | hi | lo};
        for (int k = 0; k < 4; ++k)
            for (int m = 0; m < 4; ++m) x(k, m) += after(idx[k]) * std::conj(before(idx[m]));
    }
}

// Output state of the circuit and H applied to it.
struct Evaluated {
    Vec state;
    Vec h_state;
    double energy = 0.0;
};

Evaluated evaluate(const XYHamiltonian &ham, const std::vector<GatePlacement> &pl, const std::vector<Mat4> &gates) {
    Evaluated ev{zero_state(ham.num_qubits), {}, 0.0};
    for (size_t k = 0; k < pl.size(); ++k) apply_two_qubit(ev.state, ham.num_qubits, pl[k].bond, gates[k]);
    ev.h_state = ham.apply(ev.state);
    ev.energy = ev.state.dot(ev.h_state).real();
    return ev;
}

// Left-translated gradient: along G_k -> exp(A_k) G_k, dE = Re Tr(grad_k^dagger A_k),
// grad_k = X_k G_k^dagger - G_k X_k^dagger with X_k = Tr_rest(|R_k^dagger H psi><phi_k|).
void energy_gradient(Evaluated ev, const std::vector<GatePlacement> &pl, const std::vector<Mat4> &gates, int n,
                     std::vector<Mat4> &grad) {
    const int num_gates = static_cast<int>(pl.size());
    grad.assign(num_gates, Mat4::Zero());
    for (int k = num_gates - 1; k >= 0; --k) {
        apply_two_qubit(ev.state, n, pl[k].bond, gates[k].adjoint());
        Mat4 x = Mat4::Zero();
        gate_environment(x, ev.h_state, ev.state, n, pl[k].bond);
        const Mat4 c = x * gates[k].adjoint();
        grad[k] = c - c.adjoint();
        apply_two_qubit(ev.h_state, n, pl[k].bond, gates[k].adjoint());
    }
}

double inner(const std::vector<Mat4> &a, const std::vector<Mat4> &b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += (a[k].adjoint() * b[k]).trace().real();
    return s;
}

struct PolishResult {
    double energy;
    int steps;
    bool converged;
};

// Limited-memory BFGS in the left-translated frame; curvature pairs are kept without transport.
// Converged once E falls by less than tol over kWindow steps.
PolishResult polish_lbfgs(const XYHamiltonian &ham, const std::vector<GatePlacement> &pl, std::vector<Mat4> &gates,
                          int max_steps, double tol, std::vector<double> &trace) {
    constexpr int kMemory = 12;
    constexpr double kArmijo = 1e-4;
    constexpr int kWindow = 50;
    std::vector<Mat4> grad, next_grad;
    const int n = ham.num_qubits;
    Evaluated current = evaluate(ham, pl, gates);
    double energy = current.energy;
    energy_gradient(std::move(current), pl, gates, n, grad);
    std::vector<std::vector<Mat4>> s_hist, y_hist;
    std::vector<double> rho_hist;
    const auto axpy = [](std::vector<Mat4> &y, double a, const std::vector<Mat4> &x) {
        for (size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
    };
    int steps = 0;
    std::vector<double> history{energy};
    while (steps < max_steps) {
        std::vector<Mat4> dir = grad;
        const int m = static_cast<int>(s_hist.size());
        std::vector<double> alpha(m);
        for (int i = m - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * inner(s_hist[i], dir);
            axpy(dir, -alpha[i], y_hist[i]);
        }
        const double gamma = m > 0 ? 1.0 / (rho_hist[m - 1] * inner(y_hist[m - 1], y_hist[m - 1])) : 1.0;
        for (auto &d : dir) d *= gamma;
        for (int i = 0; i < m; ++i) axpy(dir, alpha[i] - rho_hist[i] * inner(y_hist[i], dir), s_hist[i]);
        for (auto &d : dir) d = -d;
        double slope = inner(grad, dir);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dir = grad;
            for (auto &d : dir) d = -d;
            slope = inner(grad, dir);
        }
        if (slope > -1e-30) return {energy, steps, true};
        double t = m > 0 ? 1.0 : std::min(1.0, 0.1 / std::sqrt(-slope));
        std::vector<Mat4> trial(gates.size());
        Evaluated ev;
        bool ok = false;
        for (int halvings = 0; halvings < 40; ++halvings, t *= 0.5) {
            for (size_t k = 0; k < gates.size(); ++k) trial[k] = expm_antihermitian(t * dir[k]) * gates[k];
            ev = evaluate(ham, pl, trial);
            if (ev.energy <= energy + kArmijo * t * slope) {
                ok = true;
                break;
            }
        }
        if (!ok) return {energy, steps, true};
        const double next_energy = ev.energy;
        energy_gradient(std::move(ev), pl, trial, n, next_grad);
        ++steps;
        std::vector<Mat4> s_vec = dir, y_vec = next_grad;
        for (auto &d : s_vec) d *= t;
        axpy(y_vec, -1.0, grad);
        const double sy = inner(s_vec, y_vec);
        if (sy > 1e-18) {
            if (static_cast<int>(s_hist.size()) == kMemory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
        }
        if (next_energy > energy + 1e-12 * std::max(1.0, std::abs(energy)))
            throw ConsistencyError("optimize_energy: accepted polish step raised the energy");
        gates.swap(trial);
        grad.swap(next_grad);
        energy = next_energy;
        trace.push_back(energy);
        history.push_back(energy);
        if (steps >= kWindow && history[steps - kWindow] - energy < tol) return {energy, steps, true};
    }
    return {energy, steps, false};
}

}  // namespace

VqeResult optimize_energy(const PSCircuit &initial, const VqeOptions &options) {
    initial.validate();
    const int n = initial.num_qubits();
    if (n > options.max_qubits) throw CapacityError("optimize_energy: N exceeds the statevector cap");
    const XYHamiltonian ham{n};
    const double max_shift = 2.0 * (n - 1);
    const auto &pl = initial.layout.placements();
    const int num_gates = static_cast<int>(pl.size());
    std::vector<Mat4> gates = initial.gates;

    Vec psi = zero_state(n);
    for (int k = 0; k < num_gates; ++k) apply_two_qubit(psi, n, pl[k].bond, gates[k]);
    Vec h_psi = ham.apply(psi);
    double energy = psi.dot(h_psi).real();

    EnergyReport rep;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        const double sweep_start = energy;
        Vec phi = zero_state(n);
        for (int k = 0; k < num_gates; ++k) {
            Vec omega = -h_psi;
            for (int j = num_gates - 1; j > k; --j) apply_two_qubit(omega, n, pl[j].bond, gates[j].adjoint());
            Vec back = phi;
            apply_two_qubit(back, n, pl[k].bond, gates[k]);
            Mat4 y = Mat4::Zero(), p = Mat4::Zero();
            gate_environment(y, omega, phi, n, pl[k].bond);
            gate_environment(p, back, phi, n, pl[k].bond);
            // max_shift - H is positive semidefinite, so the last step never raises E.
            bool accepted = false;
            for (const double shift : {-0.3 * max_shift, 0.0, 0.25 * max_shift, max_shift}) {
                const Mat4 proposal = polar_unitary(shift * p + y);
                Vec trial = phi;
                apply_two_qubit(trial, n, pl[k].bond, proposal);
                for (int j = k + 1; j < num_gates; ++j) apply_two_qubit(trial, n, pl[j].bond, gates[j]);
                Vec h_trial = ham.apply(trial);
                const double e_trial = trial.dot(h_trial).real();
                if (e_trial <= energy + 1e-12 * std::max(1.0, std::abs(energy))) {
                    gates[k] = proposal;
                    psi = std::move(trial);
                    h_psi = std::move(h_trial);
                    energy = std::min(energy, e_trial);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) ++rep.rejected_updates;
            apply_two_qubit(phi, n, pl[k].bond, gates[k]);
        }
        rep.sweep_trace.push_back(energy);
        rep.sweeps = sweep + 1;
        if (sweep_start - energy < options.tol) {
            rep.converged = true;
            break;
        }
    }
    if (options.polish_iterations > 0) {
        const PolishResult pr = polish_lbfgs(ham, pl, gates, options.polish_iterations, options.polish_tol, rep.sweep_trace);
        rep.polish_steps = pr.steps;
        rep.converged = pr.converged;
        energy = pr.energy;
    }
    rep.energy = energy;
    rep.ground_energy = xy_ground_energy_exact(n);
    rep.nu_xy = (rep.energy - rep.ground_energy) / n;
    rep.params = initial.layout.params();
    rep.kind = to_string(initial.layout.kind());
    rep.depth = initial.layout.depth();
    return {PSCircuit{initial.layout, std::move(gates)}, rep};
}

VqeResult optimize_energy(const CircuitLayout &layout, const VqeOptions &options) {
    const int restarts = std::max(1, options.restarts);
    VqeOptions screen = options;
    const bool screening = restarts > 1 && options.screen_iterations < options.polish_iterations;
    if (screening) screen.polish_iterations = options.screen_iterations;
    VqeResult best;
    for (int r = 0; r < restarts; ++r) {
        VqeResult res = optimize_energy(haar_circuit(layout, mix_seed(options.seed, r)), screen);
        if (r == 0 || res.report.energy < best.report.energy) best = std::move(res);
    }
    if (!screening || best.report.converged) return best;
    VqeOptions finish = options;
    finish.max_sweeps = 0;
    finish.polish_iterations = options.polish_iterations - options.screen_iterations;
    VqeResult tail = optimize_energy(best.circuit, finish);
    tail.report.sweeps = best.report.sweeps;
    tail.report.rejected_updates = best.report.rejected_updates;
    tail.report.polish_steps += best.report.polish_steps;
    best.report.sweep_trace.insert(best.report.sweep_trace.end(), tail.report.sweep_trace.begin(),
                                   tail.report.sweep_trace.end());
    tail.report.sweep_trace = std::move(best.report.sweep_trace);
    return tail;
}

ErrorSplit decompose_error(const EnergyReport &report, const EnergyReport &seq) {
    if (report.params.num_qubits != seq.params.num_qubits || report.params.num_layers != seq.params.num_layers)
        throw ParameterError("decompose_error: reports differ in N or M");
    ErrorSplit s;
    s.nu_ent = seq.nu_xy;
    s.nu_cor = report.nu_xy - seq.nu_xy;
    if (s.nu_cor < 0) {
        s.nu_cor = 0.0;
        s.clamped = true;
    }
    return s;
}

MeanStderr noisy_energy(const PSCircuit &circuit, const NoiseModel &noise, const NoisyEnergyOptions &options) {
    const int n = circuit.num_qubits();
    const XYHamiltonian ham{n};
    const double e_gs = xy_ground_energy_exact(n);
    if (options.backend == NoiseBackend::density_matrix) {
        Mat rho = run_density_matrix(circuit, noise);
        return {(density_expectation(rho, n, ham.terms()) - e_gs) / n, 0.0};
    }
    MeanStderr m = run_trajectories(circuit, noise, options.num_trajectories, observable_estimator(ham.terms()),
                                    options.seed, options.workers);
    return {(m.mean - e_gs) / n, m.stderr_ / n};
}

std::vector<ScanRow> layout_scan(int num_qubits, const std::vector<int> &m_list, const std::vector<int> &l_list,
                                 int q, const std::vector<NoiseModel> &noise_grid, const VqeOptions &options,
                                 int workers) {
    std::vector<LayoutParams> layouts;
    for (int m : m_list)
        for (int l : l_list) {
            LayoutParams p{num_qubits, m, l, q};
            p.validate();
            layouts.push_back(p);
        }
    for (const auto &nm : noise_grid) nm.validate();
    auto per_layout = parallel_map<std::vector<ScanRow>>(
        layouts.size(),
        [&](size_t k) {
            const LayoutParams &p = layouts[k];
            CircuitLayout layout = build_ps_layout(p);
            VqeOptions opt = options;
            opt.seed = mix_seed(options.seed, static_cast<uint64_t>(p.num_layers) * 1000 + p.chunk_length);
            VqeResult res = optimize_energy(layout, opt);
            std::vector<ScanRow> rows;
            for (const auto &nm : noise_grid) {
                ScanRow row;
                row.params = p;
                row.kind = (p.chunk_length == 2 && p.overlap == 1) ? LayoutKind::brickwall
                           : (p.chunk_length == num_qubits - 1 && p.overlap == 1) ? LayoutKind::sequential
                                                                                 : LayoutKind::parallel_sequential;
                row.depth = layout.depth();
                row.gates = layout.gate_count();
                row.nu_xy = res.report.nu_xy;
                row.p1 = nm.p1;
                row.p2 = nm.p2;
                row.nu_noisy = nm.noiseless() ? res.report.nu_xy : noisy_energy(res.circuit, nm).mean;
                rows.push_back(row);
            }
            return rows;
        },
        workers);
    std::vector<ScanRow> out;
    for (auto &rows : per_layout) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

std::vector<PhaseCell> phase_table(const std::vector<ScanRow> &rows) {
    std::map<std::pair<double, double>, PhaseCell> cells;
    for (const auto &r : rows) {
        auto [it, fresh] = cells.try_emplace({r.p1, r.p2});
        PhaseCell &c = it->second;
        if (fresh) {
            c.p1 = r.p1;
            c.p2 = r.p2;
            c.nu_bw = c.nu_ps = std::numeric_limits<double>::infinity();
        }
        if (r.kind == LayoutKind::brickwall) c.nu_bw = std::min(c.nu_bw, r.nu_noisy);
        if (r.nu_noisy < c.nu_ps) {
            c.nu_ps = r.nu_noisy;
            c.best = r.params;
        }
    }
    std::vector<PhaseCell> out;
    for (auto &[key, c] : cells) out.push_back(c);
    return out;
}

std::vector<BoundaryPoint> phase_boundary(const std::vector<PhaseCell> &cells, double tol) {
    std::map<std::pair<double, double>, bool> advantage;
    std::vector<double> p1s, p2s;
    for (const auto &c : cells) {
        advantage[{c.p1, c.p2}] = c.nu_bw - c.nu_ps > tol;
        p1s.push_back(c.p1);
        p2s.push_back(c.p2);
    }
    auto uniq = [](std::vector<double> &v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(p1s);
    uniq(p2s);
    std::vector<BoundaryPoint> out;
    auto check = [&](double a1, double a2, double b1, double b2) {
        auto ia = advantage.find({a1, a2}), ib = advantage.find({b1, b2});
        if (ia != advantage.end() && ib != advantage.end() && ia->second != ib->second)
            out.push_back({(a1 + b1) / 2, (a2 + b2) / 2});
    };
    for (double p2 : p2s)
        for (size_t i = 0; i + 1 < p1s.size(); ++i) check(p1s[i], p2, p1s[i + 1], p2);
    for (double p1 : p1s)
        for (size_t i = 0; i + 1 < p2s.size(); ++i) check(p1, p2s[i], p1, p2s[i + 1]);
    return out;
}

}  // namespace psc
