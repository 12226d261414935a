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


#include "psc/compile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "psc/error.hpp"
#include "psc/layout.hpp"
#include "psc/parallel.hpp"

namespace psc {

namespace {

// Local bond (1-indexed, acts on local qubits bond-1, bond) of window gate k.
int window_bond(int k, int q) { return k < q ? k + 2 : k - q + 1; }

Vec window_input(int n, int alpha) {
    Vec psi = Vec::Zero(Eigen::Index(1) << n);
    psi(Eigen::Index(alpha) << (n - 1)) = 1.0;
    return psi;
}

Mat4 near_identity(Rng &rng, double scale) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat4 x = Mat4::Identity();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) x(r, c) += scale * cplx(normal(rng), normal(rng));
    return polar_unitary(x);
}

// X(k, m) = sum over the other qubits of after[k] conj(before[m]) on local bond.
void accumulate_environment(Mat4 &x, const Vec &after, const Vec &before, int n, int bond) {
    const int sh = n - bond - 1;
    const Eigen::Index lo = Eigen::Index(1) << sh, hi = lo << 1, mask = lo | hi;
    for (Eigen::Index base = 0; base < after.size(); ++base) {
        if (base & mask) continue;
        const Eigen::Index idx[4] = {base, base | lo, base | hi, base | hi | lo};
        for (int k = 0; k < 4; ++k) {
            const cplx a = after(idx[k]);
            if (a == cplx(0.0)) continue;
            for (int m = 0; m < 4; ++m) x(k, m) += a * std::conj(before(idx[m]));
        }
    }
}

Vec vectorized_identity() {
    Vec v = Vec::Zero(4);
    v(0) = v(3) = 1.0;
    return v;
}

}  // namespace

Mat4 bulk_gate(const BulkTensor &b) {
    if (b.bond_dim() != 2) throw ParameterError("bulk_gate: bond dimension must be 2");
    if (b.right_canonical_error() > 1e-10) throw ParameterError("bulk_gate: tensor must be right-canonical");
    Mat cols(4, 2);
    for (int al = 0; al < 2; ++al)
        for (int i = 0; i < 2; ++i)
            for (int be = 0; be < 2; ++be) cols(2 * i + be, al) = b.a[i](al, be);
    Mat full = complete_to_unitary(cols);
    Mat4 u;
    u.col(0) = full.col(0);
    u.col(2) = full.col(1);
    u.col(1) = full.col(2);
    u.col(3) = full.col(3);
    return u;
}

Mat4 boundary_gate() {
    Mat cols = Mat::Zero(4, 1);
    cols(0, 0) = cols(3, 0) = 1.0 / std::sqrt(2.0);
    return complete_to_unitary(cols);
}

Mat build_wseq(const std::vector<Mat4> &mps_gates, int bond_start, int q) {
    if (q < 1 || bond_start < 1 || bond_start + q > static_cast<int>(mps_gates.size()))
        throw ParameterError("build_wseq: window exceeds the available gates");
    const int n = q + 2;
    Mat w(Eigen::Index(1) << n, 2);
    for (int al = 0; al < 2; ++al) {
        Vec psi = window_input(n, al);
        for (int k = 0; k <= q; ++k) apply_two_qubit(psi, n, k + 1, mps_gates[bond_start - 1 + k]);
        w.col(al) = psi;
    }
    return w;
}

Mat build_bulk_wseq(const BulkTensor &b, int q) {
    std::vector<Mat4> gates(q + 1, bulk_gate(b));
    return build_wseq(gates, 1, q);
}

Mat wps_isometry(const std::vector<Mat4> &gates, int q) {
    if (static_cast<int>(gates.size()) != 2 * q) throw ParameterError("wps_isometry: need 2q gates");
    const int n = q + 2;
    Mat w(Eigen::Index(1) << n, 2);
    for (int al = 0; al < 2; ++al) {
        Vec psi = window_input(n, al);
        for (int k = 0; k < 2 * q; ++k) apply_two_qubit(psi, n, window_bond(k, q), gates[k]);
        w.col(al) = psi;
    }
    return w;
}

double window_cost(const Mat &wseq, const Mat &wps) {
    return 1.0 - 0.5 * (wps.adjoint() * wseq).trace().real();
}

WpsResult optimize_wps(const Mat &wseq, int q, const WpsOptions &options) {
    Rng rng = make_rng(options.seed, 0x777073);
    std::vector<Mat4> init;
    for (int k = 0; k < 2 * q; ++k)
        init.push_back(options.init == WpsInit::haar ? Mat4(haar_unitary(4, rng))
                                                     : near_identity(rng, options.noise_scale));
    return optimize_wps(wseq, q, std::move(init), options);
}

WpsResult optimize_wps(const Mat &wseq, int q, std::vector<Mat4> gates, const WpsOptions &options) {
    if (q < 1) throw ParameterError("optimize_wps: q >= 1 required");
    if (!(options.tol > 0)) throw ParameterError("optimize_wps: tol must be positive");
    const int n = q + 2;
    if (wseq.rows() != (Eigen::Index(1) << n) || wseq.cols() != 2)
        throw ParameterError("optimize_wps: W_SEQ shape does not match q");
    if (static_cast<int>(gates.size()) != 2 * q) throw ParameterError("optimize_wps: need 2q initial gates");
    const int num_gates = 2 * q;
    WpsResult res;
    double cost = window_cost(wseq, wps_isometry(gates, q));
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        const double sweep_start = cost;
        // back[k][a] = G_{k+1}^dagger ... G_K^dagger W_SEQ|a>
        std::vector<std::array<Vec, 2>> back(num_gates);
        for (int al = 0; al < 2; ++al) {
            Vec v = wseq.col(al);
            for (int k = num_gates - 1; k >= 0; --k) {
                back[k][al] = v;
                apply_two_qubit(v, n, window_bond(k, q), gates[k].adjoint());
            }
        }
        std::array<Vec, 2> cur{window_input(n, 0), window_input(n, 1)};
        for (int k = 0; k < num_gates; ++k) {
            Mat4 x = Mat4::Zero();
            for (int al = 0; al < 2; ++al) accumulate_environment(x, back[k][al], cur[al], n, window_bond(k, q));
            gates[k] = polar_unitary(x);
            const double updated = 1.0 - 0.5 * (gates[k].adjoint() * x).trace().real();
            if (updated > cost + 1e-11)
                throw ConsistencyError("optimize_wps: cost increased from " + std::to_string(cost) + " to " +
                                       std::to_string(updated));
            cost = updated;
            for (int al = 0; al < 2; ++al) apply_two_qubit(cur[al], n, window_bond(k, q), gates[k]);
        }
        res.cost_trace.push_back(cost);
        res.sweeps = sweep + 1;
        if (sweep_start - cost < options.tol) {
            res.converged = true;
            break;
        }
    }
    res.gates = std::move(gates);
    res.cost = window_cost(wseq, wps_isometry(res.gates, q));
    return res;
}

Mat4 overlap_matrix(const Mat &wseq, const Mat &wps) {
    if (wseq.rows() != wps.rows() || wseq.cols() != 2 || wps.cols() != 2 || wseq.rows() % 2 != 0)
        throw ParameterError("overlap_matrix: window shapes differ");
    const Eigen::Index phys = wseq.rows() / 2;
    Mat4 e = Mat4::Zero();
    for (int ap = 0; ap < 2; ++ap)
        for (int a = 0; a < 2; ++a)
            for (int bp = 0; bp < 2; ++bp)
                for (int b = 0; b < 2; ++b) {
                    cplx s = 0.0;
                    for (Eigen::Index p = 0; p < phys; ++p) s += std::conj(wps(2 * p + bp, ap)) * wseq(2 * p + b, a);
                    e(2 * ap + a, 2 * bp + b) = s;
                }
    return e;
}

namespace {

cplx fixed_point_overlap(const BulkTensor &b, const Mat4 &e_aw) {
    FixedPoints fp = fixed_points(transfer_matrix(b));
    if (fp.degenerate) throw NumericalError("error_density: transfer matrix is degenerate (non-injective tensor)");
    return (fp.left.transpose() * e_aw * fp.right)(0);
}

}  // namespace

void fix_window_phase(const BulkTensor &b, const Mat &wseq, std::vector<Mat4> &gates, int q) {
    cplx z = fixed_point_overlap(b, overlap_matrix(wseq, wps_isometry(gates, q)));
    if (std::abs(z) > 0) gates.back() *= z / std::abs(z);
}

double error_density(const BulkTensor &b, const Mat4 &e_aw) {
    const double mag = std::abs(fixed_point_overlap(b, e_aw));
    if (mag == 0.0) return std::numeric_limits<double>::infinity();
    return std::max(0.0, -2.0 * std::log(mag));
}

std::vector<int> window_inputs(int num_qubits, int chunk_length, int overlap) {
    std::vector<int> inputs;
    for (int s = chunk_length + 1; s <= num_qubits - 1; s += chunk_length)
        if (s + overlap <= num_qubits) inputs.push_back(s - 1);
    return inputs;
}

double ps_fidelity_bulk_ti(const BulkTensor &b, const Mat4 &e_aw, int num_qubits, int chunk_length, int overlap) {
    LayoutParams{num_qubits, 1, chunk_length, overlap}.validate();
    const Mat4 e = transfer_matrix(b).entries;
    const auto inputs = window_inputs(num_qubits, chunk_length, overlap);
    const std::set<int> starts(inputs.begin(), inputs.end());
    Eigen::RowVector4cd v = 0.5 * vectorized_identity().transpose();
    for (int site = 2; site <= num_qubits - 1;) {
        if (starts.count(site)) {
            v = v * e_aw;
            site += overlap + 1;
        } else {
            v = v * e;
            ++site;
        }
    }
    return std::norm((v * vectorized_identity())(0));
}

PSCircuit build_bulk_ps_circuit(const BulkTensor &b, int num_qubits, int chunk_length, int overlap,
                                const std::vector<Mat4> &window_gates) {
    const int l = chunk_length, q = overlap;
    if (static_cast<int>(window_gates.size()) != 2 * q) throw ParameterError("build_bulk_ps_circuit: need 2q window gates");
    CircuitLayout layout = build_ps_layout({num_qubits, 1, l, q});
    const Mat4 ub = bulk_gate(b);
    auto fits = [&](int s) { return s + q <= num_qubits; };
    PSCircuit c{layout, {}};
    for (const auto &p : layout.placements()) {
        const int own = p.chunk * l + 1;
        const int next = own + l;
        if (p.bond == 1) {
            c.gates.push_back(boundary_gate());
        } else if (p.chunk >= 1 && p.bond <= own + q - 1) {
            c.gates.push_back(fits(own) ? window_gates[p.bond - own] : Mat4(Mat4::Identity()));
        } else if (next <= num_qubits - 1 && p.bond >= next - 1) {
            c.gates.push_back(fits(next) ? window_gates[q + p.bond - next + 1] : ub);
        } else {
            c.gates.push_back(ub);
        }
    }
    return c;
}

KappaFit fit_kappa_scaling(const std::vector<std::pair<int, double>> &q_kappa, double xi) {
    if (!(xi > 0)) throw ParameterError("fit_kappa_scaling: xi must be positive");
    std::vector<double> x, y;
    for (const auto &[q, kappa] : q_kappa) {
        if (!(kappa >= 1e-12)) continue;
        x.push_back(q / xi);
        y.push_back(std::log(kappa));
    }
    if (x.size() < 3) throw ParameterError("fit_kappa_scaling: need at least 3 points with kappa >= 1e-12");
    LinearFit f = fit_line(x, y);
    return {std::exp(f.intercept), -f.slope, f.r_squared, static_cast<int>(x.size())};
}

double success_probability(const BulkTensor &tensor, int q, int num_restarts, double rel_tol, uint64_t seed,
                           int workers) {
    if (num_restarts < 30) throw ParameterError("success_probability: at least 30 restarts required");
    const BulkTensor b = canonicalize_right(tensor);
    const Mat wseq = build_bulk_wseq(b, q);
    auto kappas = parallel_map<double>(
        static_cast<size_t>(num_restarts),
        [&](size_t r) {
            WpsOptions opt;
            opt.init = WpsInit::haar;
            opt.seed = mix_seed(seed, r);
            WpsResult res = optimize_wps(wseq, q, opt);
            return error_density(b, overlap_matrix(wseq, wps_isometry(res.gates, q)));
        },
        workers);
    const double best = *std::min_element(kappas.begin(), kappas.end());
    const double tol = std::max(rel_tol * best, 1e-10);
    const auto hits = std::count_if(kappas.begin(), kappas.end(), [&](double k) { return k - best <= tol; });
    return static_cast<double>(hits) / num_restarts;
}

long long t_iso(int m, int n) {
    if (m < 0 || m > n) throw ParameterError("t_iso: requires 0 <= m <= n");
    if (n + m + 1 > 62) throw ParameterError("t_iso: arguments too large");
    const long long num = (1LL << (n + m + 1)) - (1LL << (2 * m)) - 2LL * n - m - 1;
    return num <= 0 ? 0 : (num + 3) / 4;
}

int ps_cnot_depth(const CircuitLayout &layout) { return 3 * layout.depth(); }

RgDepthBounds rg_cnot_depth_bounds(int bond_dim, int q_b) {
    if (bond_dim < 2) throw ParameterError("rg_cnot_depth_bounds: D >= 2 required");
    int k = 0;
    while ((1 << k) < bond_dim) ++k;
    if (q_b <= 2 * k) throw ParameterError("rg_cnot_depth_bounds: blocking size must exceed 2k");
    auto ceil4 = [](long long v) { return (v + 3) / 4; };
    const long long pair = t_iso(0, 2 * k);
    const long long swap = 3LL * (q_b - k - 1);
    const long long up = (q_b - 2LL * k) * ceil4(3 * (1LL << (4 * k)) - 6LL * k - 3);
    const long long tree = (q_b - 2LL * k) * ceil4((1LL << (6 * k + 1)) - (1LL << (4 * k)) - 10LL * k - 1);
    return {pair + swap + up, pair + tree};
}

nlohmann::json report_to_json(const CompileReport &r) {
    nlohmann::json kq = nlohmann::json::array();
    for (const auto &[q, k] : r.kappa_by_q) kq.push_back({{"q", q}, {"kappa", k}});
    return {{"kappa", r.kappa},         {"fidelity", r.fidelity}, {"predicted_fidelity", r.predicted_fidelity},
            {"kappa0", r.kappa0},       {"gamma", r.gamma},       {"q", r.q},
            {"l", r.l},                 {"n_chunks", r.n_chunks}, {"depth", r.depth},
            {"cnot_depth", r.cnot_depth}, {"kappa_by_q", kq},     {"cost_trace", r.cost_trace}};
}

WpsResult best_window(const BulkTensor &b, int q, const CompileOptions &options) {
    const Mat wseq = build_bulk_wseq(b, q);
    WpsResult best;
    double best_kappa = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
        WpsOptions opt = options.wps;
        opt.seed = mix_seed(options.wps.seed, static_cast<uint64_t>(q) * 1000 + r);
        WpsResult res = optimize_wps(wseq, q, opt);
        fix_window_phase(b, wseq, res.gates, q);
        const double kappa = error_density(b, overlap_matrix(wseq, wps_isometry(res.gates, q)));
        if (kappa < best_kappa) {
            best_kappa = kappa;
            best = std::move(res);
        }
    }
    return best;
}

CompileResult compile_end_to_end(const BulkTensor &tensor, int num_qubits, double eps, const CompileOptions &options) {
    if (!(eps > 0 && eps < 1)) throw ParameterError("compile_end_to_end: eps must lie in (0, 1)");
    if (num_qubits < 4) throw ParameterError("compile_end_to_end: N >= 4 required");
    const BulkTensor b = canonicalize_right(tensor);
    CompileReport report;
    for (int q = 1; q <= num_qubits / 2 && q + 1 <= num_qubits - 1; ++q) {
        const int l = q + 1;
        WpsResult w = best_window(b, q, options);
        const Mat wseq = build_bulk_wseq(b, q);
        const Mat4 e_aw = overlap_matrix(wseq, wps_isometry(w.gates, q));
        const double kappa = error_density(b, e_aw);
        report.kappa_by_q.emplace_back(q, kappa);
        const int n_chunks = (num_qubits + l - 1) / l;
        const double predicted = std::exp(-kappa * (n_chunks - 1));
        if (predicted < 1.0 - eps) continue;
        CompileResult out;
        out.circuit = build_bulk_ps_circuit(b, num_qubits, l, q, w.gates);
        report.kappa = kappa;
        report.predicted_fidelity = predicted;
        report.fidelity = ps_fidelity_bulk_ti(b, e_aw, num_qubits, l, q);
        report.q = q;
        report.l = l;
        report.n_chunks = n_chunks;
        report.depth = out.circuit.layout.depth();
        report.cnot_depth = ps_cnot_depth(out.circuit.layout);
        report.cost_trace = w.cost_trace;
        const double xi = correlation_length(b);
        if (std::isfinite(xi) && xi > 0) {
            try {
                KappaFit fit = fit_kappa_scaling(report.kappa_by_q, xi);
                report.kappa0 = fit.kappa0;
                report.gamma = fit.gamma;
            } catch (const ParameterError &) {
            }
        }
        out.report = std::move(report);
        return out;
    }
    throw ParameterError("compile_end_to_end: no q <= N/2 reaches the target fidelity");
}

}  // namespace psc
