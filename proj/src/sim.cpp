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


#include "psc/sim.hpp"

#include <cmath>
#include <string>

#include "psc/error.hpp"
#include "psc/parallel.hpp"

namespace psc {

void PSCircuit::validate() const {
    if (gates.size() != layout.placements().size())
        throw ParameterError("PSCircuit: need exactly one gate per placement");
    for (const auto &g : gates)
        if (unitarity_error(g) > 1e-10) throw ParameterError("PSCircuit: gate is not unitary within 1e-10");
}

PSCircuit identity_circuit(const CircuitLayout &layout) {
    return {layout, std::vector<Mat4>(layout.placements().size(), Mat4::Identity())};
}

PSCircuit haar_circuit(const CircuitLayout &layout, uint64_t seed) {
    Rng rng = make_rng(seed, 0x68616172);
    PSCircuit c{layout, {}};
    for (size_t k = 0; k < layout.placements().size(); ++k) c.gates.push_back(haar_unitary(4, rng));
    return c;
}

void NoiseModel::validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw ParameterError("NoiseModel: p1 must lie in [0, 1]");
    if (!(p2 >= 0.0 && p2 <= 1.0)) throw ParameterError("NoiseModel: p2 must lie in [0, 1]");
}

Vec zero_state(int num_qubits) {
    Vec psi = Vec::Zero(Eigen::Index(1) << num_qubits);
    psi(0) = 1.0;
    return psi;
}

namespace {

// Plain complex product; std::complex operator* carries NaN/Inf recovery that blocks vectorization.
inline cplx cmul(cplx a, cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

namespace {

void apply_two_qubit_raw(cplx *data, Eigen::Index size, int num_qubits, int bond, const Mat4 &u) {
    const int sh = num_qubits - bond - 1;
    const Eigen::Index lo = Eigen::Index(1) << sh, hi = lo << 1, block = hi << 1;
    cplx m[4][4];
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) m[k][j] = u(k, j);
    for (Eigen::Index outer = 0; outer < size; outer += block) {
        for (Eigen::Index x = outer; x < outer + lo; ++x) {
            cplx *p[4] = {data + x, data + x + lo, data + x + hi, data + x + hi + lo};
            const cplx a0 = *p[0], a1 = *p[1], a2 = *p[2], a3 = *p[3];
            for (int k = 0; k < 4; ++k)
                *p[k] = cmul(m[k][0], a0) + cmul(m[k][1], a1) + cmul(m[k][2], a2) + cmul(m[k][3], a3);
        }
    }
}

}  // namespace

void apply_two_qubit(Vec &psi, int num_qubits, int bond, const Mat4 &u) {
    apply_two_qubit_raw(psi.data(), psi.size(), num_qubits, bond, u);
}

void apply_single_qubit(Vec &psi, int num_qubits, int qubit, const Mat2 &u) {
    const Eigen::Index bit = Eigen::Index(1) << (num_qubits - qubit), block = bit << 1;
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    cplx *data = psi.data();
    for (Eigen::Index outer = 0; outer < psi.size(); outer += block) {
        for (Eigen::Index x = outer; x < outer + bit; ++x) {
            const cplx a = data[x], b = data[x + bit];
            data[x] = cmul(u00, a) + cmul(u01, b);
            data[x + bit] = cmul(u10, a) + cmul(u11, b);
        }
    }
}

Vec run_statevector(const PSCircuit &circuit, int max_qubits) {
    const int n = circuit.num_qubits();
    if (n > max_qubits) throw CapacityError("run_statevector: " + std::to_string(n) + " qubits exceeds cap");
    if (circuit.gates.size() != circuit.layout.placements().size())
        throw ParameterError("PSCircuit: need exactly one gate per placement");
    Vec psi = zero_state(n);
    const auto &pl = circuit.layout.placements();
    for (size_t k = 0; k < pl.size(); ++k) apply_two_qubit(psi, n, pl[k].bond, circuit.gates[k]);
    return psi;
}

namespace {

Mat stack_rows(const SiteTensor &s) {
    Mat m(2 * s[0].rows(), s[0].cols());
    m << s[0], s[1];
    return m;
}

class MpsEvolver {
public:
    MpsEvolver(int n, const MpsRunOptions &opt) : opt_(opt) {
        for (int s = 0; s < n; ++s) state_.sites.push_back({Mat::Ones(1, 1), Mat::Zero(1, 1)});
    }

    void apply_gate(int bond, const Mat4 &u) {
        move_center(bond - 1);
        SiteTensor &a = state_.sites[bond - 1];
        SiteTensor &b = state_.sites[bond];
        const Eigen::Index dl = a[0].rows(), dr = b[0].cols();
        Mat pair[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) pair[i][j] = a[i] * b[j];
        Mat theta(2 * dl, 2 * dr);  // row k*dl + alpha, col l*dr + beta
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                Mat blk = Mat::Zero(dl, dr);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        if (u(2 * k + l, 2 * i + j) != cplx(0.0)) blk += u(2 * k + l, 2 * i + j) * pair[i][j];
                theta.block(k * dl, l * dr, dl, dr) = blk;
            }
        Eigen::BDCSVD<Mat> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto &s = svd.singularValues();
        Eigen::Index keep = 1;
        while (keep < s.size() && s(keep) > opt_.truncation_threshold) ++keep;
        if (keep > opt_.max_bond)
            throw CapacityError("run_mps: bond dimension " + std::to_string(keep) + " exceeds cap");
        max_bond_ = std::max<int>(max_bond_, static_cast<int>(keep));
        Eigen::VectorXd kept = s.head(keep);
        kept /= kept.norm();
        Mat left = svd.matrixU().leftCols(keep);
        Mat right = kept.cast<cplx>().asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
        for (int k = 0; k < 2; ++k) a[k] = left.middleRows(k * dl, dl);
        for (int l = 0; l < 2; ++l) b[l] = right.middleCols(l * dr, dr);
        center_ = bond;
    }

    void apply_single(int qubit, const Mat2 &p) {
        SiteTensor &a = state_.sites[qubit - 1];
        Mat a0 = p(0, 0) * a[0] + p(0, 1) * a[1];
        Mat a1 = p(1, 0) * a[0] + p(1, 1) * a[1];
        a[0] = std::move(a0);
        a[1] = std::move(a1);
    }

    MpsRunResult result() const { return {state_, max_bond_}; }

private:
    void move_center(int target) {
        while (center_ < target) {
            SiteTensor &a = state_.sites[center_];
            Eigen::HouseholderQR<Mat> qr(stack_rows(a));
            const Eigen::Index rows = 2 * a[0].rows(), k = std::min(rows, a[0].cols());
            Mat q = qr.householderQ() * Mat::Identity(rows, k);
            Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
            const Eigen::Index dl = a[0].rows();
            a[0] = q.topRows(dl);
            a[1] = q.bottomRows(dl);
            for (auto &m : state_.sites[center_ + 1]) m = (r * m).eval();
            ++center_;
        }
        while (center_ > target) {
            SiteTensor &a = state_.sites[center_];
            const Eigen::Index dl = a[0].rows(), dr = a[0].cols();
            Mat wide(dl, 2 * dr);
            wide << a[0], a[1];
            Eigen::HouseholderQR<Mat> qr(wide.adjoint());
            const Eigen::Index k = std::min(dl, 2 * dr);
            Mat q = qr.householderQ() * Mat::Identity(2 * dr, k);
            Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
            Mat rows = q.adjoint();
            a[0] = rows.leftCols(dr);
            a[1] = rows.rightCols(dr);
            Mat l = r.adjoint();
            for (auto &m : state_.sites[center_ - 1]) m = (m * l).eval();
            --center_;
        }
    }

    MpsRunOptions opt_;
    MPSState state_;
    int center_ = 0;
    int max_bond_ = 1;
};

const Mat2 &pauli_cached(int k) {
    static const Mat2 p[4] = {pauli(0), pauli(1), pauli(2), pauli(3)};
    return p[k];
}

// Draws 0 (no error) or a Pauli index 1..3 with probability p/4 each.
int draw_pauli(double p, Rng &rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u = uni(rng);
    if (u >= 0.75 * p) return 0;
    return 1 + std::min(2, static_cast<int>(u / (0.25 * p)));
}

}  // namespace

MpsRunResult run_mps(const PSCircuit &circuit, const MpsRunOptions &options) {
    if (circuit.gates.size() != circuit.layout.placements().size())
        throw ParameterError("PSCircuit: need exactly one gate per placement");
    MpsEvolver ev(circuit.num_qubits(), options);
    const auto &pl = circuit.layout.placements();
    for (size_t k = 0; k < pl.size(); ++k) ev.apply_gate(pl[k].bond, circuit.gates[k]);
    return ev.result();
}

void depolarize(Mat &rho, int num_qubits, int qubit, double p) {
    if (p == 0.0) return;
    const Eigen::Index bit = Eigen::Index(1) << (num_qubits - qubit);
    const Eigen::Index dim = rho.rows();
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            const bool rb = r & bit, cb = c & bit;
            if (rb != cb) {
                rho(r, c) *= (1.0 - p);
            } else if (!rb) {
                cplx a = rho(r, c), b = rho(r | bit, c | bit);
                cplx avg = 0.5 * p * (a + b);
                rho(r, c) = (1.0 - p) * a + avg;
                rho(r | bit, c | bit) = (1.0 - p) * b + avg;
            }
        }
    }
}

void left_multiply_gate(Mat &rho, int num_qubits, int bond, const Mat4 &u) {
    const Eigen::Index dim = rho.rows();
    for (Eigen::Index c = 0; c < rho.cols(); ++c) apply_two_qubit_raw(rho.col(c).data(), dim, num_qubits, bond, u);
}

void conjugate_gate(Mat &rho, int num_qubits, int bond, const Mat4 &u) {
    const Eigen::Index dim = rho.rows();
    left_multiply_gate(rho, num_qubits, bond, u);
    const int sh = num_qubits - bond - 1;
    const Eigen::Index lo = Eigen::Index(1) << sh, hi = lo << 1, mask = lo | hi;
    cplx m[4][4];
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) m[k][j] = std::conj(u(k, j));
    for (Eigen::Index x = 0; x < dim; ++x) {
        if (x & mask) continue;
        cplx *col[4] = {rho.col(x).data(), rho.col(x | lo).data(), rho.col(x | hi).data(), rho.col(x | hi | lo).data()};
        for (Eigen::Index r = 0; r < dim; ++r) {
            const cplx a0 = col[0][r], a1 = col[1][r], a2 = col[2][r], a3 = col[3][r];
            for (int k = 0; k < 4; ++k)
                col[k][r] = cmul(m[k][0], a0) + cmul(m[k][1], a1) + cmul(m[k][2], a2) + cmul(m[k][3], a3);
        }
    }
}

Mat run_density_matrix(const PSCircuit &circuit, const NoiseModel &noise, int max_qubits) {
    noise.validate();
    const int n = circuit.num_qubits();
    if (n > max_qubits) throw CapacityError("run_density_matrix: " + std::to_string(n) + " qubits exceeds cap");
    if (circuit.gates.size() != circuit.layout.placements().size())
        throw ParameterError("PSCircuit: need exactly one gate per placement");
    const Eigen::Index dim = Eigen::Index(1) << n;
    Mat rho = Mat::Zero(dim, dim);
    rho(0, 0) = 1.0;
    const auto &pl = circuit.layout.placements();
    for (const auto &step : circuit.layout.steps()) {
        for (size_t k : step) conjugate_gate(rho, n, pl[k].bond, circuit.gates[k]);
        for (size_t k : step) {
            depolarize(rho, n, pl[k].bond, noise.p2);
            depolarize(rho, n, pl[k].bond + 1, noise.p2);
        }
        for (int q = 1; q <= n; ++q) depolarize(rho, n, q, noise.p1);
    }
    return rho;
}

double density_expectation(const Mat &rho, int num_qubits, const std::vector<TwoSiteTerm> &terms) {
    double total = 0.0;
    for (const auto &t : terms) {
        const int sh = num_qubits - t.site - 1;
        const Eigen::Index lo = Eigen::Index(1) << sh, hi = lo << 1, mask = lo | hi;
        cplx v = 0.0;
        for (Eigen::Index x = 0; x < rho.rows(); ++x) {
            if (x & mask) continue;
            const Eigen::Index idx[4] = {x, x | lo, x | hi, x | hi | lo};
            for (int k = 0; k < 4; ++k)
                for (int j = 0; j < 4; ++j)
                    if (t.op(k, j) != cplx(0.0)) v += t.op(k, j) * rho(idx[j], idx[k]);
        }
        total += v.real();
    }
    return total;
}

double statevector_expectation(const Vec &psi, int num_qubits, const std::vector<TwoSiteTerm> &terms) {
    double total = 0.0;
    for (const auto &t : terms) {
        const int sh = num_qubits - t.site - 1;
        const Eigen::Index lo = Eigen::Index(1) << sh, hi = lo << 1, mask = lo | hi;
        cplx v = 0.0;
        for (Eigen::Index x = 0; x < psi.size(); ++x) {
            if (x & mask) continue;
            const Eigen::Index idx[4] = {x, x | lo, x | hi, x | hi | lo};
            for (int k = 0; k < 4; ++k)
                for (int j = 0; j < 4; ++j)
                    if (t.op(k, j) != cplx(0.0)) v += std::conj(psi(idx[k])) * t.op(k, j) * psi(idx[j]);
        }
        total += v.real();
    }
    return total;
}

Estimator observable_estimator(std::vector<TwoSiteTerm> terms) {
    return [terms = std::move(terms)](const MPSState &m) { return expectation(m, terms); };
}

Estimator fidelity_estimator(MPSState reference) {
    return [ref = std::move(reference)](const MPSState &m) {
        return std::norm(overlap(ref, m)) / (std::norm(overlap(ref, ref)) * std::norm(overlap(m, m)));
    };
}

MeanStderr run_trajectories(const PSCircuit &circuit, const NoiseModel &noise, int num_samples,
                            const Estimator &estimator, uint64_t seed, int workers,
                            const MpsRunOptions &options) {
    noise.validate();
    if (num_samples < 1) throw ParameterError("run_trajectories: need at least one sample");
    if (circuit.gates.size() != circuit.layout.placements().size())
        throw ParameterError("PSCircuit: need exactly one gate per placement");
    const int n = circuit.num_qubits();
    const auto steps = circuit.layout.steps();
    const auto &pl = circuit.layout.placements();
    auto values = parallel_map<double>(
        static_cast<size_t>(num_samples),
        [&](size_t k) {
            Rng rng = make_rng(seed, k);
            MpsEvolver ev(n, options);
            for (const auto &step : steps) {
                for (size_t g : step) ev.apply_gate(pl[g].bond, circuit.gates[g]);
                if (noise.p2 > 0)
                    for (size_t g : step)
                        for (int q : {pl[g].bond, pl[g].bond + 1})
                            if (int e = draw_pauli(noise.p2, rng)) ev.apply_single(q, pauli_cached(e));
                if (noise.p1 > 0)
                    for (int q = 1; q <= n; ++q)
                        if (int e = draw_pauli(noise.p1, rng)) ev.apply_single(q, pauli_cached(e));
            }
            return estimator(ev.result().state);
        },
        workers);
    return mean_and_stderr(values);
}

namespace {

double entropy_bits(const Eigen::VectorXd &s) {
    double total = 0.0;
    const double nrm = s.squaredNorm();
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        double p = s(k) * s(k) / nrm;
        if (p > 1e-300) total -= p * std::log2(p);
    }
    return total;
}

}  // namespace

double entanglement_entropy(const Vec &psi, int num_qubits, int cut) {
    if (cut < 1 || cut >= num_qubits) throw ParameterError("entanglement_entropy: cut must be in [1, N-1]");
    const Eigen::Index rows = Eigen::Index(1) << cut, cols = Eigen::Index(1) << (num_qubits - cut);
    Mat m(rows, cols);
    for (Eigen::Index h = 0; h < rows; ++h)
        for (Eigen::Index l = 0; l < cols; ++l) m(h, l) = psi(h * cols + l);
    Eigen::BDCSVD<Mat> svd(m);
    return entropy_bits(svd.singularValues());
}

std::vector<double> schmidt_values(const MPSState &mps, int cut) {
    if (cut < 1 || cut >= mps.num_sites()) throw ParameterError("schmidt_values: cut must be in [1, N-1]");
    MPSState m = canonicalize_right(mps);
    Mat carry = Mat::Ones(1, 1);
    for (int s = 0; s < cut; ++s) {
        SiteTensor a{carry * m.sites[s][0], carry * m.sites[s][1]};
        Eigen::HouseholderQR<Mat> qr(stack_rows(a));
        const Eigen::Index rows = 2 * a[0].rows(), k = std::min(rows, a[0].cols());
        carry = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    }
    Eigen::BDCSVD<Mat> svd(carry);
    std::vector<double> out;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) out.push_back(svd.singularValues()(k));
    return out;
}

double entanglement_entropy(const MPSState &mps, int cut) {
    auto s = schmidt_values(mps, cut);
    return entropy_bits(Eigen::Map<Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size())));
}

nlohmann::json circuit_to_json(const PSCircuit &circuit) {
    nlohmann::json gates = nlohmann::json::array();
    for (const Mat4 &g : circuit.gates) {
        nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                re.push_back(g(r, c).real());
                im.push_back(g(r, c).imag());
            }
        gates.push_back({{"re", re}, {"im", im}});
    }
    return {{"layout", layout_to_json(circuit.layout)}, {"gates", gates}};
}

PSCircuit circuit_from_json(const nlohmann::json &j) {
    PSCircuit c;
    c.layout = layout_from_json(j.at("layout"));
    for (const auto &g : j.at("gates")) {
        const auto &re = g.at("re");
        const auto &im = g.at("im");
        if (re.size() != 16 || im.size() != 16) throw ParameterError("circuit_from_json: gate needs 16 entries");
        Mat4 u;
        for (int k = 0; k < 16; ++k) u(k / 4, k % 4) = cplx(re[k].get<double>(), im[k].get<double>());
        c.gates.push_back(u);
    }
    c.validate();
    return c;
}

}  // namespace psc
