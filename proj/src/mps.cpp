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


#include "psc/mps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psc/error.hpp"

namespace psc {

namespace {

constexpr double kSingularTol = 1e-10;

Mat2 reshape_pair(const Vec &v) {
    Mat2 x;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) x(a, b) = v(2 * a + b);
    return x;
}

struct SortedEigen {
    std::vector<cplx> values;
    Mat right;  // columns, same order as values
    Mat left;   // rows of V^{-1}: l_k^T r_j = delta_kj
};

SortedEigen sorted_eigen(const Mat4 &e) {
    Eigen::ComplexEigenSolver<Mat> solver(e);
    Vec vals = solver.eigenvalues();
    Mat vecs = solver.eigenvectors();
    std::vector<int> order(vals.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return std::abs(vals(x)) > std::abs(vals(y)) + 1e-14; });
    SortedEigen out;
    out.right.resize(4, 4);
    for (int k = 0; k < 4; ++k) {
        out.values.push_back(vals(order[k]));
        out.right.col(k) = vecs.col(order[k]);
    }
    Eigen::FullPivLU<Mat> lu(out.right);
    out.left = lu.isInvertible() ? Mat(lu.inverse()) : Mat(Mat::Zero(4, 4));
    return out;
}

// Leading eigenvector of M, as a Hermitian positive 2x2 matrix, and its eigenvalue.
std::pair<Mat2, double> positive_fixed_point(const Mat4 &m) {
    SortedEigen se = sorted_eigen(m);
    Mat2 x = reshape_pair(se.right.col(0));
    cplx tr = x.trace();
    if (std::abs(tr) < 1e-300) throw NumericalError("fixed point has vanishing trace");
    x *= std::abs(tr) / tr;
    x = (x + x.adjoint()).eval() / 2.0;
    return {x, std::abs(se.values[0])};
}

// Hermitian square root and inverse square root of a positive matrix.
std::pair<Mat2, Mat2> sqrt_pair(const Mat2 &x) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(x);
    auto ev = es.eigenvalues();
    if (ev(0) <= kSingularTol * std::max(1.0, ev(1)))
        throw NumericalError("canonicalize: transfer fixed point is rank deficient");
    Eigen::Vector2d s = ev.cwiseSqrt();
    Mat2 v = es.eigenvectors();
    Mat2 root = v * s.cast<cplx>().asDiagonal() * v.adjoint();
    Mat2 inv = v * s.cwiseInverse().cast<cplx>().asDiagonal() * v.adjoint();
    return {root, inv};
}

// Superoperator matrices acting on the row-major vectorization x(2a+b) = X(a,b).
Mat4 left_map(const BulkTensor &t) {
    // X -> sum_i A^i^dagger X A^i
    Mat4 m = Mat4::Zero();
    for (int i = 0; i < 2; ++i) m += kron(t.a[i].adjoint(), t.a[i].transpose());
    return m;
}

Mat4 right_map(const BulkTensor &t) {
    // X -> sum_i A^i X A^i^dagger
    Mat4 m = Mat4::Zero();
    for (int i = 0; i < 2; ++i) m += kron(t.a[i], t.a[i].conjugate());
    return m;
}

void require_sites(const MPSState &mps, int min_sites) {
    if (mps.num_sites() < min_sites)
        throw ParameterError("MPS needs at least " + std::to_string(min_sites) + " sites");
}

Mat stack_rows(const SiteTensor &s) {
    Mat m(2 * s[0].rows(), s[0].cols());
    m << s[0], s[1];
    return m;
}

Mat stack_cols(const SiteTensor &s) {
    Mat m(s[0].rows(), 2 * s[0].cols());
    m << s[0], s[1];
    return m;
}

Mat thin_q(const Mat &m, Mat &r) {
    Eigen::HouseholderQR<Mat> qr(m);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    Mat q = qr.householderQ() * Mat::Identity(m.rows(), k);
    r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return q;
}

// Places `cols` at the given column positions of a 4x4 unitary; remaining
// columns are the deterministic orthonormal completion in order.
Mat4 embed_columns(const std::vector<std::pair<int, Vec>> &cols) {
    Mat given(4, cols.size());
    for (size_t k = 0; k < cols.size(); ++k) given.col(k) = cols[k].second;
    if ((given.adjoint() * given - Mat::Identity(cols.size(), cols.size())).cwiseAbs().maxCoeff() > 1e-8)
        throw NumericalError("mps_to_sequential_gates: site map is not isometric");
    Mat full = complete_to_unitary(given);
    Mat4 u;
    std::vector<bool> used(4, false);
    for (size_t k = 0; k < cols.size(); ++k) {
        u.col(cols[k].first) = full.col(k);
        used[cols[k].first] = true;
    }
    int next = static_cast<int>(cols.size());
    for (int c = 0; c < 4; ++c)
        if (!used[c]) u.col(c) = full.col(next++);
    return u;
}

}  // namespace

double BulkTensor::left_canonical_error() const {
    Mat s = a[0].adjoint() * a[0] + a[1].adjoint() * a[1];
    return (s - Mat::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

double BulkTensor::right_canonical_error() const {
    Mat s = a[0] * a[0].adjoint() + a[1] * a[1].adjoint();
    return (s - Mat::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

std::vector<int> MPSState::bond_dims() const {
    std::vector<int> dims;
    for (size_t n = 0; n + 1 < sites.size(); ++n) dims.push_back(static_cast<int>(sites[n][0].cols()));
    return dims;
}

BulkTensor family_tensor(double g, bool allow_limits) {
    const bool inside = allow_limits ? (g >= -1.0 && g <= 0.0) : (g > -1.0 && g < 0.0);
    if (!inside) throw ParameterError("family_tensor: g must lie in (-1, 0)");
    BulkTensor t;
    t.a[0] = Mat(2, 2);
    t.a[1] = Mat(2, 2);
    t.a[0] << 0, 0, 1, 1;
    t.a[1] << 1, g, 0, 0;
    return t;
}

double correlation_length_family(double g) {
    if (!(g > -1.0 && g < 0.0)) throw ParameterError("correlation_length_family: g must lie in (-1, 0)");
    return 1.0 / std::log((1.0 - g) / (1.0 + g));
}

double family_coupling_for_length(double xi) {
    if (!(xi > 0.0)) throw ParameterError("family_coupling_for_length: xi must be positive");
    return -std::tanh(1.0 / (2.0 * xi));
}

BulkTensor random_bulk_tensor(uint64_t seed) {
    Rng rng = make_rng(seed, 0x6d7073);
    Mat u = haar_unitary(4, rng);
    BulkTensor t;
    for (int i = 0; i < 2; ++i) {
        t.a[i] = Mat(2, 2);
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be) t.a[i](al, be) = u(2 * al + i, be);
    }
    return t;
}

BulkTensor canonicalize(const BulkTensor &tensor) {
    auto [l, eta] = positive_fixed_point(left_map(tensor));
    auto [c, c_inv] = sqrt_pair(l);
    BulkTensor out;
    for (int i = 0; i < 2; ++i) out.a[i] = c * tensor.a[i] * c_inv / std::sqrt(eta);
    return out;
}

BulkTensor canonicalize_right(const BulkTensor &tensor) {
    auto [r, eta] = positive_fixed_point(right_map(tensor));
    auto [c, c_inv] = sqrt_pair(r);
    BulkTensor out;
    for (int i = 0; i < 2; ++i) out.a[i] = c_inv * tensor.a[i] * c / std::sqrt(eta);
    return out;
}

MPSState canonicalize(const MPSState &mps) {
    require_sites(mps, 1);
    MPSState out = mps;
    const int n = out.num_sites();
    for (int s = 0; s < n; ++s) {
        Mat r;
        Mat q = thin_q(stack_rows(out.sites[s]), r);
        const Eigen::Index dl = out.sites[s][0].rows();
        out.sites[s][0] = q.topRows(dl);
        out.sites[s][1] = q.bottomRows(dl);
        if (s + 1 < n) {
            for (int i = 0; i < 2; ++i) out.sites[s + 1][i] = (r * out.sites[s + 1][i]).eval();
        } else {
            cplx z = r(0, 0);
            if (std::abs(z) == 0.0) throw NumericalError("canonicalize: zero-norm MPS");
            for (int i = 0; i < 2; ++i) out.sites[s][i] *= z / std::abs(z);
        }
    }
    out.canonical = CanonicalForm::left;
    return out;
}

MPSState canonicalize_right(const MPSState &mps) {
    require_sites(mps, 1);
    MPSState out = mps;
    const int n = out.num_sites();
    for (int s = n - 1; s >= 0; --s) {
        Mat r;
        Mat q = thin_q(stack_cols(out.sites[s]).adjoint(), r);
        Mat rows = q.adjoint();  // k x 2 D_r
        const Eigen::Index dr = out.sites[s][0].cols();
        out.sites[s][0] = rows.leftCols(dr);
        out.sites[s][1] = rows.rightCols(dr);
        Mat l = r.adjoint();  // D_l x k
        if (s > 0) {
            for (int i = 0; i < 2; ++i) out.sites[s - 1][i] = (out.sites[s - 1][i] * l).eval();
        } else {
            cplx z = l(0, 0);
            if (std::abs(z) == 0.0) throw NumericalError("canonicalize_right: zero-norm MPS");
            for (int i = 0; i < 2; ++i) out.sites[s][i] *= z / std::abs(z);
        }
    }
    out.canonical = CanonicalForm::right;
    return out;
}

MPSState build_bulk_ti_mps(const BulkTensor &tensor, int num_sites) {
    if (num_sites < 3) throw ParameterError("build_bulk_ti_mps: N >= 3 required");
    const int d = tensor.bond_dim();
    MPSState mps;
    SiteTensor first, last;
    for (int i = 0; i < 2; ++i) {
        first[i] = Mat::Zero(1, d);
        last[i] = Mat::Zero(d, 1);
        if (i < d) {
            first[i](0, i) = 1.0;
            last[i](i, 0) = 1.0;
        }
    }
    mps.sites.push_back(first);
    for (int s = 2; s < num_sites; ++s) mps.sites.push_back(tensor.a);
    mps.sites.push_back(last);
    double nrm = norm(mps);
    if (!(nrm > 0.0)) throw NumericalError("build_bulk_ti_mps: state has zero norm");
    for (int i = 0; i < 2; ++i) mps.sites[0][i] /= nrm;
    return mps;
}

MPSState product_state_mps(const std::vector<Eigen::Vector2cd> &qubits) {
    MPSState mps;
    for (const auto &q : qubits) {
        SiteTensor s;
        for (int i = 0; i < 2; ++i) s[i] = Mat::Constant(1, 1, q(i));
        mps.sites.push_back(s);
    }
    return mps;
}

TransferMatrix transfer_matrix(const BulkTensor &tensor) {
    TransferMatrix t;
    t.entries = mixed_transfer_matrix(tensor, tensor);
    t.eigenvalues = sorted_eigen(t.entries).values;
    return t;
}

Mat4 mixed_transfer_matrix(const BulkTensor &w, const BulkTensor &a) {
    Mat4 e = Mat4::Zero();
    for (int i = 0; i < 2; ++i) e += kron(w.a[i].conjugate(), a.a[i]);
    return e;
}

FixedPoints fixed_points(const TransferMatrix &e) {
    SortedEigen se = sorted_eigen(e.entries);
    FixedPoints fp;
    fp.lambda = se.values[0];
    fp.right = se.right.col(0);
    fp.left = se.left.row(0).transpose();
    const cplx overlap = (fp.left.transpose() * fp.right)(0);
    if (std::abs(overlap) < 1e-14) throw NumericalError("fixed_points: left and right eigenvectors orthogonal");
    // Scale so that l is the vectorized identity when that is its direction.
    cplx trace_l = fp.left(0) + fp.left(3);
    if (std::abs(trace_l) > 1e-12) fp.left *= 2.0 / trace_l;
    fp.right /= (fp.left.transpose() * fp.right)(0);
    fp.degenerate = std::abs(se.values[0]) - std::abs(se.values[1]) < 1e-8;
    return fp;
}

CorrelationProfile correlation_profile(const BulkTensor &tensor, const Mat2 &o1, const Mat2 &o2) {
    Mat4 e = mixed_transfer_matrix(tensor, tensor);
    SortedEigen se = sorted_eigen(e);
    auto op_transfer = [&](const Mat2 &o) {
        Mat4 m = Mat4::Zero();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m += o(i, j) * kron(tensor.a[i].conjugate(), tensor.a[j]);
        return m;
    };
    Mat4 e1 = op_transfer(o1), e2 = op_transfer(o2);
    const cplx lam1 = se.values[0];
    Vec l = se.left.row(0).transpose();
    Vec r = se.right.col(0);
    CorrelationProfile p;
    for (int k = 1; k < 4; ++k) {
        const cplx lam = se.values[k];
        if (std::abs(lam) < 1e-14 * std::abs(lam1)) continue;
        cplx a = (l.transpose() * e1 * se.right.col(k))(0);
        cplx b = (se.left.row(k) * e2 * r)(0);
        p.amplitudes.push_back(a * b / (lam * lam1));
        p.lengths.push_back(-1.0 / std::log(std::abs(lam / lam1)));
    }
    p.correlation_length = correlation_length(tensor);
    return p;
}

double correlation_length(const BulkTensor &tensor) {
    TransferMatrix t = transfer_matrix(tensor);
    double ratio = std::abs(t.eigenvalues[1]) / std::abs(t.eigenvalues[0]);
    if (ratio == 0.0) return 0.0;
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    return -1.0 / std::log(ratio);
}

cplx overlap(const MPSState &a, const MPSState &b) {
    if (a.num_sites() != b.num_sites()) throw ParameterError("overlap: MPS sizes differ");
    Mat env = Mat::Ones(1, 1);
    for (int s = 0; s < a.num_sites(); ++s) {
        Mat next = Mat::Zero(a.sites[s][0].cols(), b.sites[s][0].cols());
        for (int i = 0; i < 2; ++i) next += a.sites[s][i].adjoint() * env * b.sites[s][i];
        env = std::move(next);
    }
    return env(0, 0);
}

double norm(const MPSState &mps) { return std::sqrt(std::abs(overlap(mps, mps))); }

namespace {

// Left environments L[s] = contraction of sites 1..s (L[0] = 1).
std::vector<Mat> left_envs(const MPSState &m) {
    std::vector<Mat> envs{Mat::Ones(1, 1)};
    for (int s = 0; s < m.num_sites(); ++s) {
        Mat next = Mat::Zero(m.sites[s][0].cols(), m.sites[s][0].cols());
        for (int i = 0; i < 2; ++i) next += m.sites[s][i].adjoint() * envs.back() * m.sites[s][i];
        envs.push_back(std::move(next));
    }
    return envs;
}

// Right environments R[s] = contraction of sites s+1..N (R[N] = 1).
std::vector<Mat> right_envs(const MPSState &m) {
    const int n = m.num_sites();
    std::vector<Mat> envs(n + 1);
    envs[n] = Mat::Ones(1, 1);
    for (int s = n - 1; s >= 0; --s) {
        Mat next = Mat::Zero(m.sites[s][0].rows(), m.sites[s][0].rows());
        for (int i = 0; i < 2; ++i) next += m.sites[s][i] * envs[s + 1] * m.sites[s][i].adjoint();
        envs[s] = std::move(next);
    }
    return envs;
}

}  // namespace

double expectation(const MPSState &mps, const std::vector<TwoSiteTerm> &terms) {
    const int n = mps.num_sites();
    auto le = left_envs(mps);
    auto re = right_envs(mps);
    const double nrm2 = le[n](0, 0).real();
    double total = 0.0;
    for (const auto &t : terms) {
        if (t.site < 1 || t.site >= n) throw ParameterError("expectation: term site out of range");
        const auto &a = mps.sites[t.site - 1];
        const auto &b = mps.sites[t.site];
        std::array<Mat, 4> pair;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) pair[2 * i + j] = a[i] * b[j];
        cplx v = 0.0;
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y) {
                if (t.op(x, y) == cplx(0.0)) continue;
                v += t.op(x, y) * (pair[x].adjoint() * le[t.site - 1] * pair[y] * re[t.site + 1].transpose()).trace();
            }
        total += v.real();
    }
    return total / nrm2;
}

cplx expectation_product(const MPSState &mps, const std::vector<std::pair<int, Mat2>> &ops) {
    const int n = mps.num_sites();
    std::vector<const Mat2 *> at(n, nullptr);
    for (const auto &[site, op] : ops) {
        if (site < 1 || site > n) throw ParameterError("expectation_product: site out of range");
        if (at[site - 1]) throw ParameterError("expectation_product: repeated site");
        at[site - 1] = &op;
    }
    Mat env = Mat::Ones(1, 1);
    for (int s = 0; s < n; ++s) {
        const auto &a = mps.sites[s];
        Mat next = Mat::Zero(a[0].cols(), a[0].cols());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                cplx w = at[s] ? (*at[s])(i, j) : cplx(i == j ? 1.0 : 0.0);
                if (w != cplx(0.0)) next += w * a[i].adjoint() * env * a[j];
            }
        env = std::move(next);
    }
    return env(0, 0) / overlap(mps, mps);
}

cplx correlation_function(const MPSState &mps, const Mat2 &oi, const Mat2 &oj, int i, int j) {
    if (!(1 <= i && i < j && j <= mps.num_sites()))
        throw ParameterError("correlation_function: requires 1 <= i < j <= N");
    cplx both = expectation_product(mps, {{i, oi}, {j, oj}});
    return both - expectation_product(mps, {{i, oi}}) * expectation_product(mps, {{j, oj}});
}

Vec to_statevector(const MPSState &mps) {
    require_sites(mps, 1);
    if (mps.num_sites() > 26) throw CapacityError("to_statevector: at most 26 qubits");
    Mat psi = Mat::Ones(1, 1);
    for (const auto &s : mps.sites) {
        Mat next(psi.rows() * 2, s[0].cols());
        for (Eigen::Index x = 0; x < psi.rows(); ++x)
            for (int i = 0; i < 2; ++i) next.row(2 * x + i) = psi.row(x) * s[i];
        psi = std::move(next);
    }
    return psi.col(0);
}

std::vector<Mat4> mps_to_sequential_gates(const MPSState &mps) {
    require_sites(mps, 2);
    for (int d : mps.bond_dims())
        if (d > 2) throw CapacityError("mps_to_sequential_gates: bond dimension exceeds 2");
    const MPSState m = canonicalize_right(mps);
    const int n = m.num_sites();
    auto entry = [](const Mat &x, Eigen::Index r, Eigen::Index c) {
        return (r < x.rows() && c < x.cols()) ? x(r, c) : cplx(0.0);
    };
    std::vector<Mat4> gates;
    if (n == 2) {
        Vec v(4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) v(2 * i + j) = (m.sites[0][i] * m.sites[1][j])(0, 0);
        gates.push_back(embed_columns({{0, v}}));
        return gates;
    }
    {
        Vec v(4);
        for (int i = 0; i < 2; ++i)
            for (int b = 0; b < 2; ++b) v(2 * i + b) = entry(m.sites[0][i], 0, b);
        gates.push_back(embed_columns({{0, v}}));
    }
    for (int s = 1; s < n - 2; ++s) {
        const auto &a = m.sites[s];
        std::vector<std::pair<int, Vec>> cols;
        for (int al = 0; al < a[0].rows(); ++al) {
            Vec v(4);
            for (int i = 0; i < 2; ++i)
                for (int b = 0; b < 2; ++b) v(2 * i + b) = entry(a[i], al, b);
            cols.emplace_back(2 * al, v);
        }
        gates.push_back(embed_columns(cols));
    }
    {
        const auto &a = m.sites[n - 2];
        const auto &z = m.sites[n - 1];
        std::vector<std::pair<int, Vec>> cols;
        for (int al = 0; al < a[0].rows(); ++al) {
            Vec v(4);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) v(2 * i + j) = (a[i] * z[j])(al, 0);
            cols.emplace_back(2 * al, v);
        }
        gates.push_back(embed_columns(cols));
    }
    return gates;
}

namespace {

nlohmann::json site_to_json(const SiteTensor &s) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index al = 0; al < s[0].rows(); ++al)
        for (int i = 0; i < 2; ++i)
            for (Eigen::Index be = 0; be < s[0].cols(); ++be) {
                re.push_back(s[i](al, be).real());
                im.push_back(s[i](al, be).imag());
            }
    return {{"shape", {s[0].rows(), 2, s[0].cols()}}, {"re", re}, {"im", im}};
}

SiteTensor site_from_json(const nlohmann::json &j) {
    const int dl = j.at("shape").at(0).get<int>();
    const int dr = j.at("shape").at(2).get<int>();
    const auto &re = j.at("re");
    const auto &im = j.at("im");
    if (re.size() != static_cast<size_t>(2 * dl * dr) || im.size() != re.size())
        throw ParameterError("site tensor: entry count does not match shape");
    SiteTensor s{Mat(dl, dr), Mat(dl, dr)};
    size_t k = 0;
    for (int al = 0; al < dl; ++al)
        for (int i = 0; i < 2; ++i)
            for (int be = 0; be < dr; ++be, ++k) s[i](al, be) = cplx(re[k].get<double>(), im[k].get<double>());
    return s;
}

const char *form_name(CanonicalForm f) {
    switch (f) {
        case CanonicalForm::left: return "left";
        case CanonicalForm::right: return "right";
        default: return "none";
    }
}

}  // namespace

nlohmann::json mps_to_json(const MPSState &mps) {
    nlohmann::json sites = nlohmann::json::array();
    for (const auto &s : mps.sites) sites.push_back(site_to_json(s));
    return {{"index_order", "left,physical,right"}, {"canonical", form_name(mps.canonical)}, {"sites", sites}};
}

MPSState mps_from_json(const nlohmann::json &j) {
    MPSState mps;
    for (const auto &s : j.at("sites")) mps.sites.push_back(site_from_json(s));
    const std::string form = j.value("canonical", "none");
    mps.canonical = form == "left" ? CanonicalForm::left
                    : form == "right" ? CanonicalForm::right
                                      : CanonicalForm::none;
    return mps;
}

nlohmann::json bulk_tensor_to_json(const BulkTensor &tensor) { return site_to_json(tensor.a); }

BulkTensor bulk_tensor_from_json(const nlohmann::json &j) { return BulkTensor{site_from_json(j)}; }

}  // namespace psc
