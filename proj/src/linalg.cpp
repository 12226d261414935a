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


#include "psc/linalg.hpp"

#include <cmath>

#include "psc/error.hpp"

namespace psc {

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng make_rng(uint64_t seed, uint64_t stream) { return Rng(mix_seed(seed, stream)); }

Mat haar_unitary(int n, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat z(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) z(r, c) = cplx(normal(rng), normal(rng));
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        double mag = std::abs(r(k, k));
        cplx phase = mag > 0 ? r(k, k) / mag : cplx(1.0);
        q.col(k) *= phase;
    }
    return q;
}

Mat polar_unitary(const Mat &x) {
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

Mat complete_to_unitary(const Mat &cols) {
    const int n = static_cast<int>(cols.rows());
    Mat u(n, n);
    int k = static_cast<int>(cols.cols());
    u.leftCols(k) = cols;
    for (int e = 0; e < n && k < n; ++e) {
        Vec v = Vec::Zero(n);
        v(e) = 1.0;
        // Two passes keep the complement orthogonal to machine precision.
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < k; ++j) v -= u.col(j) * u.col(j).dot(v);
        double norm = v.norm();
        if (norm < 1e-8) continue;
        u.col(k++) = v / norm;
    }
    if (k != n) throw NumericalError("complete_to_unitary: input columns are not independent");
    return u;
}

Mat2 pauli(int index) {
    Mat2 p;
    const cplx i(0.0, 1.0);
    switch (index) {
        case 0: p << 1, 0, 0, 1; break;
        case 1: p << 0, 1, 1, 0; break;
        case 2: p << 0, -i, i, 0; break;
        case 3: p << 1, 0, 0, -1; break;
        default: throw ParameterError("pauli: index must be in 0..3");
    }
    return p;
}

Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

Mat pauli_rotation(const Mat &p, double theta) {
    Mat id = Mat::Identity(p.rows(), p.cols());
    return std::cos(theta / 2) * id - cplx(0.0, std::sin(theta / 2)) * p;
}

Mat expm_antihermitian(const Mat &a) {
    const Mat h = cplx(0.0, 1.0) * a;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
    const Eigen::VectorXcd phases = (-cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double unitarity_error(const Mat &u) {
    return (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

namespace {

double r_squared(const std::vector<double> &x, const std::vector<double> &y, double slope,
                 double intercept) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t k = 0; k < y.size(); ++k) {
        double e = y[k] - (slope * x[k] + intercept);
        ss_res += e * e;
        ss_tot += (y[k] - mean) * (y[k] - mean);
    }
    return ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
}

}  // namespace

LinearFit fit_line(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) throw ParameterError("fit_line: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    double den = n * sxx - sx * sx;
    if (den == 0) throw NumericalError("fit_line: degenerate abscissae");
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    f.r_squared = r_squared(x, y, f.slope, f.intercept);
    return f;
}

LinearFit fit_line_through_origin(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.empty()) throw ParameterError("fit_line_through_origin: need paired points");
    double sxx = 0, sxy = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    if (sxx == 0) throw NumericalError("fit_line_through_origin: all abscissae zero");
    LinearFit f;
    f.slope = sxy / sxx;
    f.r_squared = r_squared(x, y, f.slope, 0.0);
    return f;
}

MeanStderr mean_and_stderr(const std::vector<double> &samples) {
    MeanStderr m;
    if (samples.empty()) return m;
    const double n = static_cast<double>(samples.size());
    for (double s : samples) m.mean += s;
    m.mean /= n;
    if (samples.size() < 2) return m;
    double var = 0;
    for (double s : samples) var += (s - m.mean) * (s - m.mean);
    var /= (n - 1);
    m.stderr_ = std::sqrt(var / n);
    return m;
}

}  // namespace psc
