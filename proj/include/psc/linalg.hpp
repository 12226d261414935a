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


#ifndef PSC_LINALG_HPP
#define PSC_LINALG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace psc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent streams from one seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);
Rng make_rng(uint64_t seed, uint64_t stream = 0);

/// Haar-distributed n x n unitary (QR of a Ginibre matrix, phases fixed).
Mat haar_unitary(int n, Rng &rng);

/// Closest unitary to X in Frobenius norm, U V^dagger from X = U S V^dagger.
/// Maximizes Re Tr(G^dagger X) over unitaries G.
Mat polar_unitary(const Mat &x);

/// Extends the orthonormal columns of `cols` (n x k) to an n x n unitary.
/// Missing columns come from Gram-Schmidt over e_0, e_1, ... in order.
Mat complete_to_unitary(const Mat &cols);

/// Pauli matrix by index: 0 = I, 1 = X, 2 = Y, 3 = Z.
Mat2 pauli(int index);

Mat kron(const Mat &a, const Mat &b);

/// exp(-i theta P / 2) for an involutory Pauli string P.
Mat pauli_rotation(const Mat &p, double theta);

/// exp(A) for anti-Hermitian A, through the eigendecomposition of the Hermitian iA.
Mat expm_antihermitian(const Mat &a);

/// Deviation of U from unitarity, max |U^dagger U - I|.
double unitarity_error(const Mat &u);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(const std::vector<double> &x, const std::vector<double> &y);

/// Least squares through the origin, y = slope * x; r_squared is the
/// centred coefficient of determination of that constrained model.
LinearFit fit_line_through_origin(const std::vector<double> &x, const std::vector<double> &y);

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanStderr mean_and_stderr(const std::vector<double> &samples);

}  // namespace psc

#endif  // PSC_LINALG_HPP
