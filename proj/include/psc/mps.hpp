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


#ifndef PSC_MPS_HPP
#define PSC_MPS_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"
#include "psc/linalg.hpp"

namespace psc {

/// One MPS site: entry i is the D_left x D_right matrix for physical state i.
using SiteTensor = std::array<Mat, 2>;

/// Translation-invariant bulk tensor A^i_{alpha beta}, D = 2, d = 2.
struct BulkTensor {
    SiteTensor a;

    int bond_dim() const { return static_cast<int>(a[0].rows()); }
    /// max |sum_i A^i^dagger A^i - I|
    double left_canonical_error() const;
    /// max |sum_i A^i A^i^dagger - I|
    double right_canonical_error() const;
};

enum class CanonicalForm { none, left, right };

struct MPSState {
    std::vector<SiteTensor> sites;
    CanonicalForm canonical = CanonicalForm::none;

    int num_sites() const { return static_cast<int>(sites.size()); }
    /// Bond dimension between site n and n+1 (n = 1..N-1).
    std::vector<int> bond_dims() const;
};

/// A0 = [[0,0],[1,1]], A1 = [[1,g],[0,0]]. Requires -1 < g < 0; with
/// `allow_limits` the closed interval [-1, 0] is accepted.
BulkTensor family_tensor(double g, bool allow_limits = false);

/// xi = 1 / ln((1-g)/(1+g)).
double correlation_length_family(double g);

/// Inverse of correlation_length_family: g = -tanh(1 / (2 xi)).
double family_coupling_for_length(double xi);

/// Carves A^i_{alpha beta} = U(2 alpha + i, beta) from a Haar unitary on C^4;
/// left-canonical by construction.
BulkTensor random_bulk_tensor(uint64_t seed);

/// Gauge transform to sum_i A^i^dagger A^i = I using the left fixed point of
/// E_AA, with the leading eigenvalue scaled to 1.
BulkTensor canonicalize(const BulkTensor &tensor);

/// Gauge transform to sum_i A^i A^i^dagger = I (right fixed point). Sequential
/// circuits that carry the bond towards higher sites realize this gauge.
BulkTensor canonicalize_right(const BulkTensor &tensor);

/// Left-canonical QR sweep; the norm is removed so the state has norm 1.
MPSState canonicalize(const MPSState &mps);
MPSState canonicalize_right(const MPSState &mps);

/// Qubit 1 is the left boundary leg delta_{i alpha}, qubits 2..N-1 carry the
/// bulk tensor, qubit N is the right boundary leg delta_{beta i}. Normalized.
MPSState build_bulk_ti_mps(const BulkTensor &tensor, int num_sites);

MPSState product_state_mps(const std::vector<Eigen::Vector2cd> &qubits);

struct TransferMatrix {
    Mat4 entries;  // row/col index 2 a' + a for conj(A) (x) A
    std::vector<cplx> eigenvalues;  // sorted by decreasing magnitude
};

/// E_AA = sum_i conj(A^i) (x) A^i, contracted from the left: l^T E.
TransferMatrix transfer_matrix(const BulkTensor &tensor);

/// sum_i conj(W^i) (x) A^i for two (possibly different) tensors.
Mat4 mixed_transfer_matrix(const BulkTensor &w, const BulkTensor &a);

struct FixedPoints {
    Vec left;   // l^T E = lambda_1 l^T
    Vec right;  // E r = lambda_1 r
    cplx lambda = 1.0;
    bool degenerate = false;  // |lambda_1| - |lambda_2| < 1e-8
};

/// Leading eigenvectors normalized so that l^T r = 1. For a left-canonical
/// tensor `left` is proportional to the vectorized identity.
FixedPoints fixed_points(const TransferMatrix &e);

struct CorrelationProfile {
    std::vector<cplx> amplitudes;  // C_j
    std::vector<double> lengths;   // xi_j
    double correlation_length = 0.0;
};

/// Bulk connected correlator C(r) = sum_j C_j exp(-r / xi_j) for operators
/// o1 at site i and o2 at site i + r, from the transfer spectrum.
CorrelationProfile correlation_profile(const BulkTensor &tensor, const Mat2 &o1, const Mat2 &o2);

/// -1 / ln|lambda_2|; infinity when |lambda_2| = 1, 0 when lambda_2 = 0.
double correlation_length(const BulkTensor &tensor);

cplx overlap(const MPSState &a, const MPSState &b);
double norm(const MPSState &mps);

struct TwoSiteTerm {
    int site = 1;  // acts on (site, site + 1), basis index 2 i_site + i_{site+1}
    Mat4 op;
};

/// <phi| sum_k terms_k |phi> / <phi|phi>, real part.
double expectation(const MPSState &mps, const std::vector<TwoSiteTerm> &terms);

/// <phi| prod_k O_k |phi> / <phi|phi> for single-site operators on distinct sites.
cplx expectation_product(const MPSState &mps, const std::vector<std::pair<int, Mat2>> &ops);

/// <O_i O_j> - <O_i><O_j>; requires 1 <= i < j <= N.
cplx correlation_function(const MPSState &mps, const Mat2 &oi, const Mat2 &oj, int i, int j);

/// Dense amplitudes, qubit 1 most significant. Throws CapacityError for N > 26.
Vec to_statevector(const MPSState &mps);

/// N-1 two-qubit unitaries whose ascending sequential circuit maps |0...0>
/// to the (normalized) MPS. Gate b acts on qubits (b, b+1); gate 1 prepares
/// site 1 and the first bond, gate b > 1 maps |alpha>|0> to
/// sum A_b^i_{alpha beta} |i>|beta>, the last gate also absorbs site N.
/// The state is right-canonicalized internally.
std::vector<Mat4> mps_to_sequential_gates(const MPSState &mps);

nlohmann::json mps_to_json(const MPSState &mps);
MPSState mps_from_json(const nlohmann::json &j);
nlohmann::json bulk_tensor_to_json(const BulkTensor &tensor);
BulkTensor bulk_tensor_from_json(const nlohmann::json &j);

}  // namespace psc

#endif  // PSC_MPS_HPP
