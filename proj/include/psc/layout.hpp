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

#ifndef PSC_LAYOUT_HPP
#define PSC_LAYOUT_HPP

#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace psc {

/// Hyperparameters of a parallel-sequential layout on an open chain.
///
/// Qubits are labelled 1..N and bonds 1..N-1 (bond b couples qubits b, b+1).
/// `chunk_length` is the number of bonds in one sequential chunk and `overlap`
/// the number of sites by which the staircase of a chunk reaches into its
/// right neighbour.
struct LayoutParams {
    int num_qubits = 0;
    int num_layers = 1;
    int chunk_length = 2;
    int overlap = 1;

    /// Throws ParameterError naming the first violated invariant.
    void validate() const;
    bool operator==(const LayoutParams &) const = default;
};

struct GatePlacement {
    int bond = 0;       // 1-indexed, acts on qubits (bond, bond + 1)
    int layer = 0;      // 1..M within the owning chunk's stack
    int time_step = 0;  // 1..T after ASAP scheduling
    int chunk = 0;      // 0-indexed owning chunk

    bool operator==(const GatePlacement &) const = default;
};

enum class LayoutKind { parallel_sequential, brickwall, sequential };

class CircuitLayout {
public:
    CircuitLayout() = default;
    CircuitLayout(LayoutParams params, LayoutKind kind, std::vector<GatePlacement> placements,
                  int num_chunks);

    const LayoutParams &params() const { return params_; }
    LayoutKind kind() const { return kind_; }
    int num_qubits() const { return params_.num_qubits; }
    /// Sorted by (time_step, bond, layer).
    const std::vector<GatePlacement> &placements() const { return placements_; }
    int depth() const { return depth_; }
    int num_chunks() const { return num_chunks_; }
    size_t gate_count() const { return placements_.size(); }

    /// l + q + 2M - 3; the scheduled depth equals this whenever neighbouring
    /// chunk stacks never compete for a qubit at the same natural time step.
    int formula_depth() const;
    bool matches_depth_formula() const { return depth_ == formula_depth(); }

    /// Indices into placements() grouped by time step (entry t-1 holds step t).
    std::vector<std::vector<size_t>> steps() const;

    /// First site owned by chunk c (0-indexed chunk); chunk c owns sites
    /// [c*l + 1, (c+1)*l].
    int chunk_first_site(int chunk) const { return chunk * params_.chunk_length + 1; }

private:
    LayoutParams params_;
    LayoutKind kind_ = LayoutKind::parallel_sequential;
    std::vector<GatePlacement> placements_;
    int depth_ = 0;
    int num_chunks_ = 0;
};

/// Builds the PS layout: chunk c (0-indexed) is an M-layer sequential staircase
/// over bonds c*l+1 .. c*l+l+q-1 (no extension for the last chunk, truncated at
/// N-1). Placement (local bond j, layer m) has natural time j + 2(m-1). Gates
/// sharing a qubit are ordered by natural time, ties going to the right-hand
/// chunk, and the resulting precedence DAG is scheduled as soon as possible.
CircuitLayout build_ps_layout(const LayoutParams &params);

/// PS limit l = 2, q = 1. For N = 2 this is M stacked gates with depth M.
CircuitLayout build_brickwall_layout(int num_qubits, int num_layers);

/// PS limit l = N - 1, q = 1 (requires N >= 3).
CircuitLayout build_sequential_layout(int num_qubits, int num_layers);

size_t gate_count(const CircuitLayout &layout);

/// Input sites (1-indexed) whose initial state can influence output `site`.
std::set<int> inverse_light_cone(const CircuitLayout &layout, int site);

/// Smallest separation r at which some pair (i, i + r) straddling a chunk
/// boundary has disjoint inverse light cones, minus one; N - 1 if no such pair
/// exists anywhere (a single-chunk layout).
int max_junction_correlation_distance(const CircuitLayout &layout);

bool same_placements(const CircuitLayout &a, const CircuitLayout &b);

std::string to_string(LayoutKind kind);

nlohmann::json layout_to_json(const CircuitLayout &layout);
CircuitLayout layout_from_json(const nlohmann::json &j);

}  // namespace psc

#endif  // PSC_LAYOUT_HPP
