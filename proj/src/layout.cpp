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

#include "psc/layout.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "psc/error.hpp"

namespace psc {

void LayoutParams::validate() const {
    const int n = num_qubits, m = num_layers, l = chunk_length, q = overlap;
    if (n < 2) throw ParameterError("num_qubits N must satisfy N >= 2 (got " + std::to_string(n) + ")");
    if (m < 1) throw ParameterError("num_layers M must satisfy M >= 1 (got " + std::to_string(m) + ")");
    if (l < 2 || l > n - 1)
        throw ParameterError("chunk_length l must satisfy 2 <= l <= N-1 (got l=" + std::to_string(l) +
                             ", N=" + std::to_string(n) + ")");
    if (q < 1 || q > l)
        throw ParameterError("overlap q must satisfy 1 <= q <= l (got q=" + std::to_string(q) +
                             ", l=" + std::to_string(l) + ")");
}

CircuitLayout::CircuitLayout(LayoutParams params, LayoutKind kind, std::vector<GatePlacement> placements,
                             int num_chunks)
    : params_(params), kind_(kind), placements_(std::move(placements)), num_chunks_(num_chunks) {
    std::sort(placements_.begin(), placements_.end(), [](const GatePlacement &a, const GatePlacement &b) {
        return std::tie(a.time_step, a.bond, a.layer, a.chunk) < std::tie(b.time_step, b.bond, b.layer, b.chunk);
    });
    depth_ = 0;
    for (const auto &p : placements_) depth_ = std::max(depth_, p.time_step);
}

int CircuitLayout::formula_depth() const {
    if (params_.num_qubits == 2) return params_.num_layers;
    return params_.chunk_length + params_.overlap + 2 * params_.num_layers - 3;
}

std::vector<std::vector<size_t>> CircuitLayout::steps() const {
    std::vector<std::vector<size_t>> out(depth_);
    for (size_t k = 0; k < placements_.size(); ++k) out[placements_[k].time_step - 1].push_back(k);
    return out;
}

namespace {

struct RawGate {
    int bond;
    int layer;
    int chunk;
    int natural_time;
};

// ASAP schedule where gates sharing a qubit are ordered by natural time, with
// ties resolved in favour of the right-hand chunk.
std::vector<GatePlacement> schedule(std::vector<RawGate> gates, int num_qubits) {
    std::sort(gates.begin(), gates.end(), [](const RawGate &a, const RawGate &b) {
        if (a.natural_time != b.natural_time) return a.natural_time < b.natural_time;
        if (a.chunk != b.chunk) return a.chunk > b.chunk;
        return a.bond < b.bond;
    });
    std::vector<int> qubit_free(num_qubits + 2, 0);
    std::vector<GatePlacement> out;
    out.reserve(gates.size());
    for (const auto &g : gates) {
        const int t = 1 + std::max(qubit_free[g.bond], qubit_free[g.bond + 1]);
        qubit_free[g.bond] = qubit_free[g.bond + 1] = t;
        out.push_back({g.bond, g.layer, t, g.chunk});
    }
    return out;
}

CircuitLayout build_unchecked(const LayoutParams &p, LayoutKind kind) {
    const int n = p.num_qubits, m = p.num_layers, l = p.chunk_length, q = p.overlap;
    const int num_bonds = n - 1;
    std::vector<RawGate> gates;
    int chunk = 0;
    for (int start = 1; start <= num_bonds; start += l, ++chunk) {
        const bool has_next = start + l <= num_bonds;
        const int last = std::min(num_bonds, start + l - 1 + (has_next ? q - 1 : 0));
        for (int layer = 1; layer <= m; ++layer)
            for (int b = start; b <= last; ++b) gates.push_back({b, layer, chunk, (b - start + 1) + 2 * (layer - 1)});
    }
    const int num_chunks = (n + l - 1) / l;
    return CircuitLayout(p, kind, schedule(std::move(gates), n), num_chunks);
}

}  // namespace

CircuitLayout build_ps_layout(const LayoutParams &params) {
    params.validate();
    return build_unchecked(params, LayoutKind::parallel_sequential);
}

CircuitLayout build_brickwall_layout(int num_qubits, int num_layers) {
    if (num_qubits == 2) {
        if (num_layers < 1) throw ParameterError("num_layers M must satisfy M >= 1");
        return build_unchecked({2, num_layers, 1, 1}, LayoutKind::brickwall);
    }
    LayoutParams p{num_qubits, num_layers, 2, 1};
    p.validate();
    return build_unchecked(p, LayoutKind::brickwall);
}

CircuitLayout build_sequential_layout(int num_qubits, int num_layers) {
    if (num_qubits < 3) throw ParameterError("sequential layout needs N >= 3 so that l = N-1 >= 2");
    LayoutParams p{num_qubits, num_layers, num_qubits - 1, 1};
    p.validate();
    return build_unchecked(p, LayoutKind::sequential);
}

size_t gate_count(const CircuitLayout &layout) { return layout.gate_count(); }

std::set<int> inverse_light_cone(const CircuitLayout &layout, int site) {
    if (site < 1 || site > layout.num_qubits()) throw ParameterError("site out of range [1, N]");
    std::vector<char> in(layout.num_qubits() + 2, 0);
    in[site] = 1;
    const auto &pl = layout.placements();
    for (auto it = pl.rbegin(); it != pl.rend(); ++it) {
        if (in[it->bond] || in[it->bond + 1]) in[it->bond] = in[it->bond + 1] = 1;
    }
    std::set<int> cone;
    for (int s = 1; s <= layout.num_qubits(); ++s)
        if (in[s]) cone.insert(s);
    return cone;
}

int max_junction_correlation_distance(const CircuitLayout &layout) {
    const int n = layout.num_qubits();
    std::vector<std::pair<int, int>> cones;  // [lo, hi]; cones are intervals on a chain
    cones.reserve(n + 1);
    cones.emplace_back(0, -1);
    for (int s = 1; s <= n; ++s) {
        auto c = inverse_light_cone(layout, s);
        cones.emplace_back(*c.begin(), *c.rbegin());
    }
    auto disjoint = [&](int i, int j) { return cones[i].second < cones[j].first || cones[j].second < cones[i].first; };

    int best = -1;
    for (int c = 0; c + 1 < layout.num_chunks(); ++c) {
        const int boundary = layout.chunk_first_site(c + 1) - 1;  // last site owned by chunk c
        if (boundary >= n) break;
        for (int r = 1; r < n; ++r) {
            bool found = false;
            for (int i = std::max(1, boundary - r + 1); i <= boundary && i + r <= n; ++i) {
                if (disjoint(i, i + r)) {
                    found = true;
                    break;
                }
            }
            if (found) {
                if (best < 0 || r - 1 < best) best = r - 1;
                break;
            }
        }
    }
    return best < 0 ? n - 1 : best;
}

bool same_placements(const CircuitLayout &a, const CircuitLayout &b) {
    if (a.gate_count() != b.gate_count()) return false;
    auto key = [](const CircuitLayout &x) {
        std::vector<std::tuple<int, int, int>> v;
        for (const auto &p : x.placements()) v.emplace_back(p.bond, p.layer, p.time_step);
        std::sort(v.begin(), v.end());
        return v;
    };
    return key(a) == key(b);
}

std::string to_string(LayoutKind kind) {
    switch (kind) {
        case LayoutKind::brickwall: return "brickwall";
        case LayoutKind::sequential: return "sequential";
        default: return "ps";
    }
}

nlohmann::json layout_to_json(const CircuitLayout &layout) {
    const auto &p = layout.params();
    nlohmann::json placements = nlohmann::json::array();
    for (const auto &g : layout.placements())
        placements.push_back({{"bond", g.bond}, {"layer", g.layer}, {"t", g.time_step}, {"chunk", g.chunk}});
    return {{"kind", to_string(layout.kind())},
            {"params", {{"N", p.num_qubits}, {"M", p.num_layers}, {"l", p.chunk_length}, {"q", p.overlap}}},
            {"placements", std::move(placements)},
            {"depth", layout.depth()},
            {"n_chunks", layout.num_chunks()}};
}

CircuitLayout layout_from_json(const nlohmann::json &j) {
    const auto &pj = j.at("params");
    LayoutParams p{pj.at("N").get<int>(), pj.at("M").get<int>(), pj.at("l").get<int>(), pj.at("q").get<int>()};
    const std::string kind_name = j.value("kind", "ps");
    LayoutKind kind = kind_name == "brickwall"    ? LayoutKind::brickwall
                      : kind_name == "sequential" ? LayoutKind::sequential
                                                  : LayoutKind::parallel_sequential;
    std::vector<GatePlacement> placements;
    for (const auto &g : j.at("placements"))
        placements.push_back({g.at("bond").get<int>(), g.at("layer").get<int>(), g.at("t").get<int>(),
                              g.value("chunk", 0)});
    CircuitLayout out(p, kind, std::move(placements), j.at("n_chunks").get<int>());
    if (out.depth() != j.at("depth").get<int>()) throw ParameterError("layout JSON depth disagrees with placements");
    return out;
}

}  // namespace psc
