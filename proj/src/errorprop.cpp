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

#include "psc/errorprop.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "psc/error.hpp"
#include "psc/parallel.hpp"

namespace psc {

void step_gate(ErrorString &state, int bond, Rng &rng) {
    if (bond < 1 || bond + 1 > static_cast<int>(state.size())) throw ParameterError("step_gate: bond out of range");
    uint8_t &a = state[bond - 1], &b = state[bond];
    if (a == b) return;
    // 4/5 = P(u < 0.8) for u uniform in [0, 1).
    const uint8_t v = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.8 ? 1 : 0;
    a = v;
    b = v;
}

void step_idle(ErrorString &state, double p1, Rng &rng) {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw ParameterError("step_idle: p1 must lie in [0, 1]");
    if (p1 == 0.0) return;
    if (p1 == 1.0) {
        std::fill(state.begin(), state.end(), uint8_t{1});
        return;
    }
    // Gaps between flipped positions are geometric.
    std::geometric_distribution<long long> gap(p1);
    const long long n = static_cast<long long>(state.size());
    for (long long pos = gap(rng); pos < n; pos += 1 + gap(rng)) state[pos] = 1;
}

EchoSchedule echo_schedule(const CircuitLayout &layout) {
    EchoSchedule s;
    s.num_qubits = layout.num_qubits();
    s.forward_depth = layout.depth();
    s.params = layout.params();
    s.kind = to_string(layout.kind());
    const auto &pl = layout.placements();
    for (const auto &step : layout.steps()) {
        std::vector<int> bonds;
        for (size_t k : step) bonds.push_back(pl[k].bond);
        s.steps.push_back(std::move(bonds));
    }
    for (int t = s.forward_depth - 1; t >= 0; --t) s.steps.push_back(s.steps[t]);
    return s;
}

EchoSchedule gateless_schedule(int num_qubits, int depth) {
    if (num_qubits < 1 || depth < 0) throw ParameterError("gateless_schedule: need N >= 1 and T >= 0");
    EchoSchedule s;
    s.num_qubits = num_qubits;
    s.forward_depth = depth;
    s.params = {num_qubits, 0, 0, 0};
    s.kind = "gateless";
    s.steps.assign(2 * depth, {});
    return s;
}

nlohmann::json propagation_record_to_json(const PropagationRecord &r) {
    return {{"N", r.num_qubits},          {"M", r.params.num_layers}, {"l", r.params.chunk_length},
            {"q", r.params.overlap},      {"kind", r.kind},           {"T", r.depth},
            {"p1", r.p1},                 {"eta_over_N", r.eta_over_n}, {"stderr", r.stderr_},
            {"samples", r.samples}};
}

PropagationRecord run_echo_mc(const EchoSchedule &schedule, double p1, const EchoOptions &options) {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw ParameterError("run_echo_mc: p1 must lie in [0, 1]");
    if (options.samples < 1) throw ParameterError("run_echo_mc: samples must be positive");
    const auto fractions = parallel_map<double>(
        options.samples,
        [&](size_t s) {
            Rng rng = make_rng(options.seed, s);
            ErrorString state(schedule.num_qubits, 0);
            for (const auto &bonds : schedule.steps) {
                step_idle(state, p1, rng);
                for (int b : bonds) step_gate(state, b, rng);
            }
            return static_cast<double>(std::count(state.begin(), state.end(), uint8_t{1})) / schedule.num_qubits;
        },
        options.workers);
    const MeanStderr ms = mean_and_stderr(fractions);
    PropagationRecord r;
    r.params = schedule.params;
    r.kind = schedule.kind;
    r.num_qubits = schedule.num_qubits;
    r.depth = schedule.forward_depth;
    r.p1 = p1;
    r.eta_over_n = ms.mean;
    r.stderr_ = ms.stderr_;
    r.samples = options.samples;
    return r;
}

PropagationRecord run_echo_mc(const CircuitLayout &layout, double p1, const EchoOptions &options) {
    return run_echo_mc(echo_schedule(layout), p1, options);
}

double idle_eta_closed_form(double p1, int depth) { return 1.0 - std::pow(1.0 - p1, 2.0 * depth); }

double sequential_string_length(int num_layers) {
    if (num_layers < 0) throw ParameterError("sequential_string_length: M >= 0 required");
    // P(r) = (1/5)(4/5)^{r+1}; jumps beyond kMaxJump carry mass (4/5)^{kMaxJump+2} < 1e-15.
    constexpr int kMaxJump = 160;
    std::vector<double> jump(kMaxJump + 2);
    for (int r = -1; r <= kMaxJump; ++r) jump[r + 1] = 0.2 * std::pow(0.8, r + 1);
    std::vector<double> dist{0.0, 1.0};
    for (int m = 0; m < num_layers; ++m) {
        std::vector<double> next(dist.size() + kMaxJump, 0.0);
        next[0] = dist[0];
        for (size_t k = 1; k < dist.size(); ++k) {
            if (dist[k] == 0.0) continue;
            for (int r = -1; r <= kMaxJump; ++r) next[k + r] += dist[k] * jump[r + 1];
        }
        while (next.size() > 2 && next.back() < 1e-300) next.pop_back();
        dist = std::move(next);
    }
    double mean = 0.0;
    for (size_t k = 1; k < dist.size(); ++k) mean += k * dist[k];
    return mean;
}

double mean_growth_per_layer() {
    constexpr double x = 0.8;
    return 0.2 * (x / ((1.0 - x) * (1.0 - x)) - 1.0 / (1.0 - x));
}

double mean_growth_partial_sum(int terms) {
    double s = 0.0;
    for (int k = 0; k < terms; ++k) s += 0.2 * std::pow(0.8, k) * (k - 1);
    return s;
}

MeanStderr sequential_string_length_mc(int num_layers, int num_qubits, int samples, uint64_t seed, int workers) {
    if (num_layers < 1 || num_qubits < 3) throw ParameterError("sequential_string_length_mc: need M >= 1, N >= 3");
    const EchoSchedule forward = [&] {
        EchoSchedule s = echo_schedule(build_sequential_layout(num_qubits, num_layers));
        s.steps.resize(s.forward_depth);
        return s;
    }();
    const auto lengths = parallel_map<double>(
        samples,
        [&](size_t s) {
            Rng rng = make_rng(seed, s);
            ErrorString state(num_qubits, 0);
            state[num_qubits / 2] = 1;
            for (const auto &bonds : forward.steps)
                for (int b : bonds) step_gate(state, b, rng);
            return static_cast<double>(std::count(state.begin(), state.end(), uint8_t{1}));
        },
        workers);
    return mean_and_stderr(lengths);
}

EtaCoefficients fit_eta_coefficients(const std::vector<PropagationRecord> &records) {
    if (records.size() < 4) throw ParameterError("fit_eta_coefficients: need at least 4 records");
    std::vector<double> m, y;
    EtaCoefficients out;
    for (const auto &r : records) {
        if (!(r.p1 > 0.0) || r.depth < 1) throw ParameterError("fit_eta_coefficients: need p1 > 0 and T >= 1");
        m.push_back(r.params.num_layers);
        y.push_back(r.eta_over_n / (r.p1 * r.depth));
        if (r.p1 * r.depth * r.params.num_layers > 0.3) out.regime_warning = true;
    }
    const LinearFit fit = fit_line(m, y);
    out.c1 = fit.intercept;
    out.c2 = fit.slope;
    out.r2 = fit.r_squared;
    return out;
}

PowerLawFit fit_power_law(const std::vector<PropagationRecord> &records) {
    if (records.size() < 2) throw ParameterError("fit_power_law: need at least 2 records");
    const size_t n = records.size();
    std::vector<double> x(n), y(n), w(n);
    bool weighted = true;
    for (size_t i = 0; i < n; ++i) {
        const auto &r = records[i];
        if (!(r.eta_over_n > 0.0) || r.depth < 1) throw NumericalError("fit_power_law: need eta > 0 and T >= 1");
        x[i] = std::log(static_cast<double>(r.depth));
        y[i] = std::log(r.eta_over_n);
        const double sigma = r.stderr_ / r.eta_over_n;
        if (!(sigma > 0.0)) weighted = false;
        w[i] = sigma > 0.0 ? 1.0 / (sigma * sigma) : 1.0;
    }
    if (!weighted) std::fill(w.begin(), w.end(), 1.0);
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += w[i] * (x[i] - xm) * (x[i] - xm);
        sxy += w[i] * (x[i] - xm) * (y[i] - ym);
    }
    if (!(sxx > 0.0)) throw NumericalError("fit_power_law: depths must differ");
    PowerLawFit out;
    out.exponent = sxy / sxx;
    out.prefactor = std::exp(ym - out.exponent * xm);
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double e = y[i] - (ym + out.exponent * (x[i] - xm));
        ss_res += w[i] * e * e;
        ss_tot += w[i] * (y[i] - ym) * (y[i] - ym);
    }
    out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    // Weighted errors give the stderr directly; otherwise it comes from the residual scatter.
    out.exponent_stderr = weighted ? std::sqrt(1.0 / sxx)
                                   : (n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0);
    return out;
}

}  // namespace psc
