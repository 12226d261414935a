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

#ifndef PSC_ERRORPROP_HPP
#define PSC_ERRORPROP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "psc/layout.hpp"
#include "psc/linalg.hpp"

namespace psc {

/// 1 marks a depolarized qubit; index 0 is qubit 1.
using ErrorString = std::vector<uint8_t>;

/// Gate rule on qubits (bond, bond + 1): a single 1 becomes (1, 1) with probability 4/5
/// and (0, 0) with probability 1/5; (0, 0) and (1, 1) are kept.
void step_gate(ErrorString &state, int bond, Rng &rng);

/// Every 0 turns into 1 independently with probability p1.
void step_idle(ErrorString &state, double p1, Rng &rng);

/// U^dagger U schedule: the forward steps followed by the same steps in reverse order.
struct EchoSchedule {
    int num_qubits = 0;
    int forward_depth = 0;
    std::vector<std::vector<int>> steps;  // bonds acted on at each of the 2T steps
    LayoutParams params;
    std::string kind;

    int total_depth() const { return static_cast<int>(steps.size()); }
};

EchoSchedule echo_schedule(const CircuitLayout &layout);

/// 2T idle steps without gates.
EchoSchedule gateless_schedule(int num_qubits, int depth);

struct PropagationRecord {
    LayoutParams params;
    std::string kind;
    int num_qubits = 0;
    int depth = 0;  // forward depth T
    double p1 = 0.0;
    double eta_over_n = 0.0;
    double stderr_ = 0.0;
    int samples = 0;
};

nlohmann::json propagation_record_to_json(const PropagationRecord &record);

struct EchoOptions {
    int samples = 1000;
    uint64_t seed = 1;
    int workers = 0;
};

/// Each step: idle on every qubit, then the gate rule on that step's bonds.
/// Trajectory s draws from the stream (seed, s).
PropagationRecord run_echo_mc(const EchoSchedule &schedule, double p1, const EchoOptions &options = {});
PropagationRecord run_echo_mc(const CircuitLayout &layout, double p1, const EchoOptions &options = {});

/// <eta>/N of the gateless echo: 1 - (1 - p1)^{2T}.
double idle_eta_closed_form(double p1, int depth);

/// Expected error-string length after M sequential layers from a single error, by exact
/// evolution of the length distribution: k > 0 goes to max(0, k + r) with
/// P(r) = (1/5)(4/5)^{r+1}, r >= -1; 0 is absorbing.
double sequential_string_length(int num_layers);

/// (1/5) sum_k (4/5)^k (k - 1), in closed form.
double mean_growth_per_layer();

/// The same series cut after `terms` terms.
double mean_growth_partial_sum(int terms);

/// Monte Carlo of the same quantity on the layout itself: one error at the centre of an
/// N-qubit M-layer sequential circuit, gate rule only, ones counted at the end.
MeanStderr sequential_string_length_mc(int num_layers, int num_qubits, int samples, uint64_t seed,
                                       int workers = 0);

struct EtaCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
    double r2 = 0.0;
    bool regime_warning = false;  // some record has p1 T M > 0.3
};

/// Least squares of <eta> / (N p1 T) against M; needs at least 4 records.
EtaCoefficients fit_eta_coefficients(const std::vector<PropagationRecord> &records);

struct PowerLawFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
};

/// Fit of log(<eta>/N) against log T, weighted by the Monte Carlo errors.
PowerLawFit fit_power_law(const std::vector<PropagationRecord> &records);

}  // namespace psc

#endif  // PSC_ERRORPROP_HPP
