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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "psc/config.hpp"
#include "psc/error.hpp"
#include "psc/errorprop.hpp"
#include "psc/experiments.hpp"
#include "psc/gradvar.hpp"
#include "psc/layout.hpp"
#include "psc/mps.hpp"
#include "psc/sim.hpp"
#include "psc/vqe.hpp"

namespace {

using namespace psc;
using nlohmann::json;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, ...) {
    char buf[1024];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

Config config_of(const std::string &text) { return Config::parse("seed = 1\n" + text); }

// Layout suite over N <= 12, M <= 3 and every (l, q) accepted by validate().
Outcome criterion_layout() {
    int checked = 0, depth_fail = 0, limit_checked = 0, limit_fail = 0, cone_checked = 0, cone_fail = 0;
    std::string first_depth, first_cone;
    for (int n = 2; n <= 12; ++n)
        for (int m = 1; m <= 3; ++m) {
            for (int l = 1; l <= n; ++l)
                for (int q = 1; q <= n; ++q) {
                    const LayoutParams p{n, m, l, q};
                    try {
                        p.validate();
                    } catch (const ParameterError &) {
                        continue;
                    }
                    const CircuitLayout layout = build_ps_layout(p);
                    ++checked;
                    if (!layout.matches_depth_formula()) {
                        if (depth_fail++ == 0)
                            first_depth = fmt("(N=%d M=%d l=%d q=%d: T=%d vs %d)", n, m, l, q, layout.depth(),
                                              layout.formula_depth());
                    }
                    if (layout.num_chunks() >= 2) {
                        ++cone_checked;
                        const int rc = max_junction_correlation_distance(layout);
                        if (rc != q + m && cone_fail++ == 0)
                            first_cone = fmt("(N=%d M=%d l=%d q=%d: R_c=%d)", n, m, l, q, rc);
                    }
                }
            if (n >= 3) {
                ++limit_checked;
                if (!same_placements(build_ps_layout({n, m, 2, 1}), build_brickwall_layout(n, m))) ++limit_fail;
                if (!same_placements(build_ps_layout({n, m, n - 1, 1}), build_sequential_layout(n, m)))
                    ++limit_fail;
            }
        }
    return {depth_fail == 0 && limit_fail == 0 && cone_fail == 0,
            fmt("%d layouts: depth formula violated in %d %s; limit mismatches %d of %d; R_c != q+M in %d of %d "
                "multi-chunk layouts %s",
                checked, depth_fail, first_depth.c_str(), limit_fail, 2 * limit_checked, cone_fail, cone_checked, first_cone.c_str())};
}

Outcome criterion_mps_exactness() {
    double worst = 0.0;
    int cases = 0;
    auto check = [&](const BulkTensor &t) {
        for (int n : {4, 9, 16}) {
            const MPSState mps = build_bulk_ti_mps(t, n);
            const PSCircuit c{build_sequential_layout(n, 1), mps_to_sequential_gates(mps)};
            worst = std::max(worst, 1.0 - std::norm(to_statevector(mps).dot(run_statevector(c))));
            ++cases;
        }
    };
    for (uint64_t s = 0; s < 20; ++s) check(random_bulk_tensor(s));
    for (double g : {-0.9, -0.6, -1.0 / 3.0, -0.2, -0.1}) check(family_tensor(g));
    return {worst < 1e-10, fmt("%d states, worst infidelity %.3e (tol 1e-10)", cases, worst)};
}

Outcome criterion_kappa_scaling() {
    const json out = run_experiment("fig2a", config_of("")).json;
    double min_r2 = 1.0, worst_rel = 0.0;
    for (const auto &r : out["rows"]) {
        min_r2 = std::min(min_r2, r["route_b_r2"].get<double>());
        const double a = r["kappa"], b = r["kappa_route_b"];
        worst_rel = std::max(worst_rel, std::abs(b / a - 1.0));
    }
    double gmin = 1e9, gmax = -1e9;
    for (const auto &f : out["gamma_fits"]) {
        gmin = std::min(gmin, f["gamma"].get<double>());
        gmax = std::max(gmax, f["gamma"].get<double>());
    }
    const double pooled = out["pooled_fit"]["gamma"];
    const bool pass = min_r2 >= 0.99 && worst_rel <= 0.02 && gmin >= 1.5 && gmax <= 2.5 && pooled >= 1.5 &&
                      pooled <= 2.5;
    return {pass, fmt("-lnF vs n_C-1 min R2 %.6f (>= 0.99); route agreement worst %.2e (<= 0.02); gamma per xi "
                      "[%.3f, %.3f], pooled %.3f (in [1.5, 2.5])",
                      min_r2, worst_rel, gmin, gmax, pooled)};
}

Outcome criterion_cnot_depth() {
    const json out = run_experiment("fig2b", config_of("")).json;
    const double r2 = out["log_fit"]["r2"];
    const bool below = out["below_seq_rg"];
    std::string pts;
    for (const auto &r : out["rows"])
        pts += fmt(" N=%d:%d<%d", r["n"].get<int>(), r["cnot_depth"].get<int>(), r["seq_rg"].get<int>());
    return {r2 >= 0.95 && below, fmt("3T vs ln N R2 %.4f (>= 0.95); below seq-RG %s;%s", r2,
                                     below ? "yes" : "no", pts.c_str())};
}

Outcome criterion_energy_curves() {
    const json out = run_experiment("fig3a", config_of("")).json;
    const double tol = 1e-4;
    std::map<int, std::map<int, double>> nu;  // m -> l -> nu_xy
    for (const auto &r : out["rows"]) nu[r["m"].get<int>()][r["l"].get<int>()] = r["nu_xy"];
    int mono_fail = 0, order_fail = 0;
    std::string where;
    for (const auto &[m, curve] : nu) {
        double prev = std::numeric_limits<double>::infinity();
        int prev_l = 0;
        for (const auto &[l, v] : curve) {
            if (v > prev + tol) {
                ++mono_fail;
                if (where.size() < 200) where += fmt(" M%d:l%d->%d(+%.1e)", m, prev_l, l, v - prev);
            }
            prev = v;
            prev_l = l;
        }
    }
    if (nu.count(1) && nu.count(2))
        for (const auto &[l, v2] : nu[2])
            if (nu[1].count(l) && v2 > nu[1][l] + tol) ++order_fail;
    return {mono_fail == 0 && order_fail == 0,
            fmt("rises in l beyond 1e-4: %d%s; M=2 above M=1: %d", mono_fail, where.c_str(), order_fail)};
}

Outcome criterion_noise_fit(const json &fig3c) {
    const json &f = fig3c["noise_fit"];
    const double c_e = f["c_e"], r2 = f["r2"];
    const int layouts = f["layouts"];
    return {r2 >= 0.98 && c_e >= 0.4 && c_e <= 1.0 && layouts >= 6,
            fmt("c_E %.4f (in [0.4, 1.0]); R2 %.4f (>= 0.98); %d layouts, %d points", c_e, r2, layouts,
                f["points"].get<int>())};
}

Outcome criterion_phase_signs(const json &fig3c) {
    double min_delta = 1e9, max_diag = 0.0, best_region = -1e9;
    for (const auto &c : fig3c["cells"]) {
        const double p1 = c["p1"], p2 = c["p2"], d = c["delta"];
        min_delta = std::min(min_delta, d);
        if (p1 > 0 && p2 >= 10 * p1) best_region = std::max(best_region, d);
        if (p1 == p2) max_diag = std::max(max_diag, std::abs(d));
    }
    return {min_delta >= -1e-9 && best_region > 0 && max_diag <= 1e-4,
            fmt("min delta %.3e (>= -1e-9); max delta with p2 >= 10 p1 > 0: %.3e (> 0); max |delta| on p1 = p2: "
                "%.3e (<= 1e-4)",
                min_delta, best_region, max_diag)};
}

Outcome criterion_gradients() {
    Rng rng = make_rng(2024);
    std::uniform_int_distribution<int> pick_n(4, 6), pick_m(1, 2);
    double worst_clean = 0.0, worst_noisy = 0.0;
    auto random_circuit = [&](uint64_t s) {
        const int n = pick_n(rng), m = pick_m(rng);
        std::uniform_int_distribution<int> pick_l(2, n - 1);
        return random_param_circuit(build_ps_layout({n, m, pick_l(rng), 1}), s);
    };
    auto rel = [](double ps, double fd) { return std::abs(ps - fd) / std::max(std::abs(ps), 1e-3); };
    for (uint64_t s = 0; s < 50; ++s) {
        const ParamCircuit pc = random_circuit(s);
        for (int j = 0; j < pc.num_params(); ++j)
            worst_clean = std::max(worst_clean, rel(gradient_parameter_shift(pc, {}, j),
                                                    gradient_finite_difference(pc, {}, j)));
    }
    std::uniform_real_distribution<double> pick_p(0.0, 0.02);
    for (uint64_t s = 0; s < 20; ++s) {
        const ParamCircuit pc = random_circuit(100 + s);
        const NoiseModel nm{pick_p(rng), pick_p(rng)};
        std::uniform_int_distribution<int> pick_j(0, pc.num_params() - 1);
        for (int k = 0; k < 10; ++k) {
            const int j = pick_j(rng);
            worst_noisy = std::max(worst_noisy, rel(gradient_parameter_shift(pc, nm, j),
                                                    gradient_finite_difference(pc, nm, j)));
        }
    }
    return {worst_clean <= 1e-6 && worst_noisy <= 1e-4,
            fmt("parameter shift vs finite difference: noiseless worst rel %.2e (<= 1e-6, 50 circuits, all "
                "parameters); noisy worst rel %.2e (<= 1e-4, 20 circuits)",
                worst_clean, worst_noisy)};
}

Outcome criterion_variance_trends() {
    const json out = run_experiment("fig4a", config_of("")).json;
    const double alpha = out["trend_fit"]["alpha"], c_v = out["trend_fit"]["c_v"];
    int m_fail = 0, m_pairs = 0, p_fail = 0, p_pairs = 0, family_fail = 0;
    std::map<std::tuple<int, double, double>, std::map<int, double>> by_depth;  // (T, p1, p2) -> M -> V
    std::map<std::pair<int, int>, std::map<double, double>> by_layout;        // (M, l) -> p1 T -> V
    std::map<int, std::map<std::string, double>> family;                     // N -> family -> V
    for (const auto &r : out["rows"]) {
        const double v = r["V_E"];
        const int m = r["M"], l = r["l"], t = r["T"];
        const double p1 = r["p1"], p2 = r["p2"];
        if (r["family"] == "trend") {
            by_depth[{t, p1, p2}][m] = v;
            if (p2 == 0.0) by_layout[{m, l}][p1 * t] = v;
        } else {
            family[r["N"].get<int>()][r["family"].get<std::string>()] = v;
        }
    }
    for (const auto &[key, curve] : by_depth)
        for (auto it = curve.begin(); it != curve.end() && std::next(it) != curve.end(); ++it) {
            ++m_pairs;
            if (!(std::next(it)->second < it->second)) ++m_fail;
        }
    for (const auto &[key, curve] : by_layout)
        for (auto it = curve.begin(); it != curve.end() && std::next(it) != curve.end(); ++it) {
            ++p_pairs;
            if (!(std::next(it)->second < it->second)) ++p_fail;
        }
    std::string fam;
    for (const auto &[n, f] : family) {
        const bool ok = f.count("ps") && f.count("brickwall") && f.at("ps") > f.at("brickwall");
        if (!ok) ++family_fail;
        fam += fmt(" N=%d:%.3g>%.3g", n, f.count("ps") ? f.at("ps") : 0.0,
                   f.count("brickwall") ? f.at("brickwall") : 0.0);
    }
    return {alpha > 0.3 && c_v > 2 && m_fail == 0 && p_fail == 0 && family_fail == 0 && m_pairs > 0 && p_pairs > 0,
            fmt("alpha %.3f (> 0.3), c_V %.3f (> 2); V rising with M at fixed (T, noise): %d of %d; rising with "
                "p1 T at fixed layout: %d of %d; PS M=1 vs brickwall at equal depth:%s",
                alpha, c_v, m_fail, m_pairs, p_fail, p_pairs, fam.c_str())};
}

Outcome criterion_error_propagation() {
    bool pass = true;
    std::string d;
    // (i) idle-only echo.
    for (int t : {10, 50}) {
        EchoOptions o;
        o.samples = 2000;
        o.seed = 11 + t;
        const PropagationRecord r = run_echo_mc(gateless_schedule(1000, t), 5e-4, o);
        const double exact = idle_eta_closed_form(5e-4, t);
        const double z = std::abs(r.eta_over_n - exact) / r.stderr_;
        pass = pass && z <= 3.0;
        d += fmt("(i) T=%d %.2f sigma; ", t, z);
    }
    // (ii) sequential string length, 1e5 samples at N = 2000.
    d += "(ii)";
    for (int m = 1; m <= 4; ++m) {
        const MeanStderr mc = sequential_string_length_mc(m, 2000, 100000, 100 + m);
        const double dp = sequential_string_length(m);
        const double z = std::abs(mc.mean - dp) / mc.stderr_;
        pass = pass && z <= 3.0;
        d += fmt(" L(%d)=%.4f+-%.4f vs %.5f (%.1f sigma)", m, mc.mean, mc.stderr_, dp, z);
    }
    // (iii) asymptote.
    const double l50 = sequential_string_length(50);
    pass = pass && std::abs(l50 - (2.0 + 9.0 * 50 / 4.0)) <= 1e-6;
    d += fmt("; (iii) L(50)=%.9f vs 114.5; (iv)", l50);
    // (iv) power-law exponents.
    const json out = run_experiment("fig4b", config_of("")).json;
    for (const auto &f : out["power_law_fits"]) {
        const double e = f["exponent"];
        const bool bw = f["family"] == "brickwall";
        const bool ok = bw ? std::abs(e - 2.0) <= 0.1 : std::abs(e - 1.0) <= 0.1;
        pass = pass && ok;
        d += fmt(" %s %.3f+-%.3f", f["family"].get<std::string>().c_str(), e, f["exponent_stderr"].get<double>());
    }
    return {pass, d + " (brickwall 2.0 +- 0.1, fixed-M 1.0 +- 0.1)"};
}

Outcome criterion_oracles() {
    double worst_gs = 0.0;
    for (int n = 2; n <= 12; ++n)
        worst_gs = std::max(worst_gs, std::abs(xy_ground_energy_exact(n) - xy_ground_energy_dense(n)));
    double worst_z = 0.0;
    for (int n : {4, 6, 8}) {
        const PSCircuit c = haar_circuit(build_ps_layout({n, 2, 3, 1}), 40 + n);
        const NoiseModel noise{1e-3, 1e-2};
        const auto terms = XYHamiltonian{n}.terms();
        const double exact = density_expectation(run_density_matrix(c, noise), n, terms);
        const MeanStderr t = run_trajectories(c, noise, 10000, observable_estimator(terms), 7 + n);
        worst_z = std::max(worst_z, std::abs(t.mean - exact) / t.stderr_);
    }
    return {worst_gs <= 1e-10 && worst_z <= 3.0,
            fmt("free fermion vs dense N<=12 worst %.2e (<= 1e-10); trajectories vs density matrix N<=8 worst "
                "%.2f sigma (<= 3)",
                worst_gs, worst_z)};
}

Outcome criterion_determinism() {
    const std::map<std::string, std::string> reduced = {
        {"fig2a", "xi = 1.44, 2.5\nq_max = 3\nrestarts = 2\nmax_sweeps = 2000\nroute_b_chunks = 2, 3, 4\n"},
        {"fig2b", "xi = 2.5\nn = 30, 60\nrestarts = 2\n"},
        {"fig3a", "n = 8\nm = 1, 2\nl = 2, 4, 7\nrestarts = 2\n"},
        {"fig3c", "n = 6\nm = 1, 2\nl = 2, 3, 5\np1 = 0, 0.01\np2 = 0, 0.01\nrestarts = 2\n"},
        {"fig4a", "n = 6, 8\nsamples = 8\nbatches = 2\ntrend_n = 6\ntrend_m = 1, 2\ntrend_l = 4, 2\n"
                  "trend_p1 = 0, 0.01\n"},
        {"fig4b", "n = 200\nbw_m = 2, 4\nps_m = 1\nps_l = 8, 16\nsamples = 300\n"}};
    int mismatches = 0;
    std::string which;
    for (const auto &name : experiment_names()) {
        const Config cfg = config_of(reduced.at(name));
        const ExperimentOutput ref = run_experiment(name, cfg, 1);
        for (int w : {4, 8}) {
            const ExperimentOutput o = run_experiment(name, cfg, w);
            if (o.csv != ref.csv || o.json.dump() != ref.json.dump()) {
                ++mismatches;
                which += fmt(" %s@%d", name.c_str(), w);
            }
        }
    }
    return {mismatches == 0, fmt("6 experiments at 1, 4, 8 workers: %d mismatches%s", mismatches, which.c_str())};
}

}  // namespace

int main(int argc, char **argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    auto wanted = [&](int k) { return selected.empty() || selected.count(k) > 0; };

    json fig3c;
    auto shared_fig3c = [&]() -> const json & {
        if (fig3c.is_null()) fig3c = run_experiment("fig3c", config_of("")).json;
        return fig3c;
    };
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"layout suite", criterion_layout},
        {"MPS exactness", criterion_mps_exactness},
        {"error density scaling", criterion_kappa_scaling},
        {"CNOT depth scaling", criterion_cnot_depth},
        {"noiseless energy curves", criterion_energy_curves},
        {"noisy energy linearity", [&] { return criterion_noise_fit(shared_fig3c()); }},
        {"brickwall vs PS sign structure", [&] { return criterion_phase_signs(shared_fig3c()); }},
        {"gradient routes", criterion_gradients},
        {"gradient variance trends", criterion_variance_trends},
        {"error propagation", criterion_error_propagation},
        {"oracles", criterion_oracles},
        {"determinism", criterion_determinism}};

    int failed = 0;
    for (size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!wanted(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("[%s] %2d %s: %s [%.0fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                    o.detail.c_str(), secs);
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
