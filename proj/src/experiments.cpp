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

#include "psc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "psc/compile.hpp"
#include "psc/error.hpp"
#include "psc/errorprop.hpp"
#include "psc/gradvar.hpp"
#include "psc/layout.hpp"
#include "psc/mps.hpp"
#include "psc/parallel.hpp"
#include "psc/vqe.hpp"

namespace psc {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string num(int v) { return std::to_string(v); }
std::string num(size_t v) { return std::to_string(v); }

class CsvWriter {
public:
    explicit CsvWriter(std::string preamble) : text_(std::move(preamble)) {}
    void row(const std::vector<std::string> &cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }
    const std::string &text() const { return text_; }

private:
    std::string text_;
};

std::vector<int> int_list(const Config &c, const std::string &key, std::vector<int> fallback) {
    return c.has(key) ? c.get_int_list(key) : fallback;
}

std::vector<double> double_list(const Config &c, const std::string &key, std::vector<double> fallback) {
    return c.has(key) ? c.get_double_list(key) : fallback;
}

std::vector<int> range_list(int lo, int hi) {
    std::vector<int> out;
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
}

json base_json(const std::string &name, const Config &config) {
    return {{"experiment", name},
            {"version", kVersion},
            {"seed", config.get_seed()},
            {"config", config.to_json()}};
}

VqeOptions vqe_options(const Config &c) {
    VqeOptions o;
    o.restarts = c.get_int("restarts", o.restarts);
    o.max_sweeps = c.get_int("max_sweeps", o.max_sweeps);
    o.polish_iterations = c.get_int("polish_iterations", o.polish_iterations);
    o.polish_tol = c.get_double("polish_tol", o.polish_tol);
    o.screen_iterations = c.get_int("screen_iterations", o.screen_iterations);
    o.seed = c.get_seed();
    return o;
}

json scan_row_json(const ScanRow &r) {
    return {{"m", r.params.num_layers}, {"l", r.params.chunk_length}, {"q", r.params.overlap},
            {"kind", to_string(r.kind)}, {"depth", r.depth},          {"gates", r.gates},
            {"nu_xy", r.nu_xy},          {"p1", r.p1},                {"p2", r.p2},
            {"nu_noisy", r.nu_noisy}};
}

ExperimentOutput fig2a(const Config &c, int workers) {
    const std::vector<double> xi_list = double_list(c, "xi", {1.0, 1.44, 2.5, 3.8});
    const int q_max = c.get_int("q_max", 6);
    const std::vector<int> chunks = int_list(c, "route_b_chunks", {2, 3, 4, 5, 6, 7, 8});
    const int margin = c.get_int("route_b_margin", 4);
    CompileOptions opt;
    opt.restarts = c.get_int("restarts", 4);
    opt.wps.max_sweeps = c.get_int("max_sweeps", 50000);
    opt.wps.tol = c.get_double("wps_tol", 1e-13);
    const uint64_t seed = c.get_seed();
    if (q_max < 1 || chunks.size() < 2) throw ParameterError("fig2a: q_max >= 1 and two route_b_chunks required");

    struct Point {
        double xi, g, kappa, kappa_b, r2_b, cost;
        int q, length, sweeps;
        bool converged;
    };
    const size_t nq = static_cast<size_t>(q_max);
    auto points = parallel_map<Point>(
        xi_list.size() * nq,
        [&](size_t k) {
            const double xi = xi_list[k / nq];
            const int q = static_cast<int>(k % nq) + 1;
            const double g = family_coupling_for_length(xi);
            const BulkTensor b = canonicalize_right(family_tensor(g));
            CompileOptions o = opt;
            o.wps.seed = mix_seed(seed, k);
            const WpsResult w = best_window(b, q, o);
            const Mat4 e_aw = overlap_matrix(build_bulk_wseq(b, q), wps_isometry(w.gates, q));
            const int length = q + 1 + static_cast<int>(std::ceil(margin * xi));
            std::vector<double> x, y;
            for (int n : chunks) {
                x.push_back(n - 1);
                y.push_back(-std::log(ps_fidelity_bulk_ti(b, e_aw, n * length, length, q)));
            }
            const LinearFit f = fit_line(x, y);
            return Point{xi, g, error_density(b, e_aw), f.slope, f.r_squared, w.cost, q, length, w.sweeps, w.converged};
        },
        workers);

    CsvWriter csv(provenance_header("fig2a", c));
    csv.row({"xi", "g", "q", "q_over_xi", "kappa", "kappa_route_b", "route_b_r2", "route_b_length", "window_cost",
             "sweeps", "converged"});
    json out = base_json("fig2a", c);
    json rows = json::array(), fits = json::array();
    std::vector<double> px, py;
    for (size_t i = 0; i < xi_list.size(); ++i) {
        std::vector<std::pair<int, double>> qk;
        for (size_t j = 0; j < nq; ++j) {
            const Point &p = points[i * nq + j];
            csv.row({num(p.xi), num(p.g), num(p.q), num(p.q / p.xi), num(p.kappa), num(p.kappa_b), num(p.r2_b),
                     num(p.length), num(p.cost), num(p.sweeps), p.converged ? "1" : "0"});
            rows.push_back({{"xi", p.xi}, {"g", p.g}, {"q", p.q}, {"kappa", p.kappa}, {"kappa_route_b", p.kappa_b},
                            {"route_b_r2", p.r2_b}, {"route_b_length", p.length}, {"window_cost", p.cost},
                            {"sweeps", p.sweeps}, {"converged", p.converged}});
            qk.emplace_back(p.q, p.kappa);
            if (p.kappa > 1e-12) {
                px.push_back(p.q / p.xi);
                py.push_back(std::log(p.kappa));
            }
        }
        const KappaFit f = fit_kappa_scaling(qk, xi_list[i]);
        fits.push_back({{"xi", xi_list[i]}, {"gamma", f.gamma}, {"kappa0", f.kappa0}, {"r2", f.r_squared},
                        {"points", f.points_used}});
    }
    const LinearFit pooled = fit_line(px, py);
    out["rows"] = rows;
    out["gamma_fits"] = fits;
    out["pooled_fit"] = {{"gamma", -pooled.slope}, {"kappa0", std::exp(pooled.intercept)}, {"r2", pooled.r_squared}};
    return {"fig2a", csv.text(), out};
}

ExperimentOutput fig2b(const Config &c, int workers) {
    const double g = c.has("g") ? c.get_double("g") : family_coupling_for_length(c.get_double("xi", 3.8));
    const double eps = c.get_double("eps", 0.05);
    const std::vector<int> n_list = int_list(c, "n", {30, 60, 120, 240});
    const int bond_dim = c.get_int("bond_dim", 2);
    CompileOptions opt;
    opt.restarts = c.get_int("restarts", 4);
    opt.wps.max_sweeps = c.get_int("max_sweeps", 3000);
    const uint64_t seed = c.get_seed();
    int k = 0;
    while ((1 << k) < bond_dim) ++k;

    const BulkTensor tensor = family_tensor(g);
    auto reports = parallel_map<CompileReport>(
        n_list.size(),
        [&](size_t i) {
            CompileOptions o = opt;
            o.wps.seed = seed;
            return compile_end_to_end(tensor, n_list[i], eps, o).report;
        },
        workers);

    CsvWriter csv(provenance_header("fig2b", c));
    csv.row({"n", "q", "l", "n_chunks", "depth", "cnot_depth", "kappa", "fidelity", "predicted_fidelity", "q_b",
             "seq_rg", "tree_rg"});
    json out = base_json("fig2b", c);
    out["g"] = g;
    out["xi"] = correlation_length_family(g);
    json rows = json::array();
    std::vector<double> x, y;
    bool below = true;
    for (size_t i = 0; i < n_list.size(); ++i) {
        const CompileReport &r = reports[i];
        const int q_b = std::max(r.q + 1, 2 * k + 1);
        const RgDepthBounds rg = rg_cnot_depth_bounds(bond_dim, q_b);
        below = below && r.cnot_depth < rg.seq_rg;
        csv.row({num(n_list[i]), num(r.q), num(r.l), num(r.n_chunks), num(r.depth), num(r.cnot_depth), num(r.kappa),
                 num(r.fidelity), num(r.predicted_fidelity), num(q_b), num(static_cast<double>(rg.seq_rg)),
                 num(static_cast<double>(rg.tree_rg))});
        json row = report_to_json(r);
        row.erase("cost_trace");
        row["n"] = n_list[i];
        row["q_b"] = q_b;
        row["seq_rg"] = rg.seq_rg;
        row["tree_rg"] = rg.tree_rg;
        rows.push_back(row);
        x.push_back(std::log(static_cast<double>(n_list[i])));
        y.push_back(r.cnot_depth);
    }
    out["rows"] = rows;
    if (x.size() >= 2) {
        const LinearFit f = fit_line(x, y);
        out["log_fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r_squared}};
    }
    out["below_seq_rg"] = below;
    return {"fig2b", csv.text(), out};
}

ExperimentOutput fig3a(const Config &c, int workers) {
    const int n = c.get_int("n", 16);
    const int q = c.get_int("q", 1);
    const std::vector<int> m_list = int_list(c, "m", {1, 2});
    const std::vector<int> l_list = int_list(c, "l", range_list(2, n - 1));
    const auto rows = layout_scan(n, m_list, l_list, q, {NoiseModel{}}, vqe_options(c), workers);

    CsvWriter csv(provenance_header("fig3a", c));
    csv.row({"n", "m", "l", "q", "kind", "depth", "gates", "nu_xy"});
    json out = base_json("fig3a", c);
    json jrows = json::array();
    for (const auto &r : rows) {
        csv.row({num(n), num(r.params.num_layers), num(r.params.chunk_length), num(r.params.overlap),
                 to_string(r.kind), num(r.depth), num(r.gates), num(r.nu_xy)});
        jrows.push_back(scan_row_json(r));
    }
    out["rows"] = jrows;
    return {"fig3a", csv.text(), out};
}

ExperimentOutput fig3c(const Config &c, int workers) {
    const int n = c.get_int("n", 8);
    const int q = c.get_int("q", 1);
    const std::vector<int> m_list = int_list(c, "m", {1, 2, 3, 4});
    const std::vector<int> l_list = int_list(c, "l", range_list(2, n - 1));
    const std::vector<double> p1_list = double_list(c, "p1", {0.0, 0.0005, 0.001, 0.002, 0.005, 0.01, 0.02});
    const std::vector<double> p2_list = double_list(c, "p2", {0.0, 0.005, 0.01, 0.02});
    const std::vector<double> fit_grid = double_list(c, "fit_grid", {0.0, 0.005, 0.01, 0.02});
    std::vector<NoiseModel> grid;
    for (double p1 : p1_list)
        for (double p2 : p2_list) grid.push_back({p1, p2});
    const auto rows = layout_scan(n, m_list, l_list, q, grid, vqe_options(c), workers);
    const auto cells = phase_table(rows);

    CsvWriter csv(provenance_header("fig3c", c));
    csv.row({"p1", "p2", "nu_bw", "nu_ps", "delta", "best_m", "best_l", "best_q"});
    json out = base_json("fig3c", c);
    json jcells = json::array();
    for (const auto &cell : cells) {
        csv.row({num(cell.p1), num(cell.p2), num(cell.nu_bw), num(cell.nu_ps), num(cell.nu_bw - cell.nu_ps),
                 num(cell.best.num_layers), num(cell.best.chunk_length), num(cell.best.overlap)});
        jcells.push_back({{"p1", cell.p1}, {"p2", cell.p2}, {"nu_bw", cell.nu_bw}, {"nu_ps", cell.nu_ps},
                          {"delta", cell.nu_bw - cell.nu_ps}, {"best_m", cell.best.num_layers},
                          {"best_l", cell.best.chunk_length}, {"best_q", cell.best.overlap}});
    }
    json jboundary = json::array();
    for (const auto &b : phase_boundary(cells)) jboundary.push_back({{"p1", b.p1}, {"p2", b.p2}});

    auto on_grid = [&](double p) {
        for (double v : fit_grid)
            if (std::abs(v - p) < 1e-15) return true;
        return false;
    };
    json jrows = json::array();
    std::vector<double> x, y;
    std::map<std::pair<int, int>, int> fit_layouts;
    for (const auto &r : rows) {
        jrows.push_back(scan_row_json(r));
        if (on_grid(r.p1) && on_grid(r.p2)) {
            x.push_back(r.p1 * r.depth + 2.0 * r.p2 * r.params.num_layers);
            y.push_back(r.nu_noisy - r.nu_xy);
            fit_layouts[{r.params.num_layers, r.params.chunk_length}] = 1;
        }
    }
    out["cells"] = jcells;
    out["boundary"] = jboundary;
    out["rows"] = jrows;
    if (x.size() >= 2) {
        const LinearFit f = fit_line_through_origin(x, y);
        out["noise_fit"] = {{"c_e", f.slope}, {"r2", f.r_squared}, {"points", x.size()},
                            {"layouts", fit_layouts.size()}};
    }
    return {"fig3c", csv.text(), out};
}

ExperimentOutput fig4a(const Config &c, int workers) {
    const std::vector<int> n_list = int_list(c, "n", {8, 10});
    const NoiseModel noise{c.get_double("p1", 0.001), c.get_double("p2", 0.01)};
    VarianceOptions vo;
    vo.num_samples = c.get_int("samples", 32);
    vo.num_batches = c.get_int("batches", 4);
    vo.seed = c.get_seed();
    vo.workers = workers;
    const int trend_n = c.get_int("trend_n", 8);
    const int trend_q = c.get_int("trend_q", 1);
    const std::vector<int> trend_m = int_list(c, "trend_m", {1, 1, 2, 2, 3, 4, 3});
    const std::vector<int> trend_l = int_list(c, "trend_l", {7, 4, 4, 2, 2, 2, 6});
    const std::vector<double> trend_p1 = double_list(c, "trend_p1", {0.0, 0.01, 0.03});
    const std::vector<double> trend_p2 = double_list(c, "trend_p2", {0.0});
    if (trend_m.size() != trend_l.size()) throw ParameterError("fig4a: trend_m and trend_l differ in length");

    const auto scaling = variance_scaling_experiment(n_list, noise, vo);
    std::vector<VarianceRecord> trend;
    uint64_t stream = 1;
    for (double p1 : trend_p1)
        for (double p2 : trend_p2)
            for (size_t i = 0; i < trend_m.size(); ++i) {
                VarianceOptions o = vo;
                o.seed = mix_seed(vo.seed, stream++);
                trend.push_back(estimate_gradient_variance(
                    build_ps_layout({trend_n, trend_m[i], trend_l[i], trend_q}), {p1, p2}, o));
            }

    CsvWriter csv(provenance_header("fig4a", c));
    csv.row({"family", "n", "m", "l", "q", "kind", "depth", "p1", "p2", "samples", "num_params", "variance",
             "stderr"});
    json out = base_json("fig4a", c);
    json rows = json::array();
    auto emit = [&](const std::string &family, const VarianceRecord &r) {
        csv.row({family, num(r.params.num_qubits), num(r.params.num_layers), num(r.params.chunk_length),
                 num(r.params.overlap), r.kind, num(r.depth), num(r.p1), num(r.p2), num(r.samples),
                 num(r.num_params), num(r.variance), num(r.stderr_)});
        json j = variance_record_to_json(r);
        j["family"] = family;
        rows.push_back(j);
    };
    for (const auto &s : scaling) emit(s.family, s.record);
    for (const auto &r : trend) emit("trend", r);
    out["rows"] = rows;
    if (trend.size() >= 3) {
        const VarianceExponents f = fit_variance_exponents(trend);
        out["trend_fit"] = {{"alpha", f.alpha}, {"c_v", f.c_v}, {"log_prefactor", f.log_prefactor}, {"r2", f.r2}};
    }
    return {"fig4a", csv.text(), out};
}

ExperimentOutput fig4b(const Config &c, int workers) {
    const int n = c.get_int("n", 1000);
    const double p1 = c.get_double("p1", 5e-4);
    const int q = c.get_int("q", 1);
    const std::vector<int> bw_m = int_list(c, "bw_m", {2, 3, 4, 6, 8});
    const std::vector<int> ps_m = int_list(c, "ps_m", {1, 2, 3});
    const std::vector<int> ps_l = int_list(c, "ps_l", {8, 16, 32, 64});
    EchoOptions eo;
    eo.samples = c.get_int("samples", 2000);
    eo.workers = workers;
    const uint64_t seed = c.get_seed();

    struct Family {
        std::string name;
        std::vector<CircuitLayout> layouts;
    };
    std::vector<Family> families;
    families.push_back({"brickwall", {}});
    for (int m : bw_m) families.back().layouts.push_back(build_brickwall_layout(n, m));
    for (int m : ps_m) {
        families.push_back({"ps_m" + std::to_string(m), {}});
        for (int l : ps_l) families.back().layouts.push_back(build_ps_layout({n, m, l, q}));
    }

    CsvWriter csv(provenance_header("fig4b", c));
    csv.row({"layout_id", "family", "n", "m", "l", "q", "depth", "p1", "samples", "eta_over_n", "stderr"});
    json out = base_json("fig4b", c);
    json rows = json::array(), fits = json::array();
    std::vector<PropagationRecord> ps_records;
    uint64_t stream = 0;
    for (const auto &fam : families) {
        std::vector<PropagationRecord> recs;
        for (const auto &layout : fam.layouts) {
            EchoOptions o = eo;
            o.seed = mix_seed(seed, stream++);
            const PropagationRecord r = run_echo_mc(layout, p1, o);
            const LayoutParams &p = r.params;
            const std::string id = fam.name + "_l" + std::to_string(p.chunk_length) + "_m" + std::to_string(p.num_layers);
            csv.row({id, fam.name, num(n), num(p.num_layers), num(p.chunk_length), num(p.overlap), num(r.depth),
                     num(r.p1), num(r.samples), num(r.eta_over_n), num(r.stderr_)});
            json j = propagation_record_to_json(r);
            j["layout_id"] = id;
            j["family"] = fam.name;
            rows.push_back(j);
            recs.push_back(r);
            if (fam.name != "brickwall") ps_records.push_back(r);
        }
        if (recs.size() >= 2) {
            const PowerLawFit f = fit_power_law(recs);
            fits.push_back({{"family", fam.name}, {"exponent", f.exponent}, {"exponent_stderr", f.exponent_stderr},
                            {"prefactor", f.prefactor}, {"r2", f.r2}});
        }
    }
    out["rows"] = rows;
    out["power_law_fits"] = fits;
    if (ps_records.size() >= 4) {
        const EtaCoefficients e = fit_eta_coefficients(ps_records);
        out["eta_coefficients"] = {{"c1", e.c1}, {"c2", e.c2}, {"r2", e.r2}, {"regime_warning", e.regime_warning}};
    }
    return {"fig4b", csv.text(), out};
}

using Driver = std::function<ExperimentOutput(const Config &, int)>;

const std::map<std::string, Driver> &drivers() {
    static const std::map<std::string, Driver> table = {{"fig2a", fig2a}, {"fig2b", fig2b}, {"fig3a", fig3a},
                                                        {"fig3c", fig3c}, {"fig4a", fig4a}, {"fig4b", fig4b}};
    return table;
}

}  // namespace

const std::vector<std::string> &experiment_names() {
    static const std::vector<std::string> names = {"fig2a", "fig2b", "fig3a", "fig3c", "fig4a", "fig4b"};
    return names;
}

std::string provenance_header(const std::string &name, const Config &config) {
    return "# experiment = " + name + "\n# version = " + kVersion + "\n" + config.provenance();
}

ExperimentOutput run_experiment(const std::string &name, const Config &config, int workers) {
    const auto it = drivers().find(name);
    if (it == drivers().end()) throw ParameterError("unknown experiment '" + name + "'");
    config.get_seed();
    return it->second(config, workers);
}

}  // namespace psc
