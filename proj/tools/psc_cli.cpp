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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psc/compile.hpp"
#include "psc/config.hpp"
#include "psc/error.hpp"
#include "psc/errorprop.hpp"
#include "psc/experiments.hpp"
#include "psc/gradvar.hpp"
#include "psc/layout.hpp"
#include "psc/parallel.hpp"
#include "psc/vqe.hpp"

namespace {

using namespace psc;

constexpr int kExitInvalid = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitNotConverged = 4;

struct LayoutFlags {
    int n = 0;
    int m = 1;
    int l = 2;
    int q = 1;
    bool brickwall = false;
    bool sequential = false;

    void add(CLI::App *cmd) {
        cmd->add_option("--n", n, "number of qubits")->required();
        cmd->add_option("--m", m, "layers per chunk");
        cmd->add_option("--l", l, "chunk length");
        cmd->add_option("--q", q, "junction overlap");
        auto *bw = cmd->add_flag("--brickwall", brickwall, "brickwall limit (l = 2, q = 1)");
        cmd->add_flag("--sequential", sequential, "sequential limit (l = N - 1, q = 1)")->excludes(bw);
    }

    CircuitLayout build() const {
        if (brickwall) return build_brickwall_layout(n, m);
        if (sequential) return build_sequential_layout(n, m);
        return build_ps_layout({n, m, l, q});
    }
};

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + path + "'");
    out << text;
}

int cmd_layout(const LayoutFlags &f, const std::string &out_path) {
    const CircuitLayout layout = f.build();
    std::printf("kind           %s\n", to_string(layout.kind()).c_str());
    std::printf("qubits         %d\n", layout.num_qubits());
    std::printf("depth          %d\n", layout.depth());
    std::printf("formula_depth  %d\n", layout.formula_depth());
    std::printf("gates          %zu\n", layout.gate_count());
    std::printf("chunks         %d\n", layout.num_chunks());
    std::printf("r_c            %d\n", max_junction_correlation_distance(layout));
    if (!out_path.empty()) write_file(out_path, layout_to_json(layout).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Parallel-sequential circuit toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: PSC_THREADS or hardware concurrency)");

    LayoutFlags layout_flags;
    std::string layout_out;
    auto *layout_cmd = app.add_subcommand("layout", "build a layout and print its summary");
    layout_flags.add(layout_cmd);
    layout_cmd->add_option("--out", layout_out, "write the serialized layout to this file");

    double g = -0.333, eps = 0.05;
    int compile_n = 30, compile_restarts = 4, compile_sweeps = 3000;
    uint64_t compile_seed = 1;
    std::string compile_out;
    auto *compile_cmd = app.add_subcommand("compile", "compile a bulk-TI family MPS into a PS circuit");
    compile_cmd->add_option("--g", g, "family coupling");
    compile_cmd->add_option("--n", compile_n, "number of qubits");
    compile_cmd->add_option("--eps", eps, "target infidelity");
    compile_cmd->add_option("--restarts", compile_restarts, "window optimizations per q");
    compile_cmd->add_option("--max-sweeps", compile_sweeps, "sweep budget per window optimization");
    compile_cmd->add_option("--seed", compile_seed, "master seed");
    compile_cmd->add_option("--out", compile_out, "write the circuit to this file");

    LayoutFlags vqe_flags;
    VqeOptions vqe_opt;
    bool strict = false;
    std::string vqe_out;
    auto *vqe_cmd = app.add_subcommand("vqe", "minimize the XY energy over a layout");
    vqe_flags.add(vqe_cmd);
    vqe_cmd->add_option("--restarts", vqe_opt.restarts, "Haar-initialized restarts");
    vqe_cmd->add_option("--max-sweeps", vqe_opt.max_sweeps, "single-gate sweeps per restart");
    vqe_cmd->add_option("--polish", vqe_opt.polish_iterations, "L-BFGS step budget");
    vqe_cmd->add_option("--seed", vqe_opt.seed, "master seed");
    vqe_cmd->add_flag("--strict", strict, "exit 4 if the optimizer did not converge");
    vqe_cmd->add_option("--out", vqe_out, "write the optimized circuit to this file");

    LayoutFlags grad_flags;
    NoiseModel grad_noise;
    VarianceOptions grad_opt;
    auto *grad_cmd = app.add_subcommand("gradvar", "gradient variance of the XY energy over random parameters");
    grad_flags.add(grad_cmd);
    grad_cmd->add_option("--p1", grad_noise.p1, "idling error");
    grad_cmd->add_option("--p2", grad_noise.p2, "gate error");
    grad_cmd->add_option("--samples", grad_opt.num_samples, "random parameter draws");
    grad_cmd->add_option("--batches", grad_opt.num_batches, "batches for the standard error");
    grad_cmd->add_option("--seed", grad_opt.seed, "master seed");

    LayoutFlags ep_flags;
    double ep_p1 = 5e-4;
    int ep_depth = 0;
    bool gateless = false;
    EchoOptions ep_opt;
    auto *ep_cmd = app.add_subcommand("errorprop", "echo Monte Carlo of depolarized-qubit counts");
    ep_flags.add(ep_cmd);
    ep_cmd->add_option("--p1", ep_p1, "idling error");
    ep_cmd->add_flag("--gateless", gateless, "idle-only schedule of depth --t");
    ep_cmd->add_option("--t", ep_depth, "forward depth for --gateless");
    ep_cmd->add_option("--samples", ep_opt.samples, "Monte Carlo samples");
    ep_cmd->add_option("--seed", ep_opt.seed, "master seed");

    std::string exp_name, exp_config, exp_dir = ".";
    std::vector<std::string> exp_set;
    auto *exp_cmd = app.add_subcommand("experiment", "run a figure driver and write CSV and JSON");
    exp_cmd->add_option("name", exp_name, "fig2a, fig2b, fig3a, fig3c, fig4a or fig4b")
        ->required()
        ->check(CLI::IsMember(experiment_names()));
    exp_cmd->add_option("--config", exp_config, "key = value config file")->required();
    exp_cmd->add_option("--set", exp_set, "override key=value (repeatable)");
    exp_cmd->add_option("--out-dir", exp_dir, "directory for <name>.csv and <name>.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (threads > 0) set_worker_count(threads);
        if (*layout_cmd) return cmd_layout(layout_flags, layout_out);
        if (*compile_cmd) {
            CompileOptions opt;
            opt.restarts = compile_restarts;
            opt.wps.max_sweeps = compile_sweeps;
            opt.wps.seed = compile_seed;
            const CompileResult res = compile_end_to_end(family_tensor(g), compile_n, eps, opt);
            if (!compile_out.empty()) write_file(compile_out, circuit_to_json(res.circuit).dump() + "\n");
            std::cout << report_to_json(res.report).dump(2) << "\n";
            return 0;
        }
        if (*vqe_cmd) {
            const VqeResult res = optimize_energy(vqe_flags.build(), vqe_opt);
            if (!vqe_out.empty()) write_file(vqe_out, circuit_to_json(res.circuit).dump() + "\n");
            std::cout << energy_report_to_json(res.report).dump(2) << "\n";
            if (strict && !res.report.converged) {
                std::cerr << "vqe: optimizer did not converge\n";
                return kExitNotConverged;
            }
            return 0;
        }
        if (*grad_cmd) {
            const VarianceRecord r = estimate_gradient_variance(grad_flags.build(), grad_noise, grad_opt);
            std::cout << variance_record_to_json(r).dump(2) << "\n";
            return 0;
        }
        if (*ep_cmd) {
            PropagationRecord r;
            nlohmann::json j;
            if (gateless) {
                r = run_echo_mc(gateless_schedule(ep_flags.n, ep_depth), ep_p1, ep_opt);
                j = propagation_record_to_json(r);
                j["closed_form"] = idle_eta_closed_form(ep_p1, ep_depth);
            } else {
                const CircuitLayout layout = ep_flags.build();
                r = run_echo_mc(layout, ep_p1, ep_opt);
                j = propagation_record_to_json(r);
                if (layout.kind() == LayoutKind::sequential) {
                    const double len = sequential_string_length(layout.params().num_layers);
                    j["string_length"] = len;
                    j["sparse_prediction"] = ep_p1 * r.depth * (1.0 + len);
                }
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*exp_cmd) {
            Config cfg = Config::load(exp_config);
            for (const auto &kv : exp_set) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + kv + "'");
                cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
            }
            const ExperimentOutput out = run_experiment(exp_name, cfg);
            const std::string base = exp_dir + "/" + out.name;
            write_file(base + ".csv", out.csv);
            write_file(base + ".json", out.json.dump(2) + "\n");
            std::cout << "wrote " << base << ".csv and " << base << ".json\n";
            return 0;
        }
    } catch (const ParameterError &e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const CapacityError &e) {
        std::cerr << "capacity exceeded: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
