#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meo/harness.hpp"
#include "meo/units.hpp"

namespace {

struct CommonOpts {
    std::string scenario_path;
    int users_per_cell = 4;
    std::uint64_t layout_seed = 1;
    double request_kbit = 20.0;
    double td_ms = 20.0;
    std::string csi = "perfect";
    std::string method = "newton";
    std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--scenario", o.scenario_path, "scenario config (json)");
    cmd->add_option("--users-per-cell", o.users_per_cell, "users per cell for the builtin layout");
    cmd->add_option("--layout-seed", o.layout_seed, "geometry seed for the builtin layout");
    cmd->add_option("--request-kbit", o.request_kbit, "per-user data request in kbit");
    cmd->add_option("--td-ms", o.td_ms, "round-trip latency budget in ms");
    cmd->add_option("--csi", o.csi, "perfect | contaminated");
    cmd->add_option("--method", o.method, "newton | gradient");
    cmd->add_option("--seed", o.seed, "channel draw seed");
}

meo::ScenarioConfig make_config(const CommonOpts& o) {
    meo::ScenarioConfig cfg;
    if (!o.scenario_path.empty()) {
        cfg = meo::load_scenario_config(o.scenario_path);
    } else {
        cfg = meo::reference_config(o.users_per_cell, o.layout_seed);
        cfg.request_bits = o.request_kbit * 1e3;
        cfg.compute.latency_s = o.td_ms * 1e-3;
    }
    return cfg;
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    f << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"massive-MIMO edge offloading energy optimizer"};
    app.require_subcommand(1);

    CommonOpts solve_opts;
    std::string solve_scheme = "partial";
    std::string solve_trace_path;
    auto* cmd_solve = app.add_subcommand("solve-one", "solve a single instance");
    add_common(cmd_solve, solve_opts);
    cmd_solve->add_option("--scheme", solve_scheme, "partial | binary | fixed");
    cmd_solve->add_option("--trace", solve_trace_path, "write the outer trace csv here");

    CommonOpts sweep_opts;
    std::string sweep_variable = "u";
    std::vector<double> sweep_grid;
    std::vector<std::string> sweep_labels;
    std::string sweep_scheme = "partial";
    std::string sweep_out;
    int sweep_draws = 100;
    bool sweep_assert = false;
    auto* cmd_sweep = app.add_subcommand("sweep", "grid sweep with Monte-Carlo channel draws");
    add_common(cmd_sweep, sweep_opts);
    cmd_sweep->add_option("--variable", sweep_variable, "u | td | scheme | csi");
    cmd_sweep->add_option("--grid", sweep_grid, "numeric grid (kbit for u, ms for td)");
    cmd_sweep->add_option("--labels", sweep_labels, "labels for scheme/csi sweeps");
    cmd_sweep->add_option("--scheme", sweep_scheme, "partial | binary | fixed");
    cmd_sweep->add_option("--draws", sweep_draws, "channel draws per grid point");
    cmd_sweep->add_option("--out", sweep_out, "output csv path (default stdout)");
    cmd_sweep->add_flag("--assert", sweep_assert, "check the qualitative trend bands; nonzero exit on failure");

    CommonOpts conv_opts;
    std::string conv_out;
    auto* cmd_conv = app.add_subcommand("converge", "gradient vs newton convergence report");
    add_common(cmd_conv, conv_opts);
    cmd_conv->add_option("--out", conv_out, "output csv path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_solve) {
            auto cfg = make_config(solve_opts);
            auto scn = meo::build_scenario(cfg);
            auto ch = meo::draw_channel(scn, solve_opts.seed, meo::csi_mode_from_string(solve_opts.csi));
            meo::OuterConfig ocfg;
            ocfg.method = meo::method_from_string(solve_opts.method);

            meo::OuterSolution sol;
            std::string extra;
            switch (meo::scheme_from_string(solve_scheme)) {
                case meo::Scheme::partial: sol = meo::solve(scn, ch, ocfg); break;
                case meo::Scheme::fixed_freq: sol = meo::solve_fixed_frequency(scn, ch, ocfg); break;
                case meo::Scheme::binary: {
                    auto br = meo::solve_binary(scn, ch, ocfg);
                    sol = br.solution;
                    extra = br.feasible ? " (mask feasible)" : " (no feasible mask)";
                    break;
                }
            }
            double su = 0.0, uu = 0.0;
            for (size_t i = 0; i < sol.alloc.s.size(); ++i) {
                su += sol.alloc.s[i];
                uu += scn.users[i].request_bits;
            }
            std::printf("termination:      %s%s\n", meo::to_string(sol.termination), extra.c_str());
            std::printf("objective:        %.6e J (weighted)\n", sol.energy.E_total_weighted);
            std::printf("E_u / E_m:        %.6e / %.6e J\n", sol.energy.E_u, sol.energy.E_m);
            std::printf("offloaded:        %.2f %%\n", 100.0 * su / uu);
            std::printf("T_total:          %.4f ms (budget %.4f ms)\n", sol.timing.T_total * 1e3,
                        scn.compute.latency_s * 1e3);
            std::printf("phases T1/T2/T3:  %.4f / %.4f / %.4f ms\n", sol.alloc.T1 * 1e3,
                        sol.alloc.T2 * 1e3, sol.alloc.T3 * 1e3);
            std::printf("outer iters:      %d\n", sol.outer_iterations);
            std::printf("inner iters:      %ld\n", sol.total_inner_iterations);
            std::printf("duality gap:      %.3e (relative)\n", sol.rel_gap);
            std::printf("flags:            %s\n", sol.flags.any() ? "POWER/BUDGET VIOLATION" : "none");
            if (!solve_trace_path.empty()) {
                meo::ConvergenceReport rep;
                rep.runs.push_back({ocfg.method, sol});
                write_out(solve_trace_path, meo::convergence_to_csv(rep));
            }
            return 0;
        }

        if (*cmd_sweep) {
            auto cfg = make_config(sweep_opts);
            meo::SweepSpec spec;
            spec.variable = meo::sweep_variable_from_string(sweep_variable);
            spec.draws = sweep_draws;
            spec.seed = sweep_opts.seed;
            spec.scheme = meo::scheme_from_string(sweep_scheme);
            spec.csi = meo::csi_mode_from_string(sweep_opts.csi);
            spec.outer.method = meo::method_from_string(sweep_opts.method);
            spec.labels = sweep_labels;
            for (double g : sweep_grid)
                spec.grid.push_back(spec.variable == meo::SweepSpec::Variable::latency ? g * 1e-3
                                                                                       : g * 1e3);
            if (spec.grid.empty() && spec.labels.empty()) {
                if (spec.variable == meo::SweepSpec::Variable::data_bits)
                    spec.grid = {10e3, 20e3, 30e3, 40e3, 50e3, 60e3, 70e3};
                else if (spec.variable == meo::SweepSpec::Variable::latency)
                    spec.grid = {8e-3, 10e-3, 12e-3, 14e-3, 16e-3, 18e-3, 20e-3, 22e-3, 24e-3};
                else if (spec.variable == meo::SweepSpec::Variable::csi_mode)
                    spec.labels = {"perfect", "contaminated"};
                else
                    spec.labels = {"partial", "binary", "fixed"};
            }
            auto result = meo::run_sweep(spec, cfg);
            write_out(sweep_out, meo::sweep_to_csv(result));

            if (sweep_assert) {
                bool ok = true;
                auto fail = [&](const std::string& msg) {
                    std::fprintf(stderr, "ASSERT FAIL: %s\n", msg.c_str());
                    ok = false;
                };
                if (spec.variable == meo::SweepSpec::Variable::data_bits) {
                    double prev = -1.0;
                    for (const auto& r : result.rows) {
                        if (r.value <= 30e3 * 0.75 && r.offloaded_frac > 1e-3)
                            fail("offloading below the zero-offload band at u=" + std::to_string(r.value));
                        if (r.value >= 40e3 * 1.25 && r.offloaded_frac < 1e-3)
                            fail("no offloading above the onset band at u=" + std::to_string(r.value));
                        if (r.offloaded_frac < prev - 1e-3) fail("offloaded fraction not monotone");
                        prev = std::max(prev, r.offloaded_frac);
                    }
                } else if (spec.variable == meo::SweepSpec::Variable::latency) {
                    for (const auto& r : result.rows)
                        if (r.value >= 12e-3 * 1.25 && r.local_frac < 0.999)
                            fail("offloading above the all-local latency band at Td=" +
                                 std::to_string(r.value));
                }
                if (!ok) return 1;
                std::fprintf(stderr, "trend assertions passed\n");
            }
            return 0;
        }

        if (*cmd_conv) {
            auto cfg = make_config(conv_opts);
            auto scn = meo::build_scenario(cfg);
            auto ch = meo::draw_channel(scn, conv_opts.seed, meo::csi_mode_from_string(conv_opts.csi));
            meo::OuterConfig ocfg;
            auto rep = meo::run_convergence_report(
                scn, ch, {meo::DescentMethod::gradient, meo::DescentMethod::newton}, ocfg);
            write_out(conv_out, meo::convergence_to_csv(rep));
            for (const auto& run : rep.runs)
                std::fprintf(stderr, "%-9s outer=%d inner=%ld termination=%s\n",
                             meo::to_string(run.method), run.sol.outer_iterations,
                             run.sol.total_inner_iterations, meo::to_string(run.sol.termination));
            std::fprintf(stderr, "newton fewer outer iterations: %s\n",
                         rep.newton_fewer_outer ? "yes" : "no");
            std::fprintf(stderr, "inner share of iteration cost: %.1f %%\n",
                         100.0 * rep.inner_cost_share);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
