#include "meo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

namespace meo {

Scheme scheme_from_string(const std::string& s) {
    if (s == "partial") return Scheme::partial;
    if (s == "binary") return Scheme::binary;
    if (s == "fixed" || s == "fixed-freq" || s == "fixed_freq") return Scheme::fixed_freq;
    throw std::invalid_argument("unknown scheme: " + s);
}

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::partial: return "partial";
        case Scheme::binary: return "binary";
        case Scheme::fixed_freq: return "fixed-freq";
    }
    return "?";
}

SweepSpec::Variable sweep_variable_from_string(const std::string& s) {
    if (s == "u" || s == "data") return SweepSpec::Variable::data_bits;
    if (s == "td" || s == "Td" || s == "latency") return SweepSpec::Variable::latency;
    if (s == "scheme") return SweepSpec::Variable::scheme;
    if (s == "csi" || s == "csi_mode") return SweepSpec::Variable::csi_mode;
    throw std::invalid_argument("unknown sweep variable: " + s);
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t draw) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (draw + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int worker_count() {
    if (const char* env = std::getenv("MEO_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 4;
}

DrawResult solve_draw(const NetworkScenario& scn, const ChannelRealization& ch, Scheme scheme,
                      const OuterConfig& outer) {
    DrawResult dr;
    const double Td = scn.compute.latency_s;
    switch (scheme) {
        case Scheme::partial: dr.sol = solve(scn, ch, outer); break;
        case Scheme::fixed_freq: dr.sol = solve_fixed_frequency(scn, ch, outer); break;
        case Scheme::binary: {
            BinaryResult br = solve_binary(scn, ch, outer);
            dr.sol = br.solution;
            dr.feasible = br.feasible;
            break;
        }
    }
    if (scheme != Scheme::binary)
        dr.feasible = dr.sol.timing.T_total <= Td * (1.0 + 1e-6);
    dr.violation = dr.sol.flags.any();
    double su = 0.0, uu = 0.0;
    for (size_t i = 0; i < dr.sol.alloc.s.size(); ++i) {
        su += dr.sol.alloc.s[i];
        uu += scn.users[i].request_bits;
    }
    dr.offloaded_fraction = uu > 0.0 ? su / uu : 0.0;
    dr.local_fraction = 1.0 - dr.offloaded_fraction;
    return dr;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base) {
    const bool labeled = spec.variable == SweepSpec::Variable::scheme ||
                         spec.variable == SweepSpec::Variable::csi_mode;
    const size_t points = labeled ? spec.labels.size() : spec.grid.size();
    if (points == 0) throw std::invalid_argument("run_sweep: empty grid");
    if (spec.draws < 1) throw std::invalid_argument("run_sweep: draws must be >= 1");

    SweepResult result;
    result.spec = spec;
    result.per_draw.assign(points, std::vector<DrawResult>(spec.draws));

    // scenario + solver setup per grid point; geometry stays fixed across
    // the sweep (same layout seed), only the swept quantity changes
    struct PointSetup {
        NetworkScenario scn;
        Scheme scheme;
        CsiMode csi;
    };
    std::vector<PointSetup> setups;
    setups.reserve(points);
    for (size_t p = 0; p < points; ++p) {
        ScenarioConfig cfg = base;
        Scheme scheme = spec.scheme;
        CsiMode csi = spec.csi;
        switch (spec.variable) {
            case SweepSpec::Variable::data_bits:
                cfg.request_bits = spec.grid[p];
                for (auto& u : cfg.users) u.request_bits = spec.grid[p];
                break;
            case SweepSpec::Variable::latency:
                cfg.compute.latency_s = spec.grid[p];
                break;
            case SweepSpec::Variable::scheme:
                scheme = scheme_from_string(spec.labels[p]);
                break;
            case SweepSpec::Variable::csi_mode:
                csi = csi_mode_from_string(spec.labels[p]);
                break;
        }
        setups.push_back({build_scenario(cfg), scheme, csi});
    }

    struct Task {
        size_t point;
        int draw;
    };
    std::vector<Task> tasks;
    tasks.reserve(points * spec.draws);
    for (size_t p = 0; p < points; ++p)
        for (int d = 0; d < spec.draws; ++d) tasks.push_back({p, d});

    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task& task = tasks[t];
            const PointSetup& ps = setups[task.point];
            ChannelRealization ch =
                draw_channel(ps.scn, mix_seed(spec.seed, task.draw), ps.csi);
            result.per_draw[task.point][task.draw] =
                solve_draw(ps.scn, ch, ps.scheme, spec.outer);
        }
    };
    int workers = std::min<int>(worker_count(), static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    for (size_t p = 0; p < points; ++p) {
        SweepRow row;
        row.value = labeled ? static_cast<double>(p) : spec.grid[p];
        row.label = labeled ? spec.labels[p]
                            : (spec.variable == SweepSpec::Variable::data_bits ? "u" : "Td");
        row.draws = spec.draws;
        std::map<std::string, int> statuses;
        for (const DrawResult& dr : result.per_draw[p]) {
            const auto& e = dr.sol.energy;
            const auto& t = dr.sol.timing;
            row.feasible_frac += dr.feasible ? 1.0 : 0.0;
            row.violation_frac += dr.violation ? 1.0 : 0.0;
            row.offloaded_frac += dr.offloaded_fraction;
            row.local_frac += dr.local_fraction;
            row.E_total += e.E_total_weighted;
            row.E_u += e.E_u;
            row.E_m += e.E_m;
            for (double x : e.e_off) row.E_off += x;
            for (double x : e.e_lc) row.E_lc += x;
            for (double x : e.e_oc) row.E_oc += x;
            for (double x : e.e_dl) row.E_dl += x;
            row.T_total += t.T_total;
            row.T1 += dr.sol.alloc.T1;
            row.T2 += dr.sol.alloc.T2;
            row.T3 += dr.sol.alloc.T3;
            row.outer_iters += dr.sol.outer_iterations;
            row.inner_iters += static_cast<double>(dr.sol.total_inner_iterations);
            statuses[to_string(dr.sol.termination)]++;
        }
        const double n = spec.draws;
        for (double* x : {&row.feasible_frac, &row.violation_frac, &row.offloaded_frac,
                          &row.local_frac, &row.E_total, &row.E_u, &row.E_m, &row.E_off,
                          &row.E_lc, &row.E_oc, &row.E_dl, &row.T_total, &row.T1, &row.T2,
                          &row.T3, &row.outer_iters, &row.inner_iters})
            *x /= n;
        double phase_sum = row.T1 + row.T2 + row.T3;
        if (phase_sum > 0.0) {
            row.pct_p1 = 100.0 * row.T1 / phase_sum;
            row.pct_p2 = 100.0 * row.T2 / phase_sum;
            row.pct_p3 = 100.0 * row.T3 / phase_sum;
        }
        int best = -1;
        for (const auto& [name, count] : statuses)
            if (count > best) { best = count; row.status = name; }
        result.rows.push_back(row);
    }
    return result;
}

std::string sweep_to_csv(const SweepResult& result) {
    std::string out = "# meo sweep csv v1\n";
    out +=
        "variable,value,label,draws,feasible_frac,violation_frac,offloaded_frac,local_frac,"
        "E_total_weighted,E_u,E_m,E_off,E_lc,E_oc,E_dl,T_total,T1,T2,T3,pct_p1,pct_p2,pct_p3,"
        "outer_iters,inner_iters,status\n";
    const char* var = "u";
    switch (result.spec.variable) {
        case SweepSpec::Variable::data_bits: var = "u"; break;
        case SweepSpec::Variable::latency: var = "Td"; break;
        case SweepSpec::Variable::scheme: var = "scheme"; break;
        case SweepSpec::Variable::csi_mode: var = "csi"; break;
    }
    char buf[1024];
    for (const SweepRow& r : result.rows) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%.10g,%s,%d,%.6f,%.6f,%.8f,%.8f,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e,"
                      "%.10e,%.10e,%.10e,%.10e,%.10e,%.4f,%.4f,%.4f,%.3f,%.1f,%s\n",
                      var, r.value, r.label.c_str(), r.draws, r.feasible_frac, r.violation_frac,
                      r.offloaded_frac, r.local_frac, r.E_total, r.E_u, r.E_m, r.E_off, r.E_lc,
                      r.E_oc, r.E_dl, r.T_total, r.T1, r.T2, r.T3, r.pct_p1, r.pct_p2, r.pct_p3,
                      r.outer_iters, r.inner_iters, r.status.c_str());
        out += buf;
    }
    return out;
}

ConvergenceReport run_convergence_report(const NetworkScenario& scn, const ChannelRealization& ch,
                                         const std::vector<DescentMethod>& methods,
                                         const OuterConfig& base) {
    ConvergenceReport rep;
    for (DescentMethod m : methods) {
        OuterConfig cfg = base;
        cfg.method = m;
        cfg.collect_trace = true;
        rep.runs.push_back({m, solve(scn, ch, cfg)});
    }
    int gd_outer = -1, newton_outer = -1;
    long inner_total = 0, outer_total = 0;
    for (const auto& run : rep.runs) {
        if (run.method == DescentMethod::gradient) gd_outer = run.sol.outer_iterations;
        if (run.method == DescentMethod::newton) newton_outer = run.sol.outer_iterations;
        inner_total += run.sol.total_inner_iterations;
        outer_total += run.sol.outer_iterations;
    }
    if (gd_outer >= 0 && newton_outer >= 0) rep.newton_fewer_outer = newton_outer < gd_outer;
    rep.inner_cost_share =
        inner_total > 0 ? static_cast<double>(inner_total) / (inner_total + outer_total) : 0.0;
    return rep;
}

std::string convergence_to_csv(const ConvergenceReport& report) {
    std::string out = "# meo convergence csv v1\n";
    out += "method,iteration,objective,grad_norm,T_total,inner_iterations\n";
    char buf[256];
    for (const auto& run : report.runs)
        for (const auto& row : run.sol.trace.outer) {
            std::snprintf(buf, sizeof(buf), "%s,%d,%.10e,%.6e,%.8e,%ld\n", to_string(run.method),
                          row.iteration, row.objective, row.grad_norm, row.T_total,
                          row.inner_iterations);
            out += buf;
        }
    return out;
}

} // namespace meo
