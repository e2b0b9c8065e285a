#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meo/baselines.hpp"
#include "meo/outer_descent.hpp"
#include "meo/scenario.hpp"

namespace meo {

enum class Scheme { partial, binary, fixed_freq };

Scheme scheme_from_string(const std::string& s);
const char* to_string(Scheme s);

struct SweepSpec {
    enum class Variable { data_bits, latency, scheme, csi_mode };
    Variable variable = Variable::data_bits;
    std::vector<double> grid;          // numeric grids (bits / seconds)
    std::vector<std::string> labels;   // scheme / csi_mode grids
    int draws = 100;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::partial;
    CsiMode csi = CsiMode::perfect;
    OuterConfig outer;
};

SweepSpec::Variable sweep_variable_from_string(const std::string& s);

// One Monte-Carlo draw's outcome for a grid point.
struct DrawResult {
    OuterSolution sol;
    bool feasible = false;  // latency met (binary: some feasible mask existed)
    bool violation = false; // power cap / downlink budget flags raised
    double offloaded_fraction = 0.0;
    double local_fraction = 0.0;
};

struct SweepRow {
    double value = 0.0;       // numeric grid value
    std::string label;        // grid label for scheme/csi sweeps
    int draws = 0;
    double feasible_frac = 0.0;
    double violation_frac = 0.0;
    double offloaded_frac = 0.0; // mean of sum(s)/sum(u)
    double local_frac = 0.0;
    double E_total = 0.0, E_u = 0.0, E_m = 0.0;
    double E_off = 0.0, E_lc = 0.0, E_oc = 0.0, E_dl = 0.0;
    double T_total = 0.0, T1 = 0.0, T2 = 0.0, T3 = 0.0;
    double pct_p1 = 0.0, pct_p2 = 0.0, pct_p3 = 0.0; // phase shares, sum to 100
    double outer_iters = 0.0;
    double inner_iters = 0.0;
    std::string status; // most frequent termination label
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
    std::vector<std::vector<DrawResult>> per_draw; // [grid point][draw]
};

// Runs the sweep over a deterministic per-draw seed stream derived from
// (spec.seed, draw index); grid points and draws execute on a worker pool
// (MEO_WORKERS env var, default hardware concurrency).  Solver failures
// propagate into the row status, never abort the sweep.
SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base);

// CSV schema v1; one row per grid point, columns fixed and documented in
// the README.  Byte-deterministic for a fixed spec and seed.
std::string sweep_to_csv(const SweepResult& result);

struct ConvergenceReport {
    struct MethodRun {
        DescentMethod method;
        OuterSolution sol;
    };
    std::vector<MethodRun> runs;
    bool newton_fewer_outer = false;
    double inner_cost_share = 0.0; // inner iterations / (inner + outer) weighted cost
};

ConvergenceReport run_convergence_report(const NetworkScenario& scn, const ChannelRealization& ch,
                                         const std::vector<DescentMethod>& methods,
                                         const OuterConfig& base);

std::string convergence_to_csv(const ConvergenceReport& report);

} // namespace meo
