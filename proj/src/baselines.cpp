#include "meo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meo {

BinaryResult solve_binary(const NetworkScenario& scn, const ChannelRealization& ch,
                          const OuterConfig& cfg) {
    const int K = scn.num_users();
    if (K > 16) throw std::invalid_argument("solve_binary: enumeration capped at 16 users");
    const double Td = scn.compute.latency_s;
    const double feas_tol = 1e-6;

    BinaryResult best;
    best.best_violation = std::numeric_limits<double>::infinity();
    double best_energy = std::numeric_limits<double>::infinity();
    int best_count = K + 1;
    bool have_any = false;
    long total_iters = 0;

    for (unsigned mask = 0; mask < (1u << K); ++mask) {
        std::vector<double> s(K, 0.0);
        int offloaded = 0;
        for (int i = 0; i < K; ++i)
            if (mask & (1u << i)) {
                s[i] = scn.users[i].request_bits;
                ++offloaded;
            }
        InnerSolution inner = solve_inner(s, scn, ch, cfg.inner, cfg.policy);
        total_iters += inner.iterations;
        double T = inner.eval.timing.T_total;
        double viol = std::max(0.0, (T - Td) / Td);
        bool feas = viol <= feas_tol;
        double E = inner.eval.energy.E_total_weighted;

        bool take = false;
        if (feas) {
            if (!best.feasible) take = true;
            else if (E < best_energy * (1.0 - 1e-12)) take = true;
            else if (std::abs(E - best_energy) <= best_energy * 1e-12 && offloaded < best_count)
                take = true;
        } else if (!best.feasible && !have_any) {
            take = true;
        } else if (!best.feasible && viol < best.best_violation) {
            take = true;
        }
        if (take) {
            best.feasible = best.feasible || feas;
            best.best_violation = viol;
            best_energy = E;
            best_count = offloaded;
            best.assignment.offload_mask.assign(K, false);
            for (int i = 0; i < K; ++i) best.assignment.offload_mask[i] = (mask >> i) & 1u;
            best.solution.alloc = inner.alloc;
            best.solution.energy = inner.eval.energy;
            best.solution.timing = inner.eval.timing;
            best.solution.flags = inner.eval.flags;
            best.solution.rel_gap = inner.rel_gap;
            best.solution.inner_status = inner.status;
            best.solution.outer_iterations = 1;
            best.solution.termination = offloaded == 0 ? OuterTermination::boundary_s_zero
                                                       : OuterTermination::gradient_tolerance;
        }
        have_any = true;
    }
    best.solution.total_inner_iterations = total_iters;
    return best;
}

OuterSolution solve_fixed_frequency(const NetworkScenario& scn, const ChannelRealization& ch,
                                    const OuterConfig& cfg) {
    OuterConfig pinned = cfg;
    pinned.policy.pinned = true;
    pinned.policy.f_user = scn.compute.f_user_max;
    pinned.policy.f_mec = scn.compute.f_mec_max / scn.users_per_cell();
    return solve(scn, ch, pinned);
}

} // namespace meo
