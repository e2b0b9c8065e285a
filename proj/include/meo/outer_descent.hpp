#pragma once

#include <string>
#include <vector>

#include "meo/inner_pd.hpp"
#include "meo/phymodel.hpp"
#include "meo/trace.hpp"

namespace meo {

enum class DescentMethod { gradient, newton };

DescentMethod method_from_string(const std::string& s);
const char* to_string(DescentMethod m);

enum class OuterTermination {
    gradient_tolerance,
    latency_binding,
    boundary_s_zero,
    boundary_s_full,
    iteration_cap,
    case_ii_unsupported,
};

const char* to_string(OuterTermination t);

struct OuterConfig {
    DescentMethod method = DescentMethod::newton;
    double s_init_fraction = 0.6;
    double eps1 = 1e-5;           // scale-free suboptimality tolerance
    double backtrack_alpha = 0.3; // Armijo slope fraction
    double backtrack_beta = 0.7;  // step shrink factor
    int max_outer_iters = 80;
    double gd_step_fraction = 0.2; // initial gradient step moves this fraction of u
    bool warm_start_duals = false;
    InnerConfig inner;
    FrequencyPolicy policy;
    bool collect_trace = true;
};

struct OuterSolution {
    Allocation alloc;
    EnergyBreakdown energy;
    TimingReport timing;
    EvalFlags flags;
    SolverTrace trace;
    OuterTermination termination = OuterTermination::gradient_tolerance;
    int outer_iterations = 0;
    long total_inner_iterations = 0;
    double rel_gap = 0.0;          // inner duality gap at the final point
    InnerStatus inner_status = InnerStatus::converged;
};

// Descent direction: -grad for gradient descent, -grad/hess for Newton
// (the Hessian is diagonal across users).  hess entries must be positive.
std::vector<double> step_direction(const std::vector<double>& s, const std::vector<double>& grad,
                                   const std::vector<double>& hess, DescentMethod method);

// Per-user backtracking line search on the separable surrogate objective
// (inner variables held fixed).  Candidates are clipped into [0, u_i]
// before evaluation; returns step lengths (0 after 60 failed halvings).
std::vector<double> backtracking_search(const std::vector<double>& s,
                                        const std::vector<double>& ds,
                                        const std::vector<double>& grad,
                                        const Allocation& alloc, const NetworkScenario& scn,
                                        const ChannelRealization& ch, const OuterConfig& cfg);

// Latency-aware descent over the offloaded bits, calling the inner
// primal-dual solver each iteration.  Stops on the scale-free gradient
// test, on a boundary, or when the round-trip latency budget binds (the
// violating step is rejected and the step length bisected to the wall).
OuterSolution solve(const NetworkScenario& scn, const ChannelRealization& ch,
                    const OuterConfig& cfg = {});

} // namespace meo
