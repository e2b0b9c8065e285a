#pragma once

#include <vector>

#include "meo/outer_descent.hpp"

namespace meo {

struct BinaryAssignment {
    std::vector<bool> offload_mask; // true = the entire request is offloaded
};

struct BinaryResult {
    BinaryAssignment assignment;
    OuterSolution solution;
    bool feasible = false;       // some mask met the latency budget
    double best_violation = 0.0; // relative latency violation of the returned mask
};

// Exhaustive binary offloading: enumerate the 2^K all-or-nothing masks,
// solve the remaining time/frequency problem for each, discard latency-
// infeasible masks, return the feasible minimum-energy one (ties broken
// toward fewer offloaded users).  If nothing is feasible the least-violating
// mask is returned flagged infeasible.  Enumeration is capped at K <= 16.
BinaryResult solve_binary(const NetworkScenario& scn, const ChannelRealization& ch,
                          const OuterConfig& cfg = {});

// Partial offloading without frequency scaling: users pinned at f_user_max,
// the MEC share pinned at f_mec_max / K; the nested solver runs with the
// frequency stationarity rows dropped from the inner dual.
OuterSolution solve_fixed_frequency(const NetworkScenario& scn, const ChannelRealization& ch,
                                    const OuterConfig& cfg = {});

} // namespace meo
