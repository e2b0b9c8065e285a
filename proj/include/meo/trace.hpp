#pragma once

#include <string>
#include <vector>

namespace meo {

struct InnerTraceRow {
    long iteration = 0;
    double dual_value = 0.0;
    double best_dual_value = 0.0;
    double volume_proxy = 1.0;
    double max_violation = 0.0;
};

struct OuterTraceRow {
    int iteration = 0;
    double objective = 0.0;
    double grad_norm = 0.0;   // scale-normalized
    double T_total = 0.0;
    long inner_iterations = 0;
    std::vector<double> s;
};

struct SolverTrace {
    std::vector<OuterTraceRow> outer;
    std::vector<InnerTraceRow> inner; // last inner solve, when collected
    std::string termination;
};

} // namespace meo
