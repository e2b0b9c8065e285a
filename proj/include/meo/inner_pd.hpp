#pragma once

#include <optional>
#include <vector>

#include "meo/phymodel.hpp"
#include "meo/scenario.hpp"
#include "meo/trace.hpp"

namespace meo {

// Dual variables of the fixed-s convex subproblem, dimension 4K+2.
// Layout: [lambda1, lambda5, beta_0..beta_{K-1}, xi_0.., theta_0.., phi_0..].
// The multipliers attached to the energy bookkeeping identities are fixed
// by stationarity (lambda0 = -1, lambda2 = 1-w, lambda3 = w) and are
// substituted analytically, not stored.
struct DualPoint {
    std::vector<double> v;
    int K = 0;

    static int dimension(int K) { return 4 * K + 2; }
    static DualPoint zeros(int K) { return DualPoint{std::vector<double>(dimension(K), 0.0), K}; }

    double& lambda1() { return v[0]; }
    double& lambda5() { return v[1]; }
    double& beta(int i) { return v[2 + i]; }
    double& xi(int i) { return v[2 + K + i]; }
    double& theta(int i) { return v[2 + 2 * K + i]; }
    double& phi(int i) { return v[2 + 3 * K + i]; }
    double lambda1() const { return v[0]; }
    double lambda5() const { return v[1]; }
    double beta(int i) const { return v[2 + i]; }
    double xi(int i) const { return v[2 + K + i]; }
    double theta(int i) const { return v[2 + 2 * K + i]; }
    double phi(int i) const { return v[2 + 3 * K + i]; }

    static constexpr double lambda0 = -1.0;
    static double lambda2(double w) { return 1.0 - w; }
    static double lambda3(double w) { return w; }
};

// Localization ellipsoid { x : (x-c)^T P^{-1} (x-c) <= 1 } over the scaled
// dual variables.  The shape matrix is kept symmetric by explicit
// re-symmetrization after every rank-one update.
struct Ellipsoid {
    std::vector<double> center;
    std::vector<double> shape; // row-major n x n, symmetric positive definite
    double volume_proxy = 1.0; // (V/V0)^(1/n), per-dimension linear shrink
    int n = 0;
};

// When pinned, the users run at f_user and the MEC splits f_mec per task;
// the frequency stationarity rows (theta, lambda5) drop out of the dual.
struct FrequencyPolicy {
    bool pinned = false;
    double f_user = 0.0;
    double f_mec = 0.0;
};

struct InnerConfig {
    double eps2 = 1e-8;             // stop when volume_proxy <= eps2
    int iter_cap_multiplier = 200;  // cap = multiplier * (4K+2)^2
    bool deep_objective_cuts = false; // incumbent-based deep cuts (off: shallow alpha=-1/2n)
    double initial_radius = 1e3;    // ellipsoid radius in scaled dual units
    bool collect_trace = false;
    std::optional<std::vector<double>> warm_start; // physical dual units
};

enum class InnerStatus { converged, iteration_cap, infeasible_cut_stall };

const char* to_string(InnerStatus s);

struct InnerSolution {
    Allocation alloc;        // primal recovery at the incumbent dual
    DualPoint dual;          // incumbent (best) dual point
    double dual_value = 0.0; // dual function at the incumbent
    double best_dual_value = 0.0;
    long iterations = 0;
    InnerStatus status = InnerStatus::converged;

    Evaluation eval;             // phymodel evaluation of alloc
    double primal_objective = 0.0;
    double rel_gap = 0.0;        // |f0 - g_best| / max(|f0|, eps)
    double max_violation = 0.0;  // relative feasibility violation of alloc
    std::vector<InnerTraceRow> trace;
};

// Closed-form primal recovery at a dual point: transmission times from the
// Lambert-W inversions, user frequency from the cube-root stationarity,
// MEC shares from the cubic, phase budgets as the per-phase maxima.
// W-domain degeneracies (zero duals with s_i > 0) pin the time at the
// latency horizon t_max = T_d.
Allocation primal_from_dual(const DualPoint& dual, const std::vector<double>& s,
                            const NetworkScenario& scn, const ChannelRealization& ch,
                            const FrequencyPolicy& policy = {});

// Dual function: the Lagrangian evaluated at its recovered minimizer over
// (t, f) and over the phase budgets T_j on [0, T_d].  Concave in the dual
// variables; lower-bounds the primal optimum for every nonnegative dual.
double dual_value(const DualPoint& dual, const std::vector<double>& s,
                  const NetworkScenario& scn, const ChannelRealization& ch,
                  const FrequencyPolicy& policy = {});

// Constraint-slack vector at an allocation, ordered like DualPoint:
// [sum T_j - T_d, sum f_m - f_mec_max, t_u,i - T1, c q/f_u + t_u - T_d,
//  d_m s/f_m - T2, t_d,i - T3].
std::vector<double> subgradient(const DualPoint& dual, const Allocation& alloc,
                                const std::vector<double>& s, const NetworkScenario& scn,
                                const ChannelRealization& ch);

// Supergradient of dual_value at a dual point (phase budgets at their
// Lagrangian minimizers); this is the ellipsoid cut oracle.
std::vector<double> dual_supergradient(const DualPoint& dual, const std::vector<double>& s,
                                       const NetworkScenario& scn, const ChannelRealization& ch,
                                       const FrequencyPolicy& policy = {});

// Shallow-cut ellipsoid maximization of the dual with feasibility cuts for
// dual nonnegativity; primal recovered from the closed forms each iteration.
InnerSolution solve_inner(const std::vector<double>& s, const NetworkScenario& scn,
                          const ChannelRealization& ch, const InnerConfig& cfg = {},
                          const FrequencyPolicy& policy = {});

} // namespace meo
