#pragma once

#include <vector>

#include "meo/scenario.hpp"

namespace meo {

// Full primal point.  Convention for s_i = 0: t_u = t_d = 0, p = eta = 0,
// f_m unassigned (0), and the user is excluded from the phase maxima.
struct Allocation {
    std::vector<double> s;   // offloaded bits
    std::vector<double> t_u; // uplink transmission time (s)
    std::vector<double> t_d; // downlink transmission time (s)
    std::vector<double> f_u; // user CPU frequency (Hz)
    std::vector<double> f_m; // MEC CPU share (Hz)
    double T1 = 0.0, T2 = 0.0, T3 = 0.0;
};

struct EnergyBreakdown {
    std::vector<double> e_off; // per-user uplink transmission energy (J)
    std::vector<double> e_lc;  // per-user local computation energy (J)
    std::vector<double> e_oc;  // per-user MEC computation energy (J)
    std::vector<double> e_dl;  // per-user downlink transmission energy (J)
    double E_u = 0.0;          // sum(e_off + e_lc)
    double E_m = 0.0;          // sum(e_oc + e_dl)
    double E_total_weighted = 0.0; // (1-w) E_u + w E_m
};

struct TimingReport {
    std::vector<double> t_local;     // c_i (u_i - s_i) / f_u,i
    std::vector<double> t_mec;       // d_m s_i / f_m,i
    std::vector<double> round_trip;  // t_u,i + t_local,i
    double T_total = 0.0;            // max(max_i round_trip, T1+T2+T3)
    double slack = 0.0;              // T_d - T_total
};

// Soft violation flags; evaluation never throws on these.
struct EvalFlags {
    bool ul_power_cap = false;   // some p_i > ut_power_max
    bool dl_budget = false;      // sum eta_i > 1
    bool mec_freq_budget = false; // sum f_m,i > f_mec_max (beyond tolerance)
    double max_ul_power = 0.0;
    double sum_eta = 0.0;
    bool any() const { return ul_power_cap || dl_budget || mec_freq_budget; }
};

struct Evaluation {
    EnergyBreakdown energy;
    TimingReport timing;
    EvalFlags flags;
    std::vector<double> p;   // recovered uplink powers
    std::vector<double> eta; // recovered downlink coefficients
};

// Uplink transmit power implied by sending s_i bits in t_u_i seconds:
// p = (2^(s/(nu t_u B)) - 1) Gamma_1 sigma1^2 / (N gamma).
// Throws std::domain_error if t_u_i <= 0 while s_i > 0.
double uplink_power(double s_i, double t_u_i, double sigma1_sq, double gamma_home,
                    const RadioConstants& rc);

// Downlink power coefficient eta = (2^(mu s/(t_d B)) - 1) Gamma_2 sigma2^2 / (P N gamma).
double downlink_coeff(double s_i, double t_d_i, double sigma2_sq, double gamma_home,
                      const RadioConstants& rc);

// Evaluates every rate/power/energy/time expression for an allocation.
// Violations are reported in flags, never thrown.
Evaluation evaluate(const Allocation& alloc, const NetworkScenario& scn,
                    const ChannelRealization& ch);

// Per-user gradient of the weighted objective with respect to s_i, at fixed
// (t_u, t_d, f_u, f_m).  For users with s_i = 0 the s->0 limit is used
// (unit exponentials; f_m taken at its lower bound).
std::vector<double> objective_grad_s(const Allocation& alloc, const NetworkScenario& scn,
                                     const ChannelRealization& ch);

// Per-user second derivative w.r.t. s_i; strictly positive two-term form.
std::vector<double> objective_hess_s(const Allocation& alloc, const NetworkScenario& scn,
                                     const ChannelRealization& ch);

// Case classification: true iff the s->0 gradient is nonnegative when the
// computing frequencies sit at their capability limits (f_user_max at the
// user, f_mec_max at the MEC).  A true entry means the weighted energy is
// treated as increasing in s_i (the typical regime the solvers assume).
std::vector<bool> check_typical_condition(const NetworkScenario& scn,
                                          const ChannelRealization& ch);

} // namespace meo
