#include "meo/phymodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meo/units.hpp"

namespace meo {

double uplink_power(double s_i, double t_u_i, double sigma1_sq, double gamma_home,
                    const RadioConstants& rc) {
    if (s_i <= 0.0) return 0.0;
    if (t_u_i <= 0.0) throw std::domain_error("uplink_power: nonpositive time with positive bits");
    double rate = s_i / (rc.pilot_overhead * t_u_i * rc.bandwidth_hz); // bits/s/Hz
    return (safe_exp2(rate) - 1.0) * rc.cap_gap_ul * sigma1_sq / (rc.antennas * gamma_home);
}

double downlink_coeff(double s_i, double t_d_i, double sigma2_sq, double gamma_home,
                      const RadioConstants& rc) {
    if (s_i <= 0.0) return 0.0;
    if (t_d_i <= 0.0) throw std::domain_error("downlink_coeff: nonpositive time with positive bits");
    double rate = rc.output_ratio * s_i / (t_d_i * rc.bandwidth_hz);
    return (safe_exp2(rate) - 1.0) * rc.cap_gap_dl * sigma2_sq /
           (rc.ap_power_w * rc.antennas * gamma_home);
}

Evaluation evaluate(const Allocation& alloc, const NetworkScenario& scn,
                    const ChannelRealization& ch) {
    const int K = scn.num_users();
    const auto& rc = scn.radio;
    const auto& cc = scn.compute;
    const double w = cc.weight_w;

    Evaluation ev;
    ev.energy.e_off.assign(K, 0.0);
    ev.energy.e_lc.assign(K, 0.0);
    ev.energy.e_oc.assign(K, 0.0);
    ev.energy.e_dl.assign(K, 0.0);
    ev.timing.t_local.assign(K, 0.0);
    ev.timing.t_mec.assign(K, 0.0);
    ev.timing.round_trip.assign(K, 0.0);
    ev.p.assign(K, 0.0);
    ev.eta.assign(K, 0.0);

    double sum_fm = 0.0;
    for (int i = 0; i < K; ++i) {
        const double u = scn.users[i].request_bits;
        const double s = alloc.s[i];
        const double q = u - s;

        if (q > 0.0) {
            ev.timing.t_local[i] = cc.cycles_user * q / alloc.f_u[i];
            ev.energy.e_lc[i] = cc.kappa_user * cc.cycles_user * q * alloc.f_u[i] * alloc.f_u[i];
        }
        if (s > 0.0) {
            ev.p[i] = uplink_power(s, alloc.t_u[i], ch.sigma1_sq[i], ch.gamma_home[i], rc);
            ev.eta[i] = downlink_coeff(s, alloc.t_d[i], ch.sigma2_sq[i], ch.gamma_home[i], rc);
            ev.energy.e_off[i] = ev.p[i] * alloc.t_u[i];
            ev.energy.e_dl[i] = rc.ap_power_w * ev.eta[i] * alloc.t_d[i];
            ev.energy.e_oc[i] = cc.kappa_mec * alloc.f_m[i] * alloc.f_m[i] * cc.cycles_mec * s;
            ev.timing.t_mec[i] = cc.cycles_mec * s / alloc.f_m[i];
            sum_fm += alloc.f_m[i];
        }
        ev.timing.round_trip[i] = alloc.t_u[i] + ev.timing.t_local[i];

        ev.energy.E_u += ev.energy.e_off[i] + ev.energy.e_lc[i];
        ev.energy.E_m += ev.energy.e_oc[i] + ev.energy.e_dl[i];
        if (ev.p[i] > ev.flags.max_ul_power) ev.flags.max_ul_power = ev.p[i];
        ev.flags.sum_eta += ev.eta[i];
    }
    ev.energy.E_total_weighted = (1.0 - w) * ev.energy.E_u + w * ev.energy.E_m;

    double rt = 0.0;
    for (int i = 0; i < K; ++i) rt = std::max(rt, ev.timing.round_trip[i]);
    ev.timing.T_total = std::max(rt, alloc.T1 + alloc.T2 + alloc.T3);
    ev.timing.slack = cc.latency_s - ev.timing.T_total;

    ev.flags.ul_power_cap = ev.flags.max_ul_power > rc.ut_power_max_w * (1.0 + 1e-9);
    ev.flags.dl_budget = ev.flags.sum_eta > 1.0 + 1e-9;
    ev.flags.mec_freq_budget = sum_fm > cc.f_mec_max * (1.0 + 1e-6);
    return ev;
}

std::vector<double> objective_grad_s(const Allocation& alloc, const NetworkScenario& scn,
                                     const ChannelRealization& ch) {
    const int K = scn.num_users();
    const auto& rc = scn.radio;
    const auto& cc = scn.compute;
    const double w = cc.weight_w;
    const double ln2 = std::log(2.0);
    const double nuB = rc.pilot_overhead * rc.bandwidth_hz;

    std::vector<double> g(K, 0.0);
    for (int i = 0; i < K; ++i) {
        const double s = alloc.s[i];
        const double ge = ch.gamma_home[i];
        double eu = 1.0, ed = 1.0; // s->0 limits of the exponentials
        if (s > 0.0 && alloc.t_u[i] > 0.0) eu = safe_exp2(s / (nuB * alloc.t_u[i]));
        if (s > 0.0 && alloc.t_d[i] > 0.0)
            ed = safe_exp2(rc.output_ratio * s / (alloc.t_d[i] * rc.bandwidth_hz));
        double fm = (s > 0.0) ? alloc.f_m[i] : cc.f_mec_min;

        double d_off = eu * ln2 * rc.cap_gap_ul * ch.sigma1_sq[i] / (nuB * rc.antennas * ge);
        double d_dl = rc.output_ratio * ed * ln2 * rc.cap_gap_dl * ch.sigma2_sq[i] /
                      (rc.bandwidth_hz * rc.antennas * ge);
        double d_oc = cc.kappa_mec * cc.cycles_mec * fm * fm;
        double d_lc = cc.kappa_user * cc.cycles_user * alloc.f_u[i] * alloc.f_u[i];

        g[i] = (1.0 - w) * d_off + w * d_dl + w * d_oc - (1.0 - w) * d_lc;
    }
    return g;
}

std::vector<double> objective_hess_s(const Allocation& alloc, const NetworkScenario& scn,
                                     const ChannelRealization& ch) {
    const int K = scn.num_users();
    const auto& rc = scn.radio;
    const auto& cc = scn.compute;
    const double w = cc.weight_w;
    const double ln2 = std::log(2.0);
    const double nuB = rc.pilot_overhead * rc.bandwidth_hz;
    const double B = rc.bandwidth_hz;
    const double Td = cc.latency_s;

    std::vector<double> h(K, 0.0);
    for (int i = 0; i < K; ++i) {
        const double s = alloc.s[i];
        const double ge = ch.gamma_home[i];
        // the s = 0 convention zeroes the times; fall back to the latency
        // horizon so the curvature stays finite and positive
        double tu = (s > 0.0 && alloc.t_u[i] > 0.0) ? alloc.t_u[i] : Td;
        double td = (s > 0.0 && alloc.t_d[i] > 0.0) ? alloc.t_d[i] : Td;
        double eu = safe_exp2(s / (nuB * tu));
        double ed = safe_exp2(rc.output_ratio * s / (td * B));

        h[i] = (1.0 - w) * eu * ln2 * ln2 * rc.cap_gap_ul * ch.sigma1_sq[i] /
                   (nuB * nuB * rc.antennas * ge * tu) +
               w * rc.output_ratio * rc.output_ratio * ed * ln2 * ln2 * rc.cap_gap_dl *
                   ch.sigma2_sq[i] / (B * B * rc.antennas * ge * td);
    }
    return h;
}

std::vector<bool> check_typical_condition(const NetworkScenario& scn,
                                          const ChannelRealization& ch) {
    const int K = scn.num_users();
    const auto& rc = scn.radio;
    const auto& cc = scn.compute;
    const double w = cc.weight_w;
    const double ln2 = std::log(2.0);
    const double nuB = rc.pilot_overhead * rc.bandwidth_hz;

    std::vector<bool> typical(K, true);
    for (int i = 0; i < K; ++i) {
        const double ge = ch.gamma_home[i];
        double d_off = ln2 * rc.cap_gap_ul * ch.sigma1_sq[i] / (nuB * rc.antennas * ge);
        double d_dl = rc.output_ratio * ln2 * rc.cap_gap_dl * ch.sigma2_sq[i] /
                      (rc.bandwidth_hz * rc.antennas * ge);
        double d_oc = cc.kappa_mec * cc.cycles_mec * cc.f_mec_max * cc.f_mec_max;
        double d_lc = cc.kappa_user * cc.cycles_user * cc.f_user_max * cc.f_user_max;
        typical[i] = (1.0 - w) * d_off + w * d_dl + w * d_oc - (1.0 - w) * d_lc >= 0.0;
    }
    return typical;
}

} // namespace meo
