#pragma once

// Test-only oracles, written as independent straight-line transcriptions of
// the model expressions; they deliberately avoid the library's evaluation
// and solver paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "meo/scenario.hpp"

namespace oracle {

// central finite difference
inline double fdiff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// bisection root finder on [lo, hi] with f(lo) <= 0 <= f(hi)
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// weighted objective for user i written out term by term
inline double weighted_f0_user(const meo::NetworkScenario& scn, const meo::ChannelRealization& ch,
                               int i, double s, double tu, double td, double fu, double fm) {
    const auto& r = scn.radio;
    const auto& c = scn.compute;
    double w = c.weight_w;
    double u = scn.users[i].request_bits;
    double nu = r.pilot_overhead;
    double e_off = 0.0, e_dl = 0.0, e_oc = 0.0;
    if (s > 0.0) {
        e_off = tu * (std::pow(2.0, s / (nu * tu * r.bandwidth_hz)) - 1.0) * r.cap_gap_ul *
                ch.sigma1_sq[i] / (r.antennas * ch.gamma_home[i]);
        e_dl = td * (std::pow(2.0, r.output_ratio * s / (td * r.bandwidth_hz)) - 1.0) *
               r.cap_gap_dl * ch.sigma2_sq[i] / (r.antennas * ch.gamma_home[i]);
        e_oc = c.kappa_mec * fm * fm * c.cycles_mec * s;
    }
    double e_lc = (u - s > 0.0) ? c.kappa_user * c.cycles_user * (u - s) * fu * fu : 0.0;
    return (1.0 - w) * (e_off + e_lc) + w * (e_dl + e_oc);
}

// K = 1 instance: refined grid search over (t_u, t_d, f_u, f_m) subject to
// the latency and budget constraints, for a fixed s.  Iteratively shrinks a
// box around the best grid point.
struct GridResult {
    double objective = std::numeric_limits<double>::infinity();
    double tu = 0.0, td = 0.0, fu = 0.0, fm = 0.0;
};

inline GridResult grid_search_k1(const meo::NetworkScenario& scn, const meo::ChannelRealization& ch,
                                 double s, int pts = 13, int passes = 6) {
    const auto& c = scn.compute;
    double Td = c.latency_s;
    double u = scn.users[0].request_bits;
    double q = u - s;

    GridResult best;
    if (s <= 0.0) {
        // only f_u matters; the latency constraint fixes its floor
        double fu_lo = std::max(c.f_user_min, c.cycles_user * q / Td);
        if (fu_lo > c.f_user_max) return best;
        best.objective = weighted_f0_user(scn, ch, 0, 0.0, 0.0, 0.0, fu_lo, 0.0);
        best.fu = fu_lo;
        return best;
    }

    double tu_lo = 1e-6, tu_hi = Td;
    double td_lo = 1e-6, td_hi = Td;
    double fu_lo = c.f_user_min, fu_hi = c.f_user_max;
    double fm_lo = c.f_mec_min, fm_hi = c.f_mec_max;
    for (int pass = 0; pass < passes; ++pass) {
        GridResult pass_best;
        for (int a = 0; a < pts; ++a)
            for (int b = 0; b < pts; ++b)
                for (int d = 0; d < pts; ++d)
                    for (int e = 0; e < pts; ++e) {
                        double tu = tu_lo + (tu_hi - tu_lo) * a / (pts - 1);
                        double td = td_lo + (td_hi - td_lo) * b / (pts - 1);
                        double fu = fu_lo + (fu_hi - fu_lo) * d / (pts - 1);
                        double fm = fm_lo + (fm_hi - fm_lo) * e / (pts - 1);
                        if (tu <= 0.0 || td <= 0.0) continue;
                        double t_mec = c.cycles_mec * s / fm;
                        if (tu + t_mec + td > Td * (1.0 + 1e-12)) continue; // (c)
                        if (q > 0.0 && c.cycles_user * q / fu + tu > Td * (1.0 + 1e-12))
                            continue; // (d)
                        double f0 = weighted_f0_user(scn, ch, 0, s, tu, td, fu, fm);
                        if (f0 < pass_best.objective) pass_best = {f0, tu, td, fu, fm};
                    }
        if (!(pass_best.objective < best.objective) && pass > 0) break;
        best = pass_best;
        auto shrink = [&](double& lo, double& hi, double center, double lo_cap, double hi_cap) {
            double span = (hi - lo) * 2.0 / (pts - 1);
            lo = std::max(lo_cap, center - span);
            hi = std::min(hi_cap, center + span);
        };
        shrink(tu_lo, tu_hi, best.tu, 1e-7, Td);
        shrink(td_lo, td_hi, best.td, 1e-7, Td);
        shrink(fu_lo, fu_hi, best.fu, c.f_user_min, c.f_user_max);
        shrink(fm_lo, fm_hi, best.fm, c.f_mec_min, c.f_mec_max);
    }
    return best;
}

// brute-force outer: scan s on a grid, inner via grid_search_k1
inline double full_grid_min_k1(const meo::NetworkScenario& scn, const meo::ChannelRealization& ch,
                               int s_pts = 41) {
    double u = scn.users[0].request_bits;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < s_pts; ++k) {
        double s = u * k / (s_pts - 1);
        GridResult g = grid_search_k1(scn, ch, s);
        best = std::min(best, g.objective);
    }
    return best;
}

} // namespace oracle
