#include "meo/inner_pd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "meo/special_math.hpp"
#include "meo/units.hpp"

namespace meo {

const char* to_string(InnerStatus s) {
    switch (s) {
        case InnerStatus::converged: return "converged";
        case InnerStatus::iteration_cap: return "iteration-cap";
        case InnerStatus::infeasible_cut_stall: return "infeasible-cut-stall";
    }
    return "?";
}

namespace {

constexpr double kInvE = 0.36787944117144233;

// transmission time from the Lambert-W inversion of the time stationarity:
// rate_scale is nu*B/(s ln2) for uplink, B/(mu s ln2) for downlink.
// dual_ratio is (beta+xi)/(1-w) or phi/w.  Returns t clamped to (0, t_max].
double lambert_time(double dual_ratio, double gain_over_noise, double rate_scale, double t_max) {
    double z = dual_ratio * gain_over_noise / std::exp(1.0) - kInvE;
    if (z < -kInvE) z = -kInvE;
    double x = rate_scale * (lambert_w0(z) + 1.0);
    if (x <= 1.0 / t_max) return t_max;
    return 1.0 / x;
}

} // namespace

Allocation primal_from_dual(const DualPoint& dual, const std::vector<double>& s,
                            const NetworkScenario& scn, const ChannelRealization& ch,
                            const FrequencyPolicy& policy) {
    const int K = scn.num_users();
    const auto& rc = scn.radio;
    const auto& cc = scn.compute;
    const double w = cc.weight_w;
    const double ln2 = std::log(2.0);
    const double t_max = cc.latency_s;

    Allocation a;
    a.s = s;
    a.t_u.assign(K, 0.0);
    a.t_d.assign(K, 0.0);
    a.f_u.assign(K, 0.0);
    a.f_m.assign(K, 0.0);

    for (int i = 0; i < K; ++i) {
        const double u = scn.users[i].request_bits;
        const double q = u - s[i];

        if (policy.pinned) {
            a.f_u[i] = policy.f_user;
        } else if (q > 0.0) {
            double fu = std::cbrt(dual.xi(i) / (2.0 * (1.0 - w) * cc.kappa_user));
            a.f_u[i] = std::clamp(fu, cc.f_user_min, cc.f_user_max);
        } else {
            a.f_u[i] = cc.f_user_min;
        }

        if (s[i] > 0.0) {
            if (policy.pinned) {
                a.f_m[i] = policy.f_mec;
            } else {
                CubicCoeffs cub{2.0 * w * cc.kappa_mec * cc.cycles_mec * s[i], dual.lambda5(), 0.0,
                                -dual.theta(i) * cc.cycles_mec * s[i]};
                a.f_m[i] = solve_cubic_positive_root(cub, cc.f_mec_min, cc.f_mec_max);
            }
            double gon1 = rc.antennas * ch.gamma_home[i] / (ch.sigma1_sq[i] * rc.cap_gap_ul);
            double gon2 = rc.antennas * ch.gamma_home[i] / (ch.sigma2_sq[i] * rc.cap_gap_dl);
            a.t_u[i] = lambert_time((dual.beta(i) + dual.xi(i)) / (1.0 - w), gon1,
                                    rc.pilot_overhead * rc.bandwidth_hz / (s[i] * ln2), t_max);
            a.t_d[i] = lambert_time(dual.phi(i) / w, gon2,
                                    rc.bandwidth_hz / (rc.output_ratio * s[i] * ln2), t_max);
        }
    }

    a.T1 = a.T2 = a.T3 = 0.0;
    for (int i = 0; i < K; ++i) {
        if (s[i] <= 0.0) continue;
        a.T1 = std::max(a.T1, a.t_u[i]);
        a.T2 = std::max(a.T2, cc.cycles_mec * s[i] / a.f_m[i]);
        a.T3 = std::max(a.T3, a.t_d[i]);
    }
    return a;
}

namespace {

struct GEval {
    double value = 0.0;
    std::vector<double> supergrad; // 4K+2, phase budgets at L-minimizers
    Allocation alloc;
};

// dual function + supergradient in one recovery pass
GEval eval_dual(const DualPoint& dual, const std::vector<double>& s, const NetworkScenario& scn,
                const ChannelRealization& ch, const FrequencyPolicy& policy) {
    const int K = scn.num_users();
    const auto& rc = scn.radio;
    const auto& cc = scn.compute;
    const double w = cc.weight_w;
    const double Td = cc.latency_s;

    GEval out;
    out.alloc = primal_from_dual(dual, s, scn, ch, policy);
    const Allocation& a = out.alloc;

    double sum_beta = 0.0, sum_theta = 0.0, sum_phi = 0.0, sum_fm = 0.0;
    for (int i = 0; i < K; ++i) {
        sum_beta += dual.beta(i);
        sum_theta += dual.theta(i);
        sum_phi += dual.phi(i);
        if (s[i] > 0.0) sum_fm += a.f_m[i];
    }

    // phase budgets minimizing the Lagrangian on [lo_j, T_d]; with frequencies
    // pinned the MEC phase has a hard floor at the (constant) slowest task
    double lo2 = policy.pinned ? a.T2 : 0.0;
    double c1 = dual.lambda1() - sum_beta;
    double c2 = dual.lambda1() - sum_theta;
    double c3 = dual.lambda1() - sum_phi;
    double T1b = c1 < 0.0 ? Td : 0.0;
    double T2b = c2 < 0.0 ? Td : lo2;
    double T3b = c3 < 0.0 ? Td : 0.0;

    double g = c1 * T1b + c2 * T2b + c3 * T3b - dual.lambda1() * Td;
    g += dual.lambda5() * (sum_fm - cc.f_mec_max);

    out.supergrad.assign(DualPoint::dimension(K), 0.0);
    out.supergrad[0] = T1b + T2b + T3b - Td;           // lambda1
    out.supergrad[1] = sum_fm - cc.f_mec_max;          // lambda5

    for (int i = 0; i < K; ++i) {
        const double u = scn.users[i].request_bits;
        const double q = u - s[i];

        double e_lc = (q > 0.0) ? cc.kappa_user * cc.cycles_user * q * a.f_u[i] * a.f_u[i] : 0.0;
        double t_lc = (q > 0.0) ? cc.cycles_user * q / a.f_u[i] : 0.0;
        double e_off = 0.0, e_dl = 0.0, e_oc = 0.0, t_mec = 0.0;
        if (s[i] > 0.0) {
            e_off = uplink_power(s[i], a.t_u[i], ch.sigma1_sq[i], ch.gamma_home[i], rc) * a.t_u[i];
            e_dl = rc.ap_power_w *
                   downlink_coeff(s[i], a.t_d[i], ch.sigma2_sq[i], ch.gamma_home[i], rc) * a.t_d[i];
            e_oc = cc.kappa_mec * a.f_m[i] * a.f_m[i] * cc.cycles_mec * s[i];
            t_mec = cc.cycles_mec * s[i] / a.f_m[i];
        }

        g += (1.0 - w) * (e_off + e_lc) + w * (e_dl + e_oc);
        g += dual.xi(i) * (t_lc + a.t_u[i] - Td);
        g += dual.beta(i) * a.t_u[i] + dual.theta(i) * t_mec + dual.phi(i) * a.t_d[i];

        out.supergrad[2 + i] = a.t_u[i] - T1b;            // beta_i
        out.supergrad[2 + K + i] = t_lc + a.t_u[i] - Td;  // xi_i
        out.supergrad[2 + 2 * K + i] = t_mec - T2b;       // theta_i
        out.supergrad[2 + 3 * K + i] = a.t_d[i] - T3b;    // phi_i
    }
    out.value = g;
    return out;
}

} // namespace

double dual_value(const DualPoint& dual, const std::vector<double>& s, const NetworkScenario& scn,
                  const ChannelRealization& ch, const FrequencyPolicy& policy) {
    return eval_dual(dual, s, scn, ch, policy).value;
}

std::vector<double> dual_supergradient(const DualPoint& dual, const std::vector<double>& s,
                                       const NetworkScenario& scn, const ChannelRealization& ch,
                                       const FrequencyPolicy& policy) {
    return eval_dual(dual, s, scn, ch, policy).supergrad;
}

std::vector<double> subgradient(const DualPoint& dual, const Allocation& alloc,
                                const std::vector<double>& s, const NetworkScenario& scn,
                                const ChannelRealization& ch) {
    (void)dual;
    const int K = scn.num_users();
    const auto& cc = scn.compute;
    const double Td = cc.latency_s;

    std::vector<double> sg(DualPoint::dimension(K), 0.0);
    double sum_fm = 0.0;
    for (int i = 0; i < K; ++i)
        if (s[i] > 0.0) sum_fm += alloc.f_m[i];

    sg[0] = alloc.T1 + alloc.T2 + alloc.T3 - Td;
    sg[1] = sum_fm - cc.f_mec_max;
    for (int i = 0; i < K; ++i) {
        const double q = scn.users[i].request_bits - s[i];
        double t_lc = (q > 0.0) ? cc.cycles_user * q / alloc.f_u[i] : 0.0;
        double t_mec = (s[i] > 0.0) ? cc.cycles_mec * s[i] / alloc.f_m[i] : 0.0;
        sg[2 + i] = alloc.t_u[i] - alloc.T1;
        sg[2 + K + i] = t_lc + alloc.t_u[i] - Td;
        sg[2 + 2 * K + i] = t_mec - alloc.T2;
        sg[2 + 3 * K + i] = alloc.t_d[i] - alloc.T3;
    }
    return sg;
}

namespace {

// relative feasibility violation of an allocation (constraints c, d, h;
// e/f/g hold by construction of the phase maxima)
double allocation_violation(const Allocation& a, const std::vector<double>& s,
                            const NetworkScenario& scn) {
    const auto& cc = scn.compute;
    const double Td = cc.latency_s;
    double v = (a.T1 + a.T2 + a.T3 - Td) / Td;
    double sum_fm = 0.0;
    for (int i = 0; i < scn.num_users(); ++i) {
        const double q = scn.users[i].request_bits - s[i];
        double t_lc = (q > 0.0) ? cc.cycles_user * q / a.f_u[i] : 0.0;
        v = std::max(v, (t_lc + a.t_u[i] - Td) / Td);
        if (s[i] > 0.0) sum_fm += a.f_m[i];
    }
    v = std::max(v, (sum_fm - cc.f_mec_max) / cc.f_mec_max);
    return std::max(v, 0.0);
}

} // namespace

InnerSolution solve_inner(const std::vector<double>& s, const NetworkScenario& scn,
                          const ChannelRealization& ch, const InnerConfig& cfg,
                          const FrequencyPolicy& policy) {
    const int K = scn.num_users();
    const auto& cc = scn.compute;
    if (!(cc.weight_w > 0.0 && cc.weight_w < 1.0))
        throw std::invalid_argument("solve_inner: system-level problem requires 0 < w < 1");
    assert(static_cast<int>(s.size()) == K);

    // active dual rows; frequency stationarity rows drop out when pinned
    std::vector<int> rows;
    rows.push_back(0);
    if (!policy.pinned) rows.push_back(1);
    for (int i = 0; i < K; ++i) rows.push_back(2 + i);
    for (int i = 0; i < K; ++i) rows.push_back(2 + K + i);
    if (!policy.pinned)
        for (int i = 0; i < K; ++i) rows.push_back(2 + 2 * K + i);
    for (int i = 0; i < K; ++i) rows.push_back(2 + 3 * K + i);
    const int n = static_cast<int>(rows.size());

    // dual scaling: times in units of T_d, frequencies in units of f_mec_max,
    // energies in units of the zero-dual objective
    DualPoint zero = DualPoint::zeros(K);
    Allocation a0 = primal_from_dual(zero, s, scn, ch, policy);
    Evaluation ev0 = evaluate(a0, scn, ch);
    double e_ref = std::max(ev0.energy.E_total_weighted, 1e-30);
    std::vector<double> scale(DualPoint::dimension(K), e_ref / cc.latency_s);
    scale[1] = e_ref / cc.f_mec_max;

    Ellipsoid ell;
    ell.n = n;
    ell.center.assign(n, 1.0);
    if (cfg.warm_start) {
        const auto& ws = *cfg.warm_start;
        for (int r = 0; r < n; ++r) ell.center[r] = ws[rows[r]] / scale[rows[r]];
    }
    const double R = cfg.initial_radius;
    ell.shape.assign(static_cast<size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r) ell.shape[static_cast<size_t>(r) * n + r] = R * R;

    const long iter_cap =
        static_cast<long>(cfg.iter_cap_multiplier) * DualPoint::dimension(K) * DualPoint::dimension(K);
    const long stall_cap = 10L * DualPoint::dimension(K) * DualPoint::dimension(K);

    InnerSolution sol;
    sol.best_dual_value = -std::numeric_limits<double>::infinity();
    DualPoint best = DualPoint::zeros(K);
    long stall = 0;
    InnerStatus status = InnerStatus::iteration_cap;

    std::vector<double> g(n), pg(n);
    DualPoint lam = DualPoint::zeros(K);

    long it = 0;
    for (; it < iter_cap; ++it) {
        // feasibility cut on the most negative coordinate, if any
        int neg = -1;
        double worst = 0.0;
        for (int r = 0; r < n; ++r)
            if (ell.center[r] < worst) { worst = ell.center[r]; neg = r; }

        double alpha;
        if (neg >= 0) {
            std::fill(g.begin(), g.end(), 0.0);
            g[neg] = -1.0;
            double pii = ell.shape[static_cast<size_t>(neg) * n + neg];
            alpha = std::min(-ell.center[neg] / std::sqrt(std::max(pii, 1e-300)), 0.995);
            if (++stall >= stall_cap) { status = InnerStatus::infeasible_cut_stall; break; }
        } else {
            stall = 0;
            for (int r = 0; r < n; ++r) lam.v[rows[r]] = ell.center[r] * scale[rows[r]];
            GEval ge = eval_dual(lam, s, scn, ch, policy);
            if (ge.value > sol.best_dual_value) {
                sol.best_dual_value = ge.value;
                best = lam;
            }
            // ascent cut: drop the half-space where the dual cannot improve
            double norm2 = 0.0;
            for (int r = 0; r < n; ++r) {
                g[r] = -ge.supergrad[rows[r]] * scale[rows[r]];
                norm2 += g[r] * g[r];
            }
            if (cfg.collect_trace)
                sol.trace.push_back({it, ge.value, sol.best_dual_value, ell.volume_proxy,
                                     allocation_violation(ge.alloc, s, scn)});
            if (norm2 <= 1e-300) { status = InnerStatus::converged; ++it; break; }
            alpha = -1.0 / (2.0 * n);
            if (cfg.deep_objective_cuts && std::isfinite(sol.best_dual_value)) {
                double gpg_est = 0.0; // ||g||_P for the depth estimate
                for (int r = 0; r < n; ++r) {
                    double acc = 0.0;
                    const double* row = &ell.shape[static_cast<size_t>(r) * n];
                    for (int c2 = 0; c2 < n; ++c2) acc += row[c2] * g[c2];
                    pg[r] = acc;
                    gpg_est += g[r] * acc;
                }
                if (gpg_est > 0.0)
                    alpha = std::clamp((sol.best_dual_value - ge.value) / std::sqrt(gpg_est),
                                       -1.0 / (2.0 * n), 0.9);
            }
        }

        // shallow/deep cut update of the localization ellipsoid
        double gpg = 0.0;
        for (int r = 0; r < n; ++r) {
            double acc = 0.0;
            const double* row = &ell.shape[static_cast<size_t>(r) * n];
            for (int c2 = 0; c2 < n; ++c2) acc += row[c2] * g[c2];
            pg[r] = acc;
            gpg += g[r] * acc;
        }
        if (gpg <= 0.0) { status = InnerStatus::converged; ++it; break; } // shape collapsed
        double sq = std::sqrt(gpg);
        double tau = (1.0 + n * alpha) / (n + 1.0);
        double delta = (double(n) * n / (double(n) * n - 1.0)) * (1.0 - alpha * alpha);
        double sigma = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha));
        for (int r = 0; r < n; ++r) ell.center[r] -= tau * pg[r] / sq;
        for (int r = 0; r < n; ++r) {
            double* row = &ell.shape[static_cast<size_t>(r) * n];
            for (int c2 = 0; c2 < n; ++c2)
                row[c2] = delta * (row[c2] - sigma * pg[r] * pg[c2] / gpg);
        }
        for (int r = 0; r < n; ++r) // symmetry repair
            for (int c2 = r + 1; c2 < n; ++c2) {
                double m = 0.5 * (ell.shape[static_cast<size_t>(r) * n + c2] +
                                  ell.shape[static_cast<size_t>(c2) * n + r]);
                ell.shape[static_cast<size_t>(r) * n + c2] = m;
                ell.shape[static_cast<size_t>(c2) * n + r] = m;
            }
        ell.volume_proxy *= std::sqrt(delta) * std::pow(1.0 - sigma, 0.5 / n);
        if (ell.volume_proxy <= cfg.eps2) { status = InnerStatus::converged; ++it; break; }
    }

    sol.iterations = it;
    sol.status = status;
    if (!std::isfinite(sol.best_dual_value)) {
        // no objective evaluation happened (all feasibility cuts)
        best = DualPoint::zeros(K);
        sol.best_dual_value = dual_value(best, s, scn, ch, policy);
    }
    sol.dual = best;
    sol.dual_value = sol.best_dual_value;
    sol.alloc = primal_from_dual(best, s, scn, ch, policy);
    sol.eval = evaluate(sol.alloc, scn, ch);
    sol.primal_objective = sol.eval.energy.E_total_weighted;
    sol.rel_gap = std::abs(sol.primal_objective - sol.best_dual_value) /
                  std::max(std::abs(sol.primal_objective), 1e-30);
    sol.max_violation = allocation_violation(sol.alloc, s, scn);
    return sol;
}

} // namespace meo
