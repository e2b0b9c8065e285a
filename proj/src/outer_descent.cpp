#include "meo/outer_descent.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "meo/units.hpp"

namespace meo {

DescentMethod method_from_string(const std::string& s) {
    if (s == "gradient" || s == "gd") return DescentMethod::gradient;
    if (s == "newton") return DescentMethod::newton;
    throw std::invalid_argument("unknown descent method: " + s);
}

const char* to_string(DescentMethod m) {
    return m == DescentMethod::gradient ? "gradient" : "newton";
}

const char* to_string(OuterTermination t) {
    switch (t) {
        case OuterTermination::gradient_tolerance: return "gradient-tolerance";
        case OuterTermination::latency_binding: return "latency-binding";
        case OuterTermination::boundary_s_zero: return "boundary-s-zero";
        case OuterTermination::boundary_s_full: return "boundary-s-full";
        case OuterTermination::iteration_cap: return "iteration-cap";
        case OuterTermination::case_ii_unsupported: return "case-II-unsupported";
    }
    return "?";
}

std::vector<double> step_direction(const std::vector<double>& s, const std::vector<double>& grad,
                                   const std::vector<double>& hess, DescentMethod method) {
    (void)s;
    std::vector<double> ds(grad.size(), 0.0);
    for (size_t i = 0; i < grad.size(); ++i) {
        if (method == DescentMethod::gradient) {
            ds[i] = -grad[i];
        } else {
            assert(hess[i] > 0.0);
            ds[i] = -grad[i] / hess[i];
        }
    }
    return ds;
}

namespace {

// per-user objective with the inner variables frozen; the true objective is
// bounded above by this at any other s, so Armijo decrease here certifies
// decrease of the full nested objective
double surrogate_f0(int i, double si, const Allocation& a, const NetworkScenario& scn,
                    const ChannelRealization& ch) {
    const auto& rc = scn.radio;
    const auto& cc = scn.compute;
    const double w = cc.weight_w;
    const double u = scn.users[i].request_bits;
    const double q = u - si;

    double tu = a.t_u[i], td = a.t_d[i], fm = a.f_m[i];
    if (si > 0.0 && tu <= 0.0) { // user re-entering from s = 0; price at nominal times
        tu = cc.latency_s / 3.0;
        td = cc.latency_s / 3.0;
        fm = cc.f_mec_min;
    }

    double e_off = 0.0, e_dl = 0.0, e_oc = 0.0;
    if (si > 0.0) {
        e_off = uplink_power(si, tu, ch.sigma1_sq[i], ch.gamma_home[i], rc) * tu;
        e_dl = rc.ap_power_w * downlink_coeff(si, td, ch.sigma2_sq[i], ch.gamma_home[i], rc) * td;
        e_oc = cc.kappa_mec * fm * fm * cc.cycles_mec * si;
    }
    double e_lc = (q > 0.0) ? cc.kappa_user * cc.cycles_user * q * a.f_u[i] * a.f_u[i] : 0.0;
    return (1.0 - w) * (e_off + e_lc) + w * (e_dl + e_oc);
}

} // namespace

std::vector<double> backtracking_search(const std::vector<double>& s,
                                        const std::vector<double>& ds,
                                        const std::vector<double>& grad,
                                        const Allocation& alloc, const NetworkScenario& scn,
                                        const ChannelRealization& ch, const OuterConfig& cfg) {
    const int K = scn.num_users();
    std::vector<double> t(K, 0.0);
    for (int i = 0; i < K; ++i) {
        if (ds[i] == 0.0) continue;
        const double u = scn.users[i].request_bits;
        double t0 = 1.0;
        if (cfg.method == DescentMethod::gradient)
            t0 = cfg.gd_step_fraction * u / std::abs(ds[i]); // gradients carry J/bit units
        double f_base = surrogate_f0(i, s[i], alloc, scn, ch);
        double ti = t0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            double cand = std::clamp(s[i] + ti * ds[i], 0.0, u);
            double moved = cand - s[i];
            if (moved == 0.0) { accepted = true; ti = 0.0; break; }
            double f_cand = surrogate_f0(i, cand, alloc, scn, ch);
            if (f_cand <= f_base + cfg.backtrack_alpha * grad[i] * moved) { accepted = true; break; }
            ti *= cfg.backtrack_beta;
        }
        t[i] = accepted ? ti : 0.0;
    }
    return t;
}

namespace {

Evaluation eval_inner(const InnerSolution& is, const NetworkScenario& scn,
                      const ChannelRealization& ch) {
    (void)scn; (void)ch;
    return is.eval;
}

} // namespace

OuterSolution solve(const NetworkScenario& scn, const ChannelRealization& ch,
                    const OuterConfig& cfg) {
    const int K = scn.num_users();
    const auto& cc = scn.compute;
    const double Td = cc.latency_s;
    const double feas_tol = 1e-9;

    OuterSolution out;

    auto finish = [&](const InnerSolution& inner, OuterTermination term) {
        out.alloc = inner.alloc;
        Evaluation ev = eval_inner(inner, scn, ch);
        out.energy = ev.energy;
        out.timing = ev.timing;
        out.flags = ev.flags;
        out.termination = term;
        out.rel_gap = inner.rel_gap;
        out.inner_status = inner.status;
        out.trace.termination = to_string(term);
        return out;
    };

    // Case gate: the descent assumes energy increasing in s (condition at
    // s -> 0).  Otherwise report the all-offload heuristic without any
    // optimality claim.
    auto typical = check_typical_condition(scn, ch);
    if (std::any_of(typical.begin(), typical.end(), [](bool b) { return !b; })) {
        std::vector<double> s_full(K);
        for (int i = 0; i < K; ++i) s_full[i] = scn.users[i].request_bits;
        InnerSolution inner = solve_inner(s_full, scn, ch, cfg.inner, cfg.policy);
        out.total_inner_iterations = inner.iterations;
        return finish(inner, OuterTermination::case_ii_unsupported);
    }

    std::vector<double> s(K);
    for (int i = 0; i < K; ++i) s[i] = cfg.s_init_fraction * scn.users[i].request_bits;

    InnerConfig icfg = cfg.inner;
    auto run_inner = [&](const std::vector<double>& sv, const InnerSolution* prev) {
        if (cfg.warm_start_duals && prev) icfg.warm_start = prev->dual.v;
        InnerSolution is = solve_inner(sv, scn, ch, icfg, cfg.policy);
        out.total_inner_iterations += is.iterations;
        return is;
    };

    InnerSolution inner = run_inner(s, nullptr);
    if (inner.eval.timing.T_total > Td * (1.0 + feas_tol)) {
        // initial point latency-infeasible: fall back to full offloading,
        // the least local-time-constrained point
        for (int i = 0; i < K; ++i) s[i] = scn.users[i].request_bits;
        inner = run_inner(s, &inner);
        if (inner.eval.timing.T_total > Td * (1.0 + feas_tol))
            return finish(inner, OuterTermination::latency_binding);
    }

    OuterTermination term = OuterTermination::iteration_cap;
    for (int k = 0; k < cfg.max_outer_iters; ++k) {
        auto grad = objective_grad_s(inner.alloc, scn, ch);
        auto hess = objective_hess_s(inner.alloc, scn, ch);
        double f0 = inner.eval.energy.E_total_weighted;
        double fscale = std::max(std::abs(f0), 1e-30);

        double gnorm = 0.0; // largest relative objective change over a full-range move
        for (int i = 0; i < K; ++i)
            gnorm = std::max(gnorm, std::abs(grad[i]) * scn.users[i].request_bits / fscale);

        if (cfg.collect_trace) {
            OuterTraceRow row;
            row.iteration = k;
            row.objective = f0;
            row.grad_norm = gnorm;
            row.T_total = inner.eval.timing.T_total;
            row.inner_iterations = inner.iterations;
            row.s = s;
            out.trace.outer.push_back(row);
        }
        out.outer_iterations = k + 1;

        bool all_zero = true, all_full = true;
        for (int i = 0; i < K; ++i) {
            if (s[i] > 1e-9 * scn.users[i].request_bits) all_zero = false;
            if (s[i] < (1.0 - 1e-9) * scn.users[i].request_bits) all_full = false;
        }
        if (all_zero) { term = OuterTermination::boundary_s_zero; break; }
        if (all_full) { term = OuterTermination::boundary_s_full; break; }
        if (gnorm <= cfg.eps1) { term = OuterTermination::gradient_tolerance; break; }
        if (cfg.method == DescentMethod::newton) {
            double dec2 = 0.0;
            for (int i = 0; i < K; ++i) dec2 += grad[i] * grad[i] / hess[i];
            if (std::sqrt(dec2) / fscale <= cfg.eps1) {
                term = OuterTermination::gradient_tolerance;
                break;
            }
        }

        auto ds = step_direction(s, grad, hess, cfg.method);
        auto t = backtracking_search(s, ds, grad, inner.alloc, scn, ch, cfg);

        std::vector<double> s_new(K);
        double moved = 0.0;
        for (int i = 0; i < K; ++i) {
            s_new[i] = std::clamp(s[i] + t[i] * ds[i], 0.0, scn.users[i].request_bits);
            moved = std::max(moved, std::abs(s_new[i] - s[i]) / scn.users[i].request_bits);
        }
        if (moved <= 1e-12) { term = OuterTermination::gradient_tolerance; break; }

        InnerSolution inner_new = run_inner(s_new, &inner);
        if (inner_new.eval.timing.T_total > Td * (1.0 + feas_tol)) {
            // reject; bisect the step toward the latency wall
            std::vector<double> s_lo = s; // feasible side
            InnerSolution inner_lo = inner;
            double lo = 0.0, hi = 1.0;
            for (int b = 0; b < 10; ++b) {
                if (std::abs(inner_lo.eval.timing.T_total - Td) <= 1e-4 * Td) break;
                double mid = 0.5 * (lo + hi);
                std::vector<double> s_mid(K);
                for (int i = 0; i < K; ++i)
                    s_mid[i] = std::clamp(s[i] + mid * t[i] * ds[i], 0.0,
                                          scn.users[i].request_bits);
                InnerSolution inner_mid = run_inner(s_mid, &inner_lo);
                if (inner_mid.eval.timing.T_total > Td * (1.0 + feas_tol)) {
                    hi = mid;
                } else {
                    lo = mid;
                    s_lo = s_mid;
                    inner_lo = inner_mid;
                }
            }
            s = s_lo;
            inner = inner_lo;
            term = OuterTermination::latency_binding;
            if (cfg.collect_trace) {
                OuterTraceRow row;
                row.iteration = out.outer_iterations;
                row.objective = inner.eval.energy.E_total_weighted;
                row.grad_norm = gnorm;
                row.T_total = inner.eval.timing.T_total;
                row.inner_iterations = inner.iterations;
                row.s = s;
                out.trace.outer.push_back(row);
            }
            break;
        }
        s = s_new;
        inner = inner_new;
    }

    return finish(inner, term);
}

} // namespace meo
