#include "meo/special_math.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace meo {

namespace {
constexpr double kInvE = 0.36787944117144233; // 1/e
}

double lambert_w0(double x) {
    if (x < -kInvE) {
        // allow for rounding right at the branch point
        if (x > -kInvE - 1e-15) return -1.0;
        throw std::domain_error("lambert_w0: argument below -1/e");
    }
    if (x == 0.0) return 0.0;

    double w;
    if (x < -0.25) {
        // series around the branch point, argument p = sqrt(2(e x + 1))
        double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
    } else if (x < 3.0) {
        w = x / (1.0 + x); // crude but inside the Halley basin
    } else {
        double lx = std::log(x);
        w = lx - std::log(lx);
    }

    for (int it = 0; it < 50; ++it) {
        double ew = std::exp(w);
        double f = w * ew - x;
        if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(x))) break;
        double wp1 = w + 1.0;
        double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if (denom == 0.0) break;
        w -= f / denom;
        if (w < -1.0) w = -1.0; // stay on the principal branch
    }
    return w;
}

double solve_cubic_positive_root(const CubicCoeffs& c, double lo, double hi) {
    assert(c.a > 0.0);
    assert(c.d <= 0.0);

    auto f = [&](double x) { return ((c.a * x + c.b) * x + c.c) * x + c.d; };
    auto fp = [&](double x) { return (3.0 * c.a * x + 2.0 * c.b) * x + c.c; };

    // bracket [0, xhi] with f(0) = d <= 0 < f(xhi)
    double xhi = std::max({1.0, std::cbrt(std::max(-c.d, 0.0) / c.a), hi});
    int guard = 0;
    while (f(xhi) <= 0.0 && guard++ < 200) xhi *= 2.0;
    double xlo = 0.0;

    double x = std::cbrt(std::max(-c.d, 1e-300) / c.a); // b=c=0 solution as seed
    x = std::clamp(x, xlo, xhi);

    double scale = std::max({std::abs(c.a) * xhi * xhi * xhi, std::abs(c.b) * xhi * xhi,
                             std::abs(c.c) * xhi, std::abs(c.d), 1e-300});
    for (int it = 0; it < 200; ++it) {
        double fx = f(x);
        if (std::abs(fx) <= 1e-12 * scale) break;
        if (fx > 0.0) xhi = x; else xlo = x;
        double d1 = fp(x);
        double step = (d1 != 0.0) ? fx / d1 : 0.0;
        double xn = x - step;
        if (!(xn > xlo && xn < xhi)) xn = 0.5 * (xlo + xhi); // bisection safeguard
        if (xn == x) break;
        x = xn;
    }
    return std::clamp(x, lo, hi);
}

} // namespace meo
