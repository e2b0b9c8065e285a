#pragma once

namespace meo {

// Principal branch W0 of the Lambert W function, w * exp(w) = x.
// Domain x >= -1/e.  Halley iteration with a two-regime initial guess;
// relative residual tolerance 1e-12.  Throws std::domain_error below -1/e.
double lambert_w0(double x);

// Coefficients of a*x^3 + b*x^2 + c*x + d.
struct CubicCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

// Unique positive real root of a cubic with a > 0, d <= 0 (sign change on
// the positive axis guarantees existence).  Safeguarded Newton/bisection,
// residual <= 1e-9 * coefficient scale.  The root is clamped into
// [lo, hi] after solving.
double solve_cubic_positive_root(const CubicCoeffs& c, double lo, double hi);

} // namespace meo
