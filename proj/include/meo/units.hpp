#pragma once

#include <cmath>

namespace meo {

// All internal computation uses SI units: bits, Hz, s, W, J.
// dBm/dB conversions live here and nowhere else.

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// exp2 with a clamped exponent so pathological dual points produce huge
// finite energies instead of inf/nan propagating through the solver.
inline double safe_exp2(double x) {
    if (x > 1020.0) x = 1020.0;
    return std::exp2(x);
}

} // namespace meo
