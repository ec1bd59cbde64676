#pragma once

#include <cmath>

namespace elsm {

// All internal math runs in linear watts, Hz, bits, and seconds.
// Conversions from the dBm/MHz/Mbit scales used in config files live here
// and nowhere else.

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double mbits(double m) { return m * 1e6; }
inline double kbits(double k) { return k * 1e3; }
inline double ghz(double g) { return g * 1e9; }
inline double mhz(double m) { return m * 1e6; }
inline double ms(double v) { return v * 1e-3; }

constexpr double kSpeedOfLight = 299792458.0;  // m/s

}  // namespace elsm
