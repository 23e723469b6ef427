#pragma once

#include <cmath>

namespace dflsim {

// dBm only exists at the config boundary; everything downstream is watts.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

} // namespace dflsim
