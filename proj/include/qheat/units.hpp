// units.hpp: physical constants and conversions to the internal unit system
//
// Internally every energy is carried as an angular frequency in rad/ns with
// hbar = 1, times are in ns and temperatures are carried as k_B T / hbar in
// rad/ns. The public configuration layer speaks GHz, mK and fW.

#pragma once

#include <numbers>

namespace qheat {

inline constexpr double kHbar = 1.054571817e-34;  // J s
inline constexpr double kBoltzmann = 1.380649e-23;  // J / K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace units {

/// Ordinary frequency in GHz to angular frequency in rad/ns.
constexpr double ghz_to_angular(double f_ghz) { return kTwoPi * f_ghz; }
constexpr double angular_to_ghz(double omega) { return omega / kTwoPi; }

/// k_B T / hbar in rad/ns.
constexpr double kelvin_to_angular(double kelvin) { return kBoltzmann * kelvin / kHbar * 1e-9; }
constexpr double millikelvin_to_angular(double mk) { return kelvin_to_angular(mk * 1e-3); }
constexpr double angular_to_kelvin(double theta) { return theta * 1e9 * kHbar / kBoltzmann; }

/// Energy carried as rad/ns to joules.
constexpr double angular_to_joule(double omega) { return kHbar * omega * 1e9; }
constexpr double joule_to_angular(double joule) { return joule / kHbar * 1e-9; }

/// Power carried as (rad/ns)/ns to watts.
constexpr double power_to_watt(double p) { return kHbar * p * 1e18; }
constexpr double power_to_femtowatt(double p) { return power_to_watt(p) * 1e15; }

/// Rate in 1/ns to 1/s.
constexpr double rate_to_si(double r) { return r * 1e9; }

}  // namespace units
}  // namespace qheat
