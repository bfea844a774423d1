// dissipation.hpp: bath-induced transition and dephasing rates

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qheat/model.hpp"

namespace qheat {

/// Lorentzian resonator between qubit and bath.
struct ResonatorFilter {
    double quality{1.0};
    double omega_r{1.0};  // rad/ns
};

/// Which flat branch of the drive a bath couples to. Omega <= 1 is the
/// low-gap branch, Omega > 1 the high-gap branch.
enum class ActiveBranch { Always, OnlyLowGap, OnlyHighGap };

struct BathCoupling {
    double kappa{0.01};
    double thermal{1.0};  // k_B T / hbar in rad/ns
    std::optional<ResonatorFilter> filter{};
    ActiveBranch active_branch{ActiveBranch::Always};
    bool pure_dephasing{false};
};

/// Rates in 1/ns.
struct RateSet {
    double down{0.0};
    double up{0.0};
    double phi{0.0};
    double sigma{0.0};

    RateSet& operator+=(const RateSet& o) {
        down += o.down;
        up += o.up;
        phi += o.phi;
        sigma += o.sigma;
        return *this;
    }
};

void validate(const ResonatorFilter& filter);
void validate(const BathCoupling& bath);

/// Bose occupation 1 / (exp(gap / thermal) - 1); both in the same units.
double bose_occupation(double gap, double thermal);

/// SI overload: energy in J, temperature in K.
double bose_occupation_si(double delta_e_joule, double temperature_kelvin);

/// Lorentzian suppression 1 / (1 + Q^2 (omega_r/omega - omega/omega_r)^2).
double filter_factor(const ResonatorFilter& filter, double omega);

bool is_low_gap_branch(double drive_value);
bool branch_active(ActiveBranch branch, double drive_value);

/// Rates of one bath for a given instantaneous drive value.
RateSet rates_for_drive(const QubitDriveModel& model, const BathCoupling& bath, double drive_value);
RateSet rates_at(const QubitDriveModel& model, const BathCoupling& bath, double t);

/// Sum over baths at a given drive value.
RateSet total_rates_for_drive(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                              double drive_value);

/// Capacitively coupled transmon with a resistor bath. SI units.
struct TransmonCircuit {
    double C_J{30e-15};    // F, each junction
    double C_c{8e-15};     // F
    double R{200.0};       // Ohm
    double omega{0.0};     // rad/s

    double c_sigma() const { return C_c + 2.0 * C_J; }
};

void validate(const TransmonCircuit& circ);

struct TransmonRate {
    double full{0.0};         // 1/s, capacitive-divider rate with Bose factor
    double approximation{0.0};  // 1/s, low temperature small drive estimate
};

/// Relaxation rate of a transmon coupled to a resistor. drive_value is the
/// instantaneous Omega entering the sigma_z projection factor.
TransmonRate transmon_rate(const TransmonCircuit& circ, const QubitDriveModel& model,
                           double temperature_kelvin, double drive_value = 0.0);

/// Coupling constant that makes the bath rate at Omega = 0 equal the full
/// transmon rate.
double effective_kappa(const TransmonCircuit& circ);

}  // namespace qheat
