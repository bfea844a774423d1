#include "qheat/dissipation.hpp"

#include <cmath>

#include "qheat/errors.hpp"
#include "qheat/units.hpp"

namespace qheat {

void validate(const ResonatorFilter& filter) {
    if (!(filter.quality > 0.0)) throw DomainError("resonator quality factor must be positive");
    if (!(filter.omega_r > 0.0)) throw DomainError("resonator frequency must be positive");
}

void validate(const BathCoupling& bath) {
    if (!(bath.kappa >= 0.0) || !std::isfinite(bath.kappa))
        throw DomainError("bath coupling kappa must be non-negative");
    if (!(bath.thermal > 0.0) || !std::isfinite(bath.thermal))
        throw DomainError("bath temperature must be positive");
    if (bath.filter) validate(*bath.filter);
}

double bose_occupation(double gap, double thermal) {
    if (!(gap > 0.0)) throw DomainError("Bose occupation requires a positive gap");
    if (!(thermal > 0.0)) throw DomainError("Bose occupation requires a positive temperature");
    return 1.0 / std::expm1(gap / thermal);
}

double bose_occupation_si(double delta_e_joule, double temperature_kelvin) {
    if (!(temperature_kelvin > 0.0)) throw DomainError("Bose occupation requires a positive temperature");
    return bose_occupation(delta_e_joule, kBoltzmann * temperature_kelvin);
}

double filter_factor(const ResonatorFilter& filter, double omega) {
    const double detune = filter.omega_r / omega - omega / filter.omega_r;
    return 1.0 / (1.0 + filter.quality * filter.quality * detune * detune);
}

bool is_low_gap_branch(double drive_value) { return drive_value <= 1.0; }

bool branch_active(ActiveBranch branch, double drive_value) {
    switch (branch) {
        case ActiveBranch::Always: return true;
        case ActiveBranch::OnlyLowGap: return is_low_gap_branch(drive_value);
        case ActiveBranch::OnlyHighGap: return !is_low_gap_branch(drive_value);
    }
    return true;
}

RateSet rates_for_drive(const QubitDriveModel& model, const BathCoupling& bath, double drive_value) {
    if (!branch_active(bath.active_branch, drive_value) || bath.kappa == 0.0) return {};
    const double w0sq = model.omega0 * model.omega0;
    const double gw = model.g * drive_value;
    const double gwsq = gw * gw;
    const double omega = std::sqrt(w0sq + gwsq);
    const double x = omega / bath.thermal;

    double down = bath.kappa * (w0sq / (w0sq + gwsq)) * omega * (1.0 / std::expm1(x) + 1.0);
    if (bath.filter) down *= filter_factor(*bath.filter, omega);

    RateSet r;
    r.down = down;
    r.up = down * std::exp(-x);
    r.sigma = r.down + r.up;
    // (omega0^2/(g Omega)^2 + 1)^-1 written without the division, so it is 0 at Omega = 0.
    if (bath.pure_dephasing) r.phi = bath.kappa * gwsq / (w0sq + gwsq) * bath.thermal;
    return r;
}

RateSet rates_at(const QubitDriveModel& model, const BathCoupling& bath, double t) {
    return rates_for_drive(model, bath, waveform_value(model.drive, t));
}

RateSet total_rates_for_drive(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                              double drive_value) {
    RateSet total;
    for (const auto& b : baths) total += rates_for_drive(model, b, drive_value);
    return total;
}

void validate(const TransmonCircuit& circ) {
    if (!(circ.C_J > 0.0)) throw DomainError("junction capacitance must be positive");
    if (!(circ.C_c >= 0.0)) throw DomainError("coupling capacitance must be non-negative");
    if (!(circ.R >= 0.0)) throw DomainError("resistance must be non-negative");
    if (!(circ.omega > 0.0)) throw DomainError("transmon frequency must be positive");
}

TransmonRate transmon_rate(const TransmonCircuit& circ, const QubitDriveModel& model,
                           double temperature_kelvin, double drive_value) {
    validate(circ);
    const double w0sq = model.omega0 * model.omega0;
    const double gw = model.g * drive_value;
    const double projection = w0sq / (w0sq + gw * gw);
    const double divider = circ.C_c / circ.c_sigma();
    // omega / Q with Q = 1 / (omega C_J R)
    const double omega_over_q = circ.omega * circ.omega * circ.C_J * circ.R;
    const double n = bose_occupation_si(kHbar * circ.omega, temperature_kelvin);

    TransmonRate out;
    out.full = projection * divider * divider * omega_over_q * (n + 1.0);
    const double cc_over = circ.C_c / (circ.C_J + circ.C_c);
    out.approximation = cc_over * cc_over * circ.omega * circ.omega * circ.R * circ.C_J;
    return out;
}

double effective_kappa(const TransmonCircuit& circ) {
    validate(circ);
    const double divider = circ.C_c / circ.c_sigma();
    return divider * divider * circ.omega * circ.C_J * circ.R;
}

}  // namespace qheat
