// model.hpp: driven qubit, drive waveforms and spectral predictions
//
// H(t) = (g Omega(t) / 2) sigma_z + (omega0 / 2) sigma_x, hbar = 1.
// All angular frequencies are in rad/ns, times in ns.

#pragma once

#include <variant>
#include <vector>

namespace qheat {

/// Omega(t) = 1 + tanh(a cos(omega_L t)) / tanh(a). Starts at Omega = 2.
struct TanhCosine {
    double a{8.0};
    double omega_L{1.0};
};

/// Omega = 0 for dt2, then Omega = 2 for dt1. The cycle starts at the
/// beginning of the Omega = 0 leg.
struct AsymmetricSquare {
    double dt1{1.0};
    double dt2{1.0};
};

using DriveWaveform = std::variant<TanhCosine, AsymmetricSquare>;

struct QubitDriveModel {
    double omega0{1.0};  // minimum transition frequency
    double g{0.0};       // drive amplitude
    DriveWaveform drive{TanhCosine{}};
};

/// Below this a the tanh ratio is replaced by its limit cos(omega_L t).
inline constexpr double kSinusoidalLimitA = 1e-4;

void validate(const DriveWaveform& drive);
void validate(const QubitDriveModel& model);

double drive_period(const DriveWaveform& drive);
double drive_angular_frequency(const DriveWaveform& drive);

double waveform_value(const DriveWaveform& drive, double t);

/// dOmega/dt. Zero inside square-wave legs; the jumps are not represented.
double waveform_derivative(const DriveWaveform& drive, double t);

/// Switching instants within one period for square drives, empty otherwise.
std::vector<double> switching_times(const DriveWaveform& drive);

/// Instantaneous gap sqrt(g^2 Omega^2 + omega0^2) for a given Omega.
double gap_for_drive(const QubitDriveModel& model, double drive_value);
double gap_angular_frequency(const QubitDriveModel& model, double t);

struct ExtremalGaps {
    double omega1;  // Omega = 2
    double omega2;  // Omega = 0
};

ExtremalGaps extremal_gaps(const QubitDriveModel& model);

/// eta = sqrt(1 - omega2^2 / omega1^2), the sine of the sudden-switch angle.
double mixing_eta(const QubitDriveModel& model);

/// Closed-form dynamical phase over one period.
double dynamical_phase(const QubitDriveModel& model);

/// Time integral of the instantaneous gap over one period (composite
/// Simpson rule). Differs from dynamical_phase at intermediate a.
double integrated_phase(const QubitDriveModel& model, int intervals = 1 << 14);

struct PeakPrediction {
    int n{1};
    double f_L_n{0.0};  // GHz
    double f_M{0.0};    // GHz
};

/// f_M / n for the tanh drive; for the square drive, the drive frequencies
/// 1/(dt1 + dt2) at fixed dt2 where omega1 dt1 + omega2 dt2 = 2 n pi.
/// Orders whose dt1 would be non-positive are skipped.
std::vector<PeakPrediction> resonance_frequencies(const QubitDriveModel& model, int n_max);

/// Same model with the tanh drive frequency replaced.
QubitDriveModel with_drive_frequency(const QubitDriveModel& model, double f_ghz);

}  // namespace qheat
