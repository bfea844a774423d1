#include "qheat/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qheat/errors.hpp"
#include "qheat/units.hpp"

namespace qheat {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double phase_in_period(double t, double period) {
    double tau = std::fmod(t, period);
    if (tau < 0.0) tau += period;
    return tau;
}

}  // namespace

void validate(const DriveWaveform& drive) {
    std::visit(overloaded{
                   [](const TanhCosine& d) {
                       if (!(d.a > 0.0) || !std::isfinite(d.a))
                           throw DomainError("tanh drive requires a > 0");
                       if (!(d.omega_L > 0.0) || !std::isfinite(d.omega_L))
                           throw DomainError("drive frequency must be positive");
                   },
                   [](const AsymmetricSquare& d) {
                       if (!(d.dt1 > 0.0) || !(d.dt2 > 0.0) || !std::isfinite(d.dt1 + d.dt2))
                           throw DomainError("square drive requires dt1 > 0 and dt2 > 0");
                   },
               },
               drive);
}

void validate(const QubitDriveModel& model) {
    if (!(model.omega0 > 0.0) || !std::isfinite(model.omega0))
        throw DomainError("omega0 must be positive");
    if (!(model.g >= 0.0) || !std::isfinite(model.g)) throw DomainError("g must be non-negative");
    validate(model.drive);
}

double drive_period(const DriveWaveform& drive) {
    return std::visit(overloaded{
                          [](const TanhCosine& d) { return kTwoPi / d.omega_L; },
                          [](const AsymmetricSquare& d) { return d.dt1 + d.dt2; },
                      },
                      drive);
}

double drive_angular_frequency(const DriveWaveform& drive) { return kTwoPi / drive_period(drive); }

double waveform_value(const DriveWaveform& drive, double t) {
    return std::visit(overloaded{
                          [t](const TanhCosine& d) {
                              const double c = std::cos(d.omega_L * phase_in_period(t, kTwoPi / d.omega_L));
                              if (d.a < kSinusoidalLimitA) return 1.0 + c;
                              return 1.0 + std::tanh(d.a * c) / std::tanh(d.a);
                          },
                          [t](const AsymmetricSquare& d) {
                              return phase_in_period(t, d.dt1 + d.dt2) < d.dt2 ? 0.0 : 2.0;
                          },
                      },
                      drive);
}

double waveform_derivative(const DriveWaveform& drive, double t) {
    return std::visit(overloaded{
                          [t](const TanhCosine& d) {
                              const double x = d.omega_L * phase_in_period(t, kTwoPi / d.omega_L);
                              const double s = -d.omega_L * std::sin(x);
                              if (d.a < kSinusoidalLimitA) return s;
                              const double ch = std::cosh(d.a * std::cos(x));
                              return d.a * s / (ch * ch * std::tanh(d.a));
                          },
                          [](const AsymmetricSquare&) { return 0.0; },
                      },
                      drive);
}

std::vector<double> switching_times(const DriveWaveform& drive) {
    if (const auto* sq = std::get_if<AsymmetricSquare>(&drive)) return {sq->dt2, sq->dt1 + sq->dt2};
    return {};
}

double gap_for_drive(const QubitDriveModel& model, double drive_value) {
    return std::hypot(model.g * drive_value, model.omega0);
}

double gap_angular_frequency(const QubitDriveModel& model, double t) {
    return gap_for_drive(model, waveform_value(model.drive, t));
}

ExtremalGaps extremal_gaps(const QubitDriveModel& model) {
    return {gap_for_drive(model, 2.0), model.omega0};
}

double mixing_eta(const QubitDriveModel& model) {
    // 2g / omega1 equals sqrt(1 - omega2^2/omega1^2) without the cancellation.
    return 2.0 * model.g / gap_for_drive(model, 2.0);
}

double dynamical_phase(const QubitDriveModel& model) {
    const auto [w1, w2] = extremal_gaps(model);
    return std::visit(overloaded{
                          [&](const TanhCosine& d) { return (w1 + w2) * std::numbers::pi / d.omega_L; },
                          [&](const AsymmetricSquare& d) { return w1 * d.dt1 + w2 * d.dt2; },
                      },
                      model.drive);
}

double integrated_phase(const QubitDriveModel& model, int intervals) {
    if (const auto* sq = std::get_if<AsymmetricSquare>(&model.drive)) {
        const auto [w1, w2] = extremal_gaps(model);
        return w1 * sq->dt1 + w2 * sq->dt2;
    }
    if (intervals % 2 != 0) ++intervals;
    const double period = drive_period(model.drive);
    const double h = period / intervals;
    double sum = gap_angular_frequency(model, 0.0) + gap_angular_frequency(model, period);
    for (int k = 1; k < intervals; ++k)
        sum += (k % 2 == 1 ? 4.0 : 2.0) * gap_angular_frequency(model, k * h);
    return sum * h / 3.0;
}

std::vector<PeakPrediction> resonance_frequencies(const QubitDriveModel& model, int n_max) {
    if (n_max < 1) throw DomainError("n_max must be at least 1");
    const auto [w1, w2] = extremal_gaps(model);
    const double f_m = (w1 + w2) / (4.0 * std::numbers::pi);
    std::vector<PeakPrediction> out;
    out.reserve(static_cast<std::size_t>(n_max));
    if (const auto* sq = std::get_if<AsymmetricSquare>(&model.drive)) {
        for (int n = 1; n <= n_max; ++n) {
            const double dt1 = (kTwoPi * n - w2 * sq->dt2) / w1;
            if (dt1 <= 0.0) continue;
            out.push_back({n, 1.0 / (dt1 + sq->dt2), f_m});
        }
        return out;
    }
    for (int n = 1; n <= n_max; ++n) out.push_back({n, f_m / n, f_m});
    return out;
}

QubitDriveModel with_drive_frequency(const QubitDriveModel& model, double f_ghz) {
    QubitDriveModel out = model;
    if (auto* d = std::get_if<TanhCosine>(&out.drive)) {
        d->omega_L = units::ghz_to_angular(f_ghz);
    } else {
        throw DomainError("drive frequency can only be set on the tanh drive");
    }
    return out;
}

}  // namespace qheat
