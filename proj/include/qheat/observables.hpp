// observables.hpp: powers, trajectories, windings and spectrum analysis

#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qheat/analytic.hpp"
#include "qheat/errors.hpp"
#include "qheat/dissipation.hpp"
#include "qheat/lindblad.hpp"
#include "qheat/model.hpp"

namespace qheat {

struct CyclePower {
    std::vector<double> heat_per_cycle;  // per bath
    std::vector<double> power;           // per bath
    double total_power{0.0};
    double work_per_cycle{0.0};          // integral of Tr[rho dH/dt]
};

/// Heat flow into each bath, -Tr[H L_b rho], integrated over the stored
/// samples with the trapezoid rule. Positive means energy enters the bath.
CyclePower cycle_power_exact(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                             const CycleSolution& cycle);

struct BlochTrajectory {
    std::vector<Eigen::Vector3d> lab;    // (<sx>, <sy>, <sz>)
    std::vector<Eigen::Vector3d> eigen;  // 2 (R, I, D)
};

BlochTrajectory bloch_trajectory(const CycleSolution& cycle);

double min_purity(const CycleSolution& cycle);

/// Turns of the eigenframe coherence phasor (R, I) over one cycle.
/// Throws UndefinedWinding if |R + iI| < 1e-12 on more than 10% of samples.
int winding_number(const CycleSolution& cycle);

/// Corner states p, q, r, s read off a numerically integrated cycle at the
/// switching instants (tanh: T/4 and 3T/4; square: 0 and dt2).
CornerStates numeric_corners(const QubitDriveModel& model, const CycleSolution& cycle);

struct PowerSpectrumPoint {
    double f_L{0.0};                 // GHz
    std::optional<double> dt1{};     // ns, square-drive sweeps
    std::optional<double> P_total{}; // W
    std::optional<double> P1{};      // W, bath 1
    std::optional<double> P2{};      // W, bath 2
    std::optional<double> P_dimensionless{};
    std::optional<double> rho_ee_p{};
    std::optional<int> winding{};
    std::optional<double> purity_min{};
    bool converged{false};
    int cycles{0};
};

enum class PowerColumn { Total, Bath1, Bath2 };

std::optional<double> power_of(const PowerSpectrumPoint& point, PowerColumn column);

struct Peak {
    int n{0};
    double f_at_max{0.0};     // GHz
    double P_at_max{0.0};     // W
    double predicted_f{0.0};  // GHz
    double relative_offset{0.0};
};

struct PeakReport {
    std::vector<Peak> peaks;
    std::vector<NoPeak> missing;
};

/// Relative half-width of the window in which a maximum may match a prediction.
inline constexpr double kPeakMatchWindow = 0.25;

/// Local maxima by 3-point comparison with parabolic refinement, each
/// matched to the nearest prediction; the highest maximum per prediction wins.
PeakReport find_peaks(std::span<const PowerSpectrumPoint> spectrum, std::span<const PeakPrediction> predictions,
                      PowerColumn column = PowerColumn::Total);

struct CoolingWindow {
    double dt1_begin{0.0};
    double dt1_end{0.0};
    double min_P2{0.0};
};

/// Contiguous dt1 runs with P2 < 0 and P1 > 0. Empty for single-bath data.
std::vector<CoolingWindow> cooling_windows(std::span<const PowerSpectrumPoint> spectrum);

enum class StudyVariable { GapRatio, TanhSharpness };

struct AmplitudeEntry {
    double value{0.0};  // omega1/omega2 or a
    int n{0};
    double f_at_max{0.0};
    double P_max{0.0};  // W
    bool local_maximum{false};
};

struct StudyOptions {
    double half_width{0.03};  // relative search half-width around f_{L,n}
    int grid_points{41};
    int refine_iterations{30};
    bool strict{false};       // throw NoPeak when the max sits on the window edge
};

/// Maximum cycle power near each f_{L,n} while one drive parameter varies.
/// GapRatio keeps omega0 and sets g = omega0 sqrt(ratio^2 - 1) / 2.
std::vector<AmplitudeEntry> peak_amplitude_study(const QubitDriveModel& base, std::span<const BathCoupling> baths,
                                                 const IntegratorConfig& cfg, std::span<const int> orders,
                                                 StudyVariable variable, std::span<const double> values,
                                                 const StudyOptions& options = {});

/// Total cycle power in W at one tanh drive frequency (GHz).
double power_at_frequency(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                          const IntegratorConfig& cfg, double f_ghz);

}  // namespace qheat
