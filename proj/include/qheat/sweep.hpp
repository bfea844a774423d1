// sweep.hpp: parameter sweeps, CSV persistence

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qheat/config.hpp"
#include "qheat/observables.hpp"

namespace qheat {

struct Provenance {
    std::uint64_t config_hash{0};
    std::string code_version;
    double wall_time_s{0.0};
    int workers{1};
};

struct SweepResultSet {
    std::vector<PowerSpectrumPoint> rows;  // grid order
    Provenance provenance;
};

inline constexpr std::string_view kCodeVersion = "qheat 1.0.0";

/// Uniform grid over [start, stop] plus, when enabled, refine_factor times
/// denser points within +-refine_window of each predicted resonance.
std::vector<double> sweep_grid(const ExperimentConfig& cfg);

/// Predicted resonances for every order whose drive frequency lies inside
/// the sweep range, so that each maximum can find its own prediction.
std::vector<PeakPrediction> sweep_predictions(const ExperimentConfig& cfg);

/// One sweep row for a grid value. Failures are recorded, never thrown.
PowerSpectrumPoint evaluate_point(const ExperimentConfig& cfg, double value);

/// Runs the grid on a bounded pool of workers; rows keep grid order.
SweepResultSet run_sweep(const ExperimentConfig& cfg, int workers = 1);

inline constexpr std::string_view kCsvHeader =
    "f_L_GHz,dt1_ns,P_total_fW,P1_fW,P2_fW,P_dimensionless,rho_ee_p,winding,purity_min,converged,cycles";

/// Shortest round-trip decimal form.
std::string format_double(double x);

std::string format_csv(const std::vector<PowerSpectrumPoint>& rows);
void write_csv(const SweepResultSet& results, const std::string& path);

/// Parses a CSV produced by format_csv. Power columns come back in fW.
struct CsvRow {
    double f_L_GHz{0.0};
    std::optional<double> dt1_ns, P_total_fW, P1_fW, P2_fW, P_dimensionless, rho_ee_p;
    std::optional<int> winding;
    std::optional<double> purity_min;
    bool converged{false};
    int cycles{0};
};
std::vector<CsvRow> parse_csv(std::string_view text);

/// Converts parsed rows back into spectrum points (powers in W).
std::vector<PowerSpectrumPoint> to_spectrum(const std::vector<CsvRow>& rows);

}  // namespace qheat
