// config.hpp: experiment configuration (sectioned key = value text)

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qheat/dissipation.hpp"
#include "qheat/lindblad.hpp"
#include "qheat/model.hpp"

namespace qheat {

enum class DriveKind { Tanh, AsymmetricSquare };
enum class SweepVariable { DriveFrequency, Dt1 };

struct QubitBlock {
    double omega0_GHz{0.0};
    double g_GHz{0.0};
};

struct DriveBlock {
    DriveKind kind{DriveKind::Tanh};
    double a{0.0};
    std::optional<double> f_GHz{};   // single-point drive frequency (tanh)
    std::optional<double> dt1_ns{};  // single-point high leg (square)
    double dt2_ns{0.0};
};

struct SweepBlock {
    SweepVariable variable{SweepVariable::DriveFrequency};
    double start{0.0};  // GHz or ns
    double stop{0.0};
    int points{0};
    bool refine_peaks{false};
    int refine_orders{6};
    double refine_window{0.05};
    int refine_factor{8};
};

struct BathBlock {
    double kappa{0.0};
    double T_mK{0.0};
    std::optional<double> filter_Q{};
    std::optional<double> filter_f_GHz{};
    ActiveBranch active_branch{ActiveBranch::Always};
    bool pure_dephasing{false};
};

struct OutputBlock {
    std::string csv{"sweep.csv"};
    std::string trajectory{"trajectory.csv"};
    int sample_stride{1};
};

struct StudyBlock {
    bool gap_ratio{true};  // false: tanh sharpness a
    std::vector<double> values;
    std::vector<int> orders{1, 2, 3, 4};
    double half_width{0.03};
    int grid_points{41};
};

struct ExperimentConfig {
    QubitBlock qubit;
    DriveBlock drive;
    SweepBlock sweep;
    std::vector<BathBlock> baths;
    IntegratorConfig integrator;
    OutputBlock output;
    std::optional<StudyBlock> study;
    std::string source;  // original text, hashed into provenance
};

/// Parses and validates. Throws ParseError on malformed text or unknown
/// keys, ValidationError listing every violated constraint.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::string& path_or_preset);

/// Names of the presets compiled into the library.
std::vector<std::string> preset_names();
std::optional<std::string_view> preset_text(std::string_view name);

/// Library objects built from a config. For the tanh drive the frequency is
/// taken from drive.f_GHz unless given; for the square drive dt1 likewise.
QubitDriveModel build_model(const ExperimentConfig& cfg, std::optional<double> sweep_value = {});
std::vector<BathCoupling> build_baths(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the config text.
std::uint64_t config_hash(std::string_view text);

}  // namespace qheat
