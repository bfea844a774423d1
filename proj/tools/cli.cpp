#include "qheat/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qheat/analytic.hpp"
#include "qheat/config.hpp"
#include "qheat/errors.hpp"
#include "qheat/observables.hpp"
#include "qheat/sweep.hpp"
#include "qheat/units.hpp"

namespace qheat {

namespace {

// Tolerances checked by analytic-compare.
constexpr double kCornerTolerance = 0.02;  // max component difference over the state norm
constexpr double kPowerTolerance = 0.05;

int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void write_provenance(const SweepResultSet& res, const std::string& csv_path) {
    nlohmann::json j;
    j["config_hash"] = res.provenance.config_hash;
    j["code_version"] = res.provenance.code_version;
    j["wall_time_s"] = res.provenance.wall_time_s;
    j["workers"] = res.provenance.workers;
    j["rows"] = res.rows.size();
    std::ofstream f(csv_path + ".provenance.json");
    f << j.dump(2) << '\n';
}

std::string fixed(double x, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

PowerColumn parse_column(const std::string& c, const ExperimentConfig& cfg) {
    if (c == "total") return PowerColumn::Total;
    if (c == "bath1") return PowerColumn::Bath1;
    if (c == "bath2") {
        if (cfg.baths.size() < 2) throw ValidationError({"--column bath2 needs a [bath.2] section"});
        return PowerColumn::Bath2;
    }
    return PowerColumn::Total;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_path, int workers, std::ostream& out) {
    const auto res = run_sweep(cfg, workers);
    const std::string path = out_path.empty() ? cfg.output.csv : out_path;
    if (path == "-") {
        out << format_csv(res.rows);
        return kExitOk;
    }
    write_csv(res, path);
    write_provenance(res, path);
    const auto failed = std::count_if(res.rows.begin(), res.rows.end(), [](const auto& r) { return !r.converged; });
    out << "wrote " << res.rows.size() << " rows to " << path << " (" << failed << " unconverged, "
        << fixed(res.provenance.wall_time_s, 1) << " s)\n";
    return kExitOk;
}

int cmd_trajectory(const ExperimentConfig& cfg, std::optional<double> value, const std::string& out_path,
                   std::ostream& out) {
    const auto model = build_model(cfg, value);
    const auto baths = build_baths(cfg);
    const auto cycle = find_steady_cycle(model, baths, cfg.integrator);
    const auto traj = bloch_trajectory(cycle);
    std::optional<int> winding;
    try {
        winding = winding_number(cycle);
    } catch (const UndefinedWinding&) {
    }
    const std::string path = out_path.empty() ? cfg.output.trajectory : out_path;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "t_ns,drive,x,y,z,R2,I2,D2,purity,winding\n";
    const auto& s = cycle.trajectory;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i % cfg.output.sample_stride != 0 && i + 1 != s.size()) continue;
        const auto& l = traj.lab[i];
        const auto& e = traj.eigen[i];
        f << format_double(s[i].t) << ',' << format_double(s[i].drive) << ',' << format_double(l.x()) << ','
          << format_double(l.y()) << ',' << format_double(l.z()) << ',' << format_double(e.x()) << ','
          << format_double(e.y()) << ',' << format_double(e.z()) << ',' << format_double(s[i].rho.purity())
          << ',' << (winding ? std::to_string(*winding) : std::string{}) << '\n';
    }
    out << "wrote trajectory to " << path << ": f_L = " << fixed(1.0 / cycle.period, 6)
        << " GHz, winding = " << (winding ? std::to_string(*winding) : "undefined")
        << ", P = " << fixed(units::power_to_femtowatt(cycle.total_power), 4) << " fW\n";
    return kExitOk;
}

int cmd_peaks(const ExperimentConfig& cfg, const std::string& column, int workers, std::ostream& out) {
    const auto res = run_sweep(cfg, workers);
    const auto predictions = sweep_predictions(cfg);
    const auto report = find_peaks(res.rows, predictions, parse_column(column, cfg));
    out << "n  predicted_GHz  found_GHz  offset_%   P_fW\n";
    for (const auto& p : report.peaks)
        out << std::setw(2) << p.n << "  " << std::setw(13) << fixed(p.predicted_f, 5) << "  " << std::setw(9)
            << fixed(p.f_at_max, 5) << "  " << std::setw(8) << fixed(100.0 * p.relative_offset, 3) << "  "
            << fixed(p.P_at_max * 1e15, 4) << '\n';
    for (const auto& m : report.missing)
        out << std::setw(2) << m.order << "  " << std::setw(13) << fixed(m.predicted_f, 5) << "  no peak\n";
    if (cfg.drive.kind == DriveKind::AsymmetricSquare && cfg.baths.size() > 1) {
        const auto windows = cooling_windows(res.rows);
        out << "cooling windows (dt1_ns):";
        if (windows.empty()) out << " none";
        out << '\n';
        for (const auto& w : windows)
            out << "  [" << fixed(w.dt1_begin, 4) << ", " << fixed(w.dt1_end, 4)
                << "]  min P2 = " << fixed(w.min_P2 * 1e15, 4) << " fW\n";
    }
    return kExitOk;
}

double corner_deviation(const BlochState& a, const BlochState& b) {
    const Eigen::Vector3d x = to_map_vector(a), y = to_map_vector(b);
    return (x - y).cwiseAbs().maxCoeff() / std::max(y.norm(), 1e-15);
}

int cmd_compare(const ExperimentConfig& cfg, std::optional<double> value, const std::string& form,
                std::ostream& out) {
    if (!value) {
        if (cfg.drive.kind == DriveKind::Tanh && !cfg.drive.f_GHz)
            value = resonance_frequencies(build_model(cfg, 1.0), 1).front().f_L_n;
        if (cfg.drive.kind == DriveKind::AsymmetricSquare && !cfg.drive.dt1_ns) {
            const double w1 = extremal_gaps(build_model(cfg, 1.0)).omega1;
            value = 2.0 * std::numbers::pi / w1;
        }
    }
    const auto model = build_model(cfg, value);
    const auto baths = build_baths(cfg);
    const auto cycle = find_steady_cycle(model, baths, cfg.integrator);
    const auto numeric = numeric_corners(model, cycle);

    auto params = map_params(model, baths);
    params.form = form == "exponential" ? ThermalLegForm::Exponential : ThermalLegForm::Linearized;
    const auto analytic = steady_state_fixed_point(params);
    const auto mp = map_power(params, analytic);

    bool ok = true;
    out << "f_L = " << fixed(1.0 / cycle.period, 6) << " GHz, map form " << form << "\n";
    out << "corner     numeric (D, R, I)                      analytic (D, R, I)                     dev\n";
    const std::array<std::pair<const char*, std::pair<BlochState, BlochState>>, 4> corners{{
        {"p", {numeric.p, analytic.p}},
        {"q", {numeric.q, analytic.q}},
        {"r", {numeric.r, analytic.r}},
        {"s", {numeric.s, analytic.s}},
    }};
    for (const auto& [name, pair] : corners) {
        const auto& [n, a] = pair;
        const double dev = corner_deviation(n, a);
        ok = ok && dev <= kCornerTolerance;
        out << "  " << name << "  (" << fixed(n.D, 6) << ", " << fixed(n.R, 6) << ", " << fixed(n.I, 6) << ")   ("
            << fixed(a.D, 6) << ", " << fixed(a.R, 6) << ", " << fixed(a.I, 6) << ")   " << fixed(100.0 * dev, 2)
            << "%" << (dev <= kCornerTolerance ? "" : "  EXCEEDS") << '\n';
    }
    const double pn = cycle.total_power, pa = mp.total;
    const double rel = std::abs(pa - pn) / std::max(std::abs(pn), 1e-300);
    ok = ok && rel <= kPowerTolerance;
    out << "power numeric " << fixed(units::power_to_femtowatt(pn), 5) << " fW, analytic "
        << fixed(units::power_to_femtowatt(pa), 5) << " fW, deviation " << fixed(100.0 * rel, 2) << "%"
        << (rel <= kPowerTolerance ? "" : "  EXCEEDS") << '\n';
    out << (ok ? "within tolerance\n" : "tolerance exceeded\n");
    return ok ? kExitOk : kExitTolerance;
}

int cmd_predict(const ExperimentConfig& cfg, int orders, std::ostream& out) {
    auto model = build_model(cfg, cfg.drive.kind == DriveKind::Tanh ? std::optional<double>(1.0)
                                                                    : std::optional<double>(cfg.sweep.start));
    const auto [w1, w2] = extremal_gaps(model);
    QubitDriveModel tanh_model = model;
    if (!std::holds_alternative<TanhCosine>(model.drive)) tanh_model.drive = TanhCosine{8.0, 1.0};
    QubitDriveModel square_model = model;
    const double dt2 = cfg.drive.kind == DriveKind::AsymmetricSquare ? cfg.drive.dt2_ns : std::numbers::pi / w2;
    square_model.drive = AsymmetricSquare{1.0, dt2};

    out << "omega1/2pi = " << fixed(units::angular_to_ghz(w1), 5) << " GHz, omega2/2pi = "
        << fixed(units::angular_to_ghz(w2), 5) << " GHz\n";
    out << "resonances f_L,n = f_M / n (GHz)\n";
    for (const auto& p : resonance_frequencies(tanh_model, orders))
        out << "  n = " << p.n << "  " << fixed(p.f_L_n, 3) << '\n';
    out << "asymmetric drive, dt2 = " << fixed(dt2, 5) << " ns (GHz, dt1 in ns)\n";
    for (const auto& p : resonance_frequencies(square_model, orders))
        out << "  n = " << p.n << "  " << fixed(p.f_L_n, 3) << "  dt1 = " << fixed(1.0 / p.f_L_n - dt2, 5)
            << '\n';
    return kExitOk;
}

int cmd_study(const ExperimentConfig& cfg, std::ostream& out) {
    if (!cfg.study) throw ValidationError({"config has no [study] section"});
    const auto& s = *cfg.study;
    const auto model = build_model(cfg, 1.0);
    const auto baths = build_baths(cfg);
    StudyOptions opt;
    opt.half_width = s.half_width;
    opt.grid_points = s.grid_points;
    const auto entries =
        peak_amplitude_study(model, baths, cfg.integrator, s.orders,
                             s.gap_ratio ? StudyVariable::GapRatio : StudyVariable::TanhSharpness, s.values, opt);
    out << (s.gap_ratio ? "omega1/omega2" : "a") << "  n  f_at_max_GHz  P_max_fW  local_max\n";
    for (const auto& e : entries)
        out << fixed(e.value, 4) << "  " << e.n << "  " << fixed(e.f_at_max, 5) << "  " << fixed(e.P_max * 1e15, 5)
            << "  " << (e.local_maximum ? "yes" : "no") << '\n';
    return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum heat of a driven qubit: sweeps, trajectories and analytic comparisons", "qheat"};
    app.require_subcommand(1);

    std::string config;
    std::string out_path;
    std::string column = "total";
    std::string form = "linearized";
    int workers = default_workers();
    int orders = 6;
    std::optional<double> f_ghz, dt1_ns;

    auto* sweep = app.add_subcommand("sweep", "Run the configured sweep and write CSV");
    auto* traj = app.add_subcommand("trajectory", "Dump one steady cycle in lab and eigen frames");
    auto* peaks = app.add_subcommand("peaks", "Sweep and report peaks against predictions");
    auto* compare = app.add_subcommand("analytic-compare", "Numeric vs analytic corner states and power");
    auto* predict = app.add_subcommand("predict", "Print predicted resonance frequencies");
    auto* study = app.add_subcommand("study", "Peak amplitudes across the [study] values");

    for (auto* sub : {sweep, traj, peaks, compare, predict, study})
        sub->add_option("config", config, "Config file or preset name (fig1c, fig1d, fig1e, fig3)")->required();
    for (auto* sub : {sweep, peaks}) sub->add_option("-j,--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    for (auto* sub : {sweep, traj}) sub->add_option("-o,--out", out_path, "Output path ('-' for stdout with sweep)");
    for (auto* sub : {traj, compare}) {
        sub->add_option("--f-ghz", f_ghz, "Drive frequency in GHz (tanh)");
        sub->add_option("--dt1-ns", dt1_ns, "High-gap leg in ns (asymmetric square)");
    }
    peaks->add_option("--column", column, "Power column")->check(CLI::IsMember({"total", "bath1", "bath2"}));
    compare->add_option("--form", form, "Thermal-leg form")->check(CLI::IsMember({"linearized", "exponential"}));
    predict->add_option("-n,--orders", orders, "Number of orders")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    try {
        const auto cfg = load_config(config);
        const auto value = f_ghz ? f_ghz : dt1_ns;
        if (f_ghz && dt1_ns) throw ValidationError({"give either --f-ghz or --dt1-ns"});
        if (f_ghz && cfg.drive.kind != DriveKind::Tanh) throw ValidationError({"--f-ghz needs kind = tanh"});
        if (dt1_ns && cfg.drive.kind != DriveKind::AsymmetricSquare)
            throw ValidationError({"--dt1-ns needs kind = asymmetric_square"});
        if (*sweep) return cmd_sweep(cfg, out_path, workers, out);
        if (*traj) return cmd_trajectory(cfg, value, out_path, out);
        if (*peaks) return cmd_peaks(cfg, column, workers, out);
        if (*compare) return cmd_compare(cfg, value, form, out);
        if (*predict) return cmd_predict(cfg, orders, out);
        if (*study) return cmd_study(cfg, out);
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitValidation;
}

}  // namespace qheat
