#include "qheat/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "qheat/errors.hpp"
#include "qheat/units.hpp"

namespace qheat {

std::vector<double> sweep_grid(const ExperimentConfig& cfg) {
    const auto& s = cfg.sweep;
    std::vector<double> grid;
    if (s.points == 1) return {s.start};
    const double h = (s.stop - s.start) / (s.points - 1);
    for (int i = 0; i < s.points; ++i) grid.push_back(i + 1 == s.points ? s.stop : s.start + i * h);

    if (s.refine_peaks && h > 0.0) {
        const auto model = build_model(cfg, s.start);
        for (const auto& p : resonance_frequencies(model, s.refine_orders)) {
            const double centre =
                s.variable == SweepVariable::DriveFrequency ? p.f_L_n : 1.0 / p.f_L_n - cfg.drive.dt2_ns;
            const double lo = std::max(s.start, centre * (1.0 - s.refine_window));
            const double hi = std::min(s.stop, centre * (1.0 + s.refine_window));
            const double fine = h / s.refine_factor;
            for (double x = lo; x <= hi; x += fine) grid.push_back(x);
        }
        std::sort(grid.begin(), grid.end());
        std::vector<double> unique;
        for (double x : grid)
            if (unique.empty() || x - unique.back() > 1e-9 * std::abs(x)) unique.push_back(x);
        grid = std::move(unique);
    }
    return grid;
}

std::vector<PeakPrediction> sweep_predictions(const ExperimentConfig& cfg) {
    const auto& s = cfg.sweep;
    double f_lo = s.start, f_hi = s.stop;
    if (s.variable == SweepVariable::Dt1) {
        f_lo = 1.0 / (s.stop + cfg.drive.dt2_ns);
        f_hi = 1.0 / (s.start + cfg.drive.dt2_ns);
    }
    const auto model = build_model(cfg, s.start);
    const auto first = resonance_frequencies(model, 1);
    if (first.empty()) return {};
    // f_{L,n} falls roughly like 1/n; bound the order generously.
    const int n_max = static_cast<int>(std::ceil(first.front().f_L_n * 2.0 / f_lo)) + 2;
    std::vector<PeakPrediction> out;
    for (const auto& p : resonance_frequencies(model, n_max))
        if (p.f_L_n >= f_lo && p.f_L_n <= f_hi) out.push_back(p);
    return out;
}

PowerSpectrumPoint evaluate_point(const ExperimentConfig& cfg, double value) {
    PowerSpectrumPoint row;
    const auto model = build_model(cfg, value);
    const auto baths = build_baths(cfg);
    const double period = drive_period(model.drive);
    row.f_L = 1.0 / period;
    if (cfg.drive.kind == DriveKind::AsymmetricSquare) row.dt1 = value;
    try {
        const auto cycle = find_steady_cycle(model, baths, cfg.integrator);
        row.converged = cycle.converged;
        row.cycles = cycle.cycles_to_converge;
        row.P_total = units::power_to_watt(cycle.total_power);
        row.P1 = units::power_to_watt(cycle.power.at(0));
        if (cycle.power.size() > 1) row.P2 = units::power_to_watt(cycle.power[1]);
        row.P_dimensionless =
            cycle.total_power * 2.0 * std::numbers::pi / (model.omega0 * drive_angular_frequency(model.drive));
        row.rho_ee_p = numeric_corners(model, cycle).p.rho_ee();
        try {
            row.winding = winding_number(cycle);
        } catch (const UndefinedWinding&) {
        }
        row.purity_min = min_purity(cycle);
    } catch (const NotConverged& e) {
        row.converged = false;
        row.cycles = e.cycles;
    } catch (const StepUnstable&) {
        row.converged = false;
    }
    return row;
}

SweepResultSet run_sweep(const ExperimentConfig& cfg, int workers) {
    const auto start = std::chrono::steady_clock::now();
    const auto grid = sweep_grid(cfg);
    // Construction errors surface here, before any worker starts.
    build_model(cfg, grid.front());
    build_baths(cfg);

    SweepResultSet out;
    out.rows.resize(grid.size());
    workers = std::clamp(workers, 1, static_cast<int>(grid.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) out.rows[i] = evaluate_point(cfg, grid[i]);
    };
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    out.provenance.config_hash = config_hash(cfg.source);
    out.provenance.code_version = std::string(kCodeVersion);
    out.provenance.workers = workers;
    out.provenance.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

namespace {

std::string opt(const std::optional<double>& v, double scale = 1.0) {
    if (!v || !std::isfinite(*v)) return {};
    return format_double(*v * scale);
}

constexpr double kFemto = 1e15;

}  // namespace

std::string format_csv(const std::vector<PowerSpectrumPoint>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += format_double(r.f_L) + ',' + opt(r.dt1) + ',' + opt(r.P_total, kFemto) + ',' + opt(r.P1, kFemto) +
               ',' + opt(r.P2, kFemto) + ',' + opt(r.P_dimensionless) + ',' + opt(r.rho_ee_p) + ',' +
               (r.winding ? std::to_string(*r.winding) : std::string{}) + ',' + opt(r.purity_min) + ',' +
               (r.converged ? "true" : "false") + ',' + std::to_string(r.cycles) + '\n';
    }
    return out;
}

void write_csv(const SweepResultSet& results, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << format_csv(results.rows);
    if (!f) throw std::runtime_error("write failed for " + path);
}

std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    std::size_t pos = 0;
    int line_no = 0;
    auto number = [&](std::string_view s, const char* key) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line_no, key, "bad number");
        return v;
    };
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kCsvHeader) throw ParseError(1, "header", "unexpected CSV header");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::size_t b = 0;
        while (true) {
            const auto c = line.find(',', b);
            f.push_back(line.substr(b, c == std::string_view::npos ? std::string_view::npos : c - b));
            if (c == std::string_view::npos) break;
            b = c + 1;
        }
        if (f.size() != 11) throw ParseError(line_no, "", "expected 11 fields");
        CsvRow r;
        r.f_L_GHz = number(f[0], "f_L_GHz").value_or(0.0);
        r.dt1_ns = number(f[1], "dt1_ns");
        r.P_total_fW = number(f[2], "P_total_fW");
        r.P1_fW = number(f[3], "P1_fW");
        r.P2_fW = number(f[4], "P2_fW");
        r.P_dimensionless = number(f[5], "P_dimensionless");
        r.rho_ee_p = number(f[6], "rho_ee_p");
        if (auto w = number(f[7], "winding")) r.winding = static_cast<int>(*w);
        r.purity_min = number(f[8], "purity_min");
        if (f[9] != "true" && f[9] != "false") throw ParseError(line_no, "converged", "expected true or false");
        r.converged = f[9] == "true";
        r.cycles = static_cast<int>(number(f[10], "cycles").value_or(0));
        rows.push_back(r);
    }
    return rows;
}

std::vector<PowerSpectrumPoint> to_spectrum(const std::vector<CsvRow>& rows) {
    std::vector<PowerSpectrumPoint> out;
    auto watt = [](const std::optional<double>& fw) -> std::optional<double> {
        if (!fw) return std::nullopt;
        return *fw / kFemto;
    };
    for (const auto& r : rows) {
        PowerSpectrumPoint p;
        p.f_L = r.f_L_GHz;
        p.dt1 = r.dt1_ns;
        p.P_total = watt(r.P_total_fW);
        p.P1 = watt(r.P1_fW);
        p.P2 = watt(r.P2_fW);
        p.P_dimensionless = r.P_dimensionless;
        p.rho_ee_p = r.rho_ee_p;
        p.winding = r.winding;
        p.purity_min = r.purity_min;
        p.converged = r.converged;
        p.cycles = r.cycles;
        out.push_back(p);
    }
    return out;
}

}  // namespace qheat
