#include "qheat/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qheat/errors.hpp"
#include "qheat/units.hpp"

namespace qheat {

namespace {

constexpr double kPhasorFloor = 1e-12;

Eigen::Vector3d lab_vector_at(const CycleSolution& cycle, double t) {
    const auto& tr = cycle.trajectory;
    auto it = std::lower_bound(tr.begin(), tr.end(), t,
                               [](const TrajectorySample& s, double value) { return s.t < value; });
    if (it == tr.begin()) return it->rho.bloch();
    if (it == tr.end()) return tr.back().rho.bloch();
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (hi.t == lo.t) return hi.rho.bloch();
    const double w = (t - lo.t) / (hi.t - lo.t);
    return (1.0 - w) * lo.rho.bloch() + w * hi.rho.bloch();
}

// Vertex of the parabola through three points with non-uniform spacing.
std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double curvature = (d2 - d1) / (x2 - x0);
    if (!(curvature < 0.0)) return {x1, y1};
    const double slope = d1 - curvature * (x0 + x1);  // y = c x^2 + slope x + k
    const double xv = std::clamp(-slope / (2.0 * curvature), x0, x2);
    const double yv = y1 + d1 * (xv - x1) + curvature * (xv - x0) * (xv - x1);
    return {xv, yv};
}

QubitDriveModel study_model(const QubitDriveModel& base, StudyVariable variable, double value) {
    QubitDriveModel m = base;
    if (variable == StudyVariable::GapRatio) {
        if (!(value >= 1.0)) throw DomainError("gap ratio must be at least 1");
        m.g = 0.5 * base.omega0 * std::sqrt(value * value - 1.0);
    } else {
        auto* d = std::get_if<TanhCosine>(&m.drive);
        if (d == nullptr) throw DomainError("sharpness study needs the tanh drive");
        d->a = value;
    }
    return m;
}

}  // namespace

CyclePower cycle_power_exact(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                             const CycleSolution& cycle) {
    CyclePower out;
    out.heat_per_cycle.assign(baths.size(), 0.0);
    const auto& tr = cycle.trajectory;
    if (tr.size() < 2) return out;

    std::vector<double> prev(baths.size());
    auto rates_at_sample = [&](const TrajectorySample& s, std::vector<double>& dst) {
        const Eigen::Vector3d r = s.rho.bloch();
        for (std::size_t b = 0; b < baths.size(); ++b) dst[b] = heat_rate(model, baths[b], r, s.drive);
    };
    auto work_rate = [&](const TrajectorySample& s) {
        return 0.5 * model.g * waveform_derivative(model.drive, s.t) * s.rho.bloch().z();
    };

    rates_at_sample(tr.front(), prev);
    double prev_work = work_rate(tr.front());
    std::vector<double> cur(baths.size());
    for (std::size_t k = 1; k < tr.size(); ++k) {
        const double dt = tr[k].t - tr[k - 1].t;
        rates_at_sample(tr[k], cur);
        const double cur_work = work_rate(tr[k]);
        if (dt > 0.0) {
            for (std::size_t b = 0; b < baths.size(); ++b) out.heat_per_cycle[b] += 0.5 * dt * (prev[b] + cur[b]);
            out.work_per_cycle += 0.5 * dt * (prev_work + cur_work);
        } else {
            // sudden switch: the state is unchanged while H jumps
            out.work_per_cycle += 0.5 * model.g * (tr[k].drive - tr[k - 1].drive) * tr[k].rho.bloch().z();
        }
        prev.swap(cur);
        prev_work = cur_work;
    }
    if (tr.back().drive != tr.front().drive)
        out.work_per_cycle += 0.5 * model.g * (tr.front().drive - tr.back().drive) * tr.back().rho.bloch().z();

    const double period = tr.back().t - tr.front().t;
    out.power.resize(baths.size());
    for (std::size_t b = 0; b < baths.size(); ++b) {
        out.power[b] = out.heat_per_cycle[b] / period;
        out.total_power += out.power[b];
    }
    return out;
}

BlochTrajectory bloch_trajectory(const CycleSolution& cycle) {
    BlochTrajectory out;
    out.lab.reserve(cycle.trajectory.size());
    out.eigen.reserve(cycle.trajectory.size());
    for (const auto& s : cycle.trajectory) {
        out.lab.push_back(s.rho.bloch());
        out.eigen.push_back(2.0 * Eigen::Vector3d(s.eigen.R, s.eigen.I, s.eigen.D));
    }
    return out;
}

double min_purity(const CycleSolution& cycle) {
    double p = std::numeric_limits<double>::infinity();
    for (const auto& s : cycle.trajectory) p = std::min(p, s.rho.purity());
    return p;
}

int winding_number(const CycleSolution& cycle) {
    const auto& tr = cycle.trajectory;
    if (tr.size() < 2) throw UndefinedWinding("trajectory too short");
    std::size_t small = 0;
    for (const auto& s : tr)
        if (std::hypot(s.eigen.R, s.eigen.I) < kPhasorFloor) ++small;
    if (small * 10 > tr.size()) throw UndefinedWinding("coherence phasor vanishes over the cycle");

    double total = 0.0;
    bool have_prev = false;
    double prev_angle = 0.0;
    for (const auto& s : tr) {
        if (std::hypot(s.eigen.R, s.eigen.I) < kPhasorFloor) continue;
        const double angle = std::atan2(s.eigen.I, s.eigen.R);
        if (have_prev) total += std::remainder(angle - prev_angle, kTwoPi);
        prev_angle = angle;
        have_prev = true;
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

CornerStates numeric_corners(const QubitDriveModel& model, const CycleSolution& cycle) {
    const double theta_low = eigenbasis_for_drive(model, 0.0).mixing_angle;
    const double theta_high = eigenbasis_for_drive(model, 2.0).mixing_angle;
    double t_down = 0.0;
    double t_up = 0.0;
    if (const auto* sq = std::get_if<AsymmetricSquare>(&model.drive)) {
        t_down = 0.0;
        t_up = sq->dt2;
    } else {
        t_down = 0.25 * cycle.period;
        t_up = 0.75 * cycle.period;
    }
    const Eigen::Vector3d at_down = lab_vector_at(cycle, t_down);
    const Eigen::Vector3d at_up = lab_vector_at(cycle, t_up);
    CornerStates c;
    c.p = to_eigenframe(at_down, theta_low);
    c.q = to_eigenframe(at_up, theta_low);
    c.r = to_eigenframe(at_up, theta_high);
    c.s = to_eigenframe(at_down, theta_high);
    return c;
}

std::optional<double> power_of(const PowerSpectrumPoint& point, PowerColumn column) {
    switch (column) {
        case PowerColumn::Total: return point.P_total;
        case PowerColumn::Bath1: return point.P1;
        case PowerColumn::Bath2: return point.P2;
    }
    return std::nullopt;
}

PeakReport find_peaks(std::span<const PowerSpectrumPoint> spectrum, std::span<const PeakPrediction> predictions,
                      PowerColumn column) {
    struct Sample {
        double f;
        double p;
    };
    std::vector<Sample> pts;
    pts.reserve(spectrum.size());
    for (const auto& row : spectrum) {
        const auto p = power_of(row, column);
        if (row.converged && p) pts.push_back({row.f_L, *p});
    }
    std::sort(pts.begin(), pts.end(), [](const Sample& a, const Sample& b) { return a.f < b.f; });

    PeakReport report;
    std::vector<std::optional<Peak>> best(predictions.size());
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        if (!(pts[i].p > pts[i - 1].p && pts[i].p >= pts[i + 1].p)) continue;
        const auto [fv, pv] = parabola_vertex(pts[i - 1].f, pts[i - 1].p, pts[i].f, pts[i].p, pts[i + 1].f, pts[i + 1].p);
        std::size_t nearest = predictions.size();
        double nearest_offset = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < predictions.size(); ++k) {
            const double off = std::abs(fv - predictions[k].f_L_n) / predictions[k].f_L_n;
            if (off < nearest_offset) {
                nearest_offset = off;
                nearest = k;
            }
        }
        if (nearest == predictions.size() || nearest_offset > kPeakMatchWindow) continue;
        if (!best[nearest] || pv > best[nearest]->P_at_max)
            best[nearest] = Peak{predictions[nearest].n, fv, pv, predictions[nearest].f_L_n, nearest_offset};
    }
    for (std::size_t k = 0; k < predictions.size(); ++k) {
        if (best[k]) {
            report.peaks.push_back(*best[k]);
        } else {
            report.missing.emplace_back(predictions[k].n, predictions[k].f_L_n);
        }
    }
    return report;
}

std::vector<CoolingWindow> cooling_windows(std::span<const PowerSpectrumPoint> spectrum) {
    std::vector<CoolingWindow> out;
    std::optional<CoolingWindow> open;
    for (const auto& row : spectrum) {
        const bool cooling = row.converged && row.dt1 && row.P1 && row.P2 && *row.P2 < 0.0 && *row.P1 > 0.0;
        if (cooling) {
            if (!open) {
                open = CoolingWindow{*row.dt1, *row.dt1, *row.P2};
            } else {
                open->dt1_end = *row.dt1;
                open->min_P2 = std::min(open->min_P2, *row.P2);
            }
        } else if (open) {
            out.push_back(*open);
            open.reset();
        }
    }
    if (open) out.push_back(*open);
    return out;
}

double power_at_frequency(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                          const IntegratorConfig& cfg, double f_ghz) {
    const CycleSolution sol = find_steady_cycle(with_drive_frequency(model, f_ghz), baths, cfg);
    return units::power_to_watt(sol.total_power);
}

std::vector<AmplitudeEntry> peak_amplitude_study(const QubitDriveModel& base, std::span<const BathCoupling> baths,
                                                 const IntegratorConfig& cfg, std::span<const int> orders,
                                                 StudyVariable variable, std::span<const double> values,
                                                 const StudyOptions& options) {
    std::vector<AmplitudeEntry> table;
    const int grid = std::max(options.grid_points, 5);
    for (const double value : values) {
        const QubitDriveModel model = study_model(base, variable, value);
        const int n_max = *std::max_element(orders.begin(), orders.end());
        const auto predictions = resonance_frequencies(model, n_max);
        for (const int n : orders) {
            const double centre = predictions.at(static_cast<std::size_t>(n - 1)).f_L_n;
            AmplitudeEntry entry{value, n, centre, 0.0, false};
            if (model.g == 0.0) {
                table.push_back(entry);
                continue;
            }
            const double lo = centre * (1.0 - options.half_width);
            const double step = 2.0 * centre * options.half_width / (grid - 1);
            std::vector<double> p(static_cast<std::size_t>(grid));
            for (int k = 0; k < grid; ++k) p[static_cast<std::size_t>(k)] = power_at_frequency(model, baths, cfg, lo + k * step);
            const auto best = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
            entry.f_at_max = lo + best * step;
            entry.P_max = p[static_cast<std::size_t>(best)];
            entry.local_maximum = best > 0 && best < grid - 1;
            if (!entry.local_maximum) {
                if (options.strict) throw NoPeak(n, centre);
                table.push_back(entry);
                continue;
            }
            // golden-section refinement inside the bracketing grid cells
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = entry.f_at_max - step;
            double b = entry.f_at_max + step;
            double c = b - gr * (b - a);
            double d = a + gr * (b - a);
            double pc = power_at_frequency(model, baths, cfg, c);
            double pd = power_at_frequency(model, baths, cfg, d);
            for (int it = 0; it < options.refine_iterations; ++it) {
                if (pc > pd) {
                    b = d;
                    d = c;
                    pd = pc;
                    c = b - gr * (b - a);
                    pc = power_at_frequency(model, baths, cfg, c);
                } else {
                    a = c;
                    c = d;
                    pc = pd;
                    d = a + gr * (b - a);
                    pd = power_at_frequency(model, baths, cfg, d);
                }
            }
            const double fb = pc > pd ? c : d;
            const double pb = std::max(pc, pd);
            if (pb > entry.P_max) {
                entry.P_max = pb;
                entry.f_at_max = fb;
            }
            table.push_back(entry);
        }
    }
    return table;
}

}  // namespace qheat
