#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "qheat/errors.hpp"
#include "qheat/observables.hpp"

using namespace qheat;
using namespace qheat::test;

namespace {

CycleSolution single_sample(const DensityMatrix& rho) {
    CycleSolution c;
    TrajectorySample s;
    s.rho = rho;
    c.trajectory.push_back(s);
    return c;
}

std::vector<PowerSpectrumPoint> synthetic_spectrum(const std::vector<std::pair<double, double>>& lines,
                                                   double lo, double hi, int points) {
    std::vector<PowerSpectrumPoint> out;
    for (int i = 0; i < points; ++i) {
        PowerSpectrumPoint p;
        p.f_L = lo + (hi - lo) * i / (points - 1);
        double P = 0.0;
        for (const auto& [f0, h] : lines) P += h / (1.0 + std::pow((p.f_L - f0) / (0.01 * f0), 2));
        p.P_total = P;
        p.converged = true;
        out.push_back(p);
    }
    return out;
}

}  // namespace

TEST_CASE("exact power is zero without coupling") {
    const auto m = reference_model();
    const auto cycle = find_steady_cycle(m, one_bath());
    const auto zero = one_bath(0.0);
    const auto p = cycle_power_exact(m, zero, cycle);
    CHECK(p.power[0] == 0.0);
    CHECK(p.total_power == 0.0);
}

TEST_CASE("exact power vanishes in equilibrium") {
    auto m = reference_model(8.0, 3.0);
    m.g = 0.0;  // H constant, steady state thermal
    const auto cycle = find_steady_cycle(m, one_bath(0.05, 200.0));
    CHECK(std::abs(cycle.total_power) < 1e-12);
    CHECK(std::abs(cycle.work_per_cycle) < 1e-12);
}

TEST_CASE("first law per cycle") {
    for (double f : {6.16228, 2.5, 1.54057}) {
        const auto m = reference_model(8.0, f);
        const auto cycle = find_steady_cycle(m, one_bath());
        const auto p = cycle_power_exact(m, one_bath(), cycle);
        CHECK(rel(p.work_per_cycle, p.heat_per_cycle[0]) < 5e-3);
    }
    // Square drives carry the work in the jumps.
    const auto sq = square_model(0.1, 0.07);
    const auto cycle = find_steady_cycle(sq, one_bath());
    CHECK(rel(cycle.work_per_cycle, cycle.heat_per_cycle[0]) < 5e-3);
}

TEST_CASE("quadrature is converged in the sample density") {
    const auto m = reference_model();
    const auto cycle = find_steady_cycle(m, one_bath());
    CycleSolution half = cycle;
    half.trajectory.clear();
    for (std::size_t i = 0; i < cycle.trajectory.size(); i += 2) half.trajectory.push_back(cycle.trajectory[i]);
    REQUIRE(half.trajectory.back().t == cycle.trajectory.back().t);
    const auto a = cycle_power_exact(m, one_bath(), cycle);
    const auto b = cycle_power_exact(m, one_bath(), half);
    CHECK(rel(b.total_power, a.total_power) < 1e-3);
}

TEST_CASE("numeric and corner-difference powers agree at a = 8") {
    const auto m = reference_model(8.0, 6.16228);
    const auto cycle = find_steady_cycle(m, one_bath());
    const auto p = map_params(m, one_bath());
    const auto mp = map_power(p, steady_state_fixed_point(p));
    CHECK(rel(mp.total, cycle.total_power) < 0.05);
}

TEST_CASE("numeric and analytic corners agree for a sharp drive") {
    const auto m = reference_model(30.0, 6.16228);
    const auto cycle = find_steady_cycle(m, one_bath());
    const auto numeric = numeric_corners(m, cycle);
    const auto analytic = steady_state_fixed_point(map_params(m, one_bath()));
    for (const auto& [n, a] : {std::pair{numeric.p, analytic.p}, std::pair{numeric.q, analytic.q},
                               std::pair{numeric.r, analytic.r}, std::pair{numeric.s, analytic.s}}) {
        const Eigen::Vector3d x = to_map_vector(n), y = to_map_vector(a);
        CHECK((x - y).cwiseAbs().maxCoeff() / y.norm() < 0.02);
    }
}

TEST_CASE("bloch trajectory frames") {
    const auto m = reference_model();
    const Eigen::Vector2cd g = eigenvectors_for_drive(m, 0.0).col(0);
    DensityMatrix ground;
    ground.m = g * g.adjoint();
    auto t = bloch_trajectory(single_sample(ground));
    CHECK((t.lab[0] - Eigen::Vector3d(-1.0, 0.0, 0.0)).norm() < 1e-15);
    t = bloch_trajectory(single_sample(DensityMatrix{}));
    CHECK(t.lab[0].norm() == 0.0);
    CHECK(t.eigen[0].norm() == 0.0);

    const auto cycle = find_steady_cycle(m, one_bath());
    const auto traj = bloch_trajectory(cycle);
    for (std::size_t i = 0; i < traj.lab.size(); i += 97) CHECK(traj.lab[i].norm() == doctest::Approx(traj.eigen[i].norm()));
}

TEST_CASE("resonant trajectories dive deeper into the ball") {
    const auto on = find_steady_cycle(reference_model(8.0, 3.08114), one_bath());
    const auto off = find_steady_cycle(reference_model(8.0, 2.5), one_bath());
    CHECK(min_purity(on) < min_purity(off));
}

TEST_CASE("winding numbers at the resonances") {
    for (int n : {1, 2, 3}) {
        const auto cycle = find_steady_cycle(reference_model(8.0, 6.16228 / n), one_bath());
        CHECK(winding_number(cycle) == n);
    }
    auto flat = reference_model();
    flat.g = 0.0;
    const auto cycle = find_steady_cycle(flat, one_bath());
    CHECK_THROWS_AS(winding_number(cycle), UndefinedWinding);
}

TEST_CASE("peak finding on synthetic spectra") {
    const std::vector<PeakPrediction> pred{{1, 6.0, 6.0}, {2, 3.0, 6.0}, {3, 2.0, 6.0}};
    const auto spec = synthetic_spectrum({{6.01, 1.0}, {2.99, 0.4}, {2.0, 0.8}}, 1.5, 6.6, 900);
    const auto report = find_peaks(spec, pred);
    REQUIRE(report.peaks.size() == 3);
    CHECK(report.missing.empty());
    CHECK(report.peaks[0].f_at_max == doctest::Approx(6.01).epsilon(1e-4));
    CHECK(report.peaks[1].f_at_max == doctest::Approx(2.99).epsilon(1e-4));
    CHECK(report.peaks[0].relative_offset == doctest::Approx(0.01 / 6.0).epsilon(0.05));

    const auto partial = find_peaks(synthetic_spectrum({{6.0, 1.0}}, 1.5, 6.6, 300), pred);
    CHECK(partial.peaks.size() == 1);
    REQUIRE(partial.missing.size() == 2);
    CHECK(partial.missing[0].order == 2);

    std::vector<PowerSpectrumPoint> flat;
    for (int i = 0; i < 50; ++i) {
        PowerSpectrumPoint p;
        p.f_L = 1.0 + 0.1 * i;
        p.P_total = 1e-3 * i;
        flat.push_back(p);
    }
    CHECK(find_peaks(flat, pred).peaks.empty());
}

TEST_CASE("peaks skip unconverged rows") {
    const std::vector<PeakPrediction> pred{{1, 6.0, 6.0}};
    auto spec = synthetic_spectrum({{6.0, 1.0}}, 5.0, 7.0, 201);
    spec[100].P_total.reset();
    spec[100].converged = false;
    const auto report = find_peaks(spec, pred);
    REQUIRE(report.peaks.size() == 1);
    CHECK(report.peaks[0].f_at_max == doctest::Approx(6.0).epsilon(1e-3));
}

TEST_CASE("cooling windows") {
    std::vector<PowerSpectrumPoint> rows;
    for (int i = 0; i < 20; ++i) {
        PowerSpectrumPoint p;
        p.dt1 = 0.01 * i;
        p.P1 = 1.0;
        p.P2 = (i >= 5 && i <= 8) || i == 15 ? -0.5 - 0.01 * i : 0.2;
        p.converged = true;
        rows.push_back(p);
    }
    const auto w = cooling_windows(rows);
    REQUIRE(w.size() == 2);
    CHECK(w[0].dt1_begin == doctest::Approx(0.05));
    CHECK(w[0].dt1_end == doctest::Approx(0.08));
    CHECK(w[0].min_P2 == doctest::Approx(-0.58));
    CHECK(w[1].dt1_begin == doctest::Approx(0.15));

    for (auto& r : rows) r.P2.reset();
    CHECK(cooling_windows(rows).empty());
}

TEST_CASE("peak study without drive gives zero amplitudes") {
    auto m = reference_model();
    m.g = 0.0;
    const std::vector<int> orders{1};
    const std::vector<double> values{8.0};
    StudyOptions opt;
    opt.grid_points = 7;
    opt.refine_iterations = 5;
    const auto entries = peak_amplitude_study(m, one_bath(), IntegratorConfig{}, orders,
                                              StudyVariable::TanhSharpness, values, opt);
    REQUIRE(entries.size() == 1);
    CHECK(std::abs(entries[0].P_max) < 1e-25);
}
