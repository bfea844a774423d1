#include "qheat/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "qheat/errors.hpp"
#include "qheat/observables.hpp"

namespace qheat {

namespace {

using cd = std::complex<double>;

constexpr double kPositivityFloor = -1e-6;
constexpr int kMinLegSteps = 16;

const Eigen::Matrix2cd& sigma_x() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    return m;
}
const Eigen::Matrix2cd& sigma_y() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, cd(0, -1), cd(0, 1), 0).finished();
    return m;
}
const Eigen::Matrix2cd& sigma_z() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    return m;
}

Eigen::Matrix2cd dissipator(const Eigen::Matrix2cd& jump, const Eigen::Matrix2cd& rho) {
    const Eigen::Matrix2cd jd = jump.adjoint();
    const Eigen::Matrix2cd n = jd * jump;
    return jump * rho * jd - 0.5 * (n * rho + rho * n);
}

// A stretch of the cycle integrated with a uniform step. Square-wave legs
// carry their drive value so that stage times on the boundary stay on the leg.
struct Leg {
    double t0;
    double t1;
    int steps;
    bool frozen;
    double drive;
};

std::vector<Leg> cycle_legs(const QubitDriveModel& model, int steps) {
    const double period = drive_period(model.drive);
    if (const auto* sq = std::get_if<AsymmetricSquare>(&model.drive)) {
        int low = static_cast<int>(std::lround(steps * sq->dt2 / period));
        low = std::clamp(low, kMinLegSteps, steps - kMinLegSteps);
        return {{0.0, sq->dt2, low, true, 0.0}, {sq->dt2, period, steps - low, true, 2.0}};
    }
    return {{0.0, period, steps, false, 0.0}};
}

double leg_drive(const QubitDriveModel& model, const Leg& leg, double t) {
    return leg.frozen ? leg.drive : waveform_value(model.drive, t);
}

// Classical RK4 on x' = G(t) x for the Bloch route. Visit(t, drive, x) is
// called at each leg start and after every step.
template <class State, class Visit>
void integrate_bloch(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                     const std::vector<Leg>& legs, State& x, Visit&& visit) {
    for (const Leg& leg : legs) {
        const double h = (leg.t1 - leg.t0) / leg.steps;
        visit(leg.t0, leg_drive(model, leg, leg.t0), x);
        if (leg.frozen) {
            const Eigen::Matrix4d g = bloch_generator(model, baths, leg.drive);
            for (int k = 0; k < leg.steps; ++k) {
                const State k1 = g * x;
                const State k2 = g * (x + 0.5 * h * k1);
                const State k3 = g * (x + 0.5 * h * k2);
                const State k4 = g * (x + h * k3);
                x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                const double t = k + 1 == leg.steps ? leg.t1 : leg.t0 + (k + 1) * h;
                visit(t, leg.drive, x);
            }
            continue;
        }
        Eigen::Matrix4d g0 = bloch_generator(model, baths, waveform_value(model.drive, leg.t0));
        for (int k = 0; k < leg.steps; ++k) {
            const double t = leg.t0 + k * h;
            const double t_next = k + 1 == leg.steps ? leg.t1 : t + h;
            const Eigen::Matrix4d gm = bloch_generator(model, baths, waveform_value(model.drive, t + 0.5 * h));
            const double drive_next = waveform_value(model.drive, t_next);
            const Eigen::Matrix4d g1 = bloch_generator(model, baths, drive_next);
            const State k1 = g0 * x;
            const State k2 = gm * (x + 0.5 * h * k1);
            const State k3 = gm * (x + 0.5 * h * k2);
            const State k4 = g1 * (x + h * k3);
            x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            visit(t_next, drive_next, x);
            g0 = g1;
        }
    }
}

double bloch_min_eigenvalue(const Eigen::Vector4d& v) { return 0.5 * (v(0) - v.tail<3>().norm()); }

Eigen::Vector4d augmented(const DensityMatrix& rho) {
    Eigen::Vector4d v;
    v << rho.trace(), rho.bloch();
    return v;
}

}  // namespace

DensityMatrix DensityMatrix::from_bloch(const Eigen::Vector3d& r) {
    DensityMatrix rho;
    rho.m = 0.5 * (Eigen::Matrix2cd::Identity() + r.x() * sigma_x() + r.y() * sigma_y() + r.z() * sigma_z());
    return rho;
}

Eigen::Vector3d DensityMatrix::bloch() const {
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

std::array<double, 4> DensityMatrix::components() const {
    return {m(0, 0).real(), m(1, 1).real(), m(0, 1).real(), m(0, 1).imag()};
}

double DensityMatrix::purity() const { return (m * m).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
    const Eigen::Matrix2cd herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

double component_distance(const DensityMatrix& a, const DensityMatrix& b) {
    const auto ca = a.components();
    const auto cb = b.components();
    double d = 0.0;
    for (std::size_t i = 0; i < ca.size(); ++i) d = std::max(d, std::abs(ca[i] - cb[i]));
    return d;
}

void validate(const IntegratorConfig& cfg) {
    if (cfg.steps_per_cycle < 256) throw DomainError("steps_per_cycle must be at least 256");
    if (!(cfg.convergence_tol > 0.0 && cfg.convergence_tol <= 1e-4))
        throw DomainError("convergence_tol must lie in (0, 1e-4]");
    if (cfg.max_cycles < 1) throw DomainError("max_cycles must be at least 1");
}

Eigenbasis eigenbasis_for_drive(const QubitDriveModel& model, double drive_value) {
    const double gw = model.g * drive_value;
    return {std::hypot(gw, model.omega0), std::atan2(gw, model.omega0)};
}

Eigenbasis instantaneous_eigenbasis(const QubitDriveModel& model, double t) {
    return eigenbasis_for_drive(model, waveform_value(model.drive, t));
}

Eigen::Matrix2cd hamiltonian_matrix(const QubitDriveModel& model, double drive_value) {
    return 0.5 * (model.g * drive_value * sigma_z() + model.omega0 * sigma_x());
}

Eigen::Matrix2cd eigenvectors_for_drive(const QubitDriveModel& model, double drive_value) {
    // Excited state points along n = (cos theta, 0, sin theta), i.e. polar
    // angle pi/2 - theta from +z.
    const double theta = eigenbasis_for_drive(model, drive_value).mixing_angle;
    const double half = 0.5 * (0.5 * std::numbers::pi - theta);
    Eigen::Matrix2cd v;
    v << -std::sin(half), std::cos(half), std::cos(half), std::sin(half);
    return v;
}

Eigen::Matrix2cd master_equation_rhs_for_drive(const QubitDriveModel& model,
                                               std::span<const BathCoupling> baths,
                                               const DensityMatrix& rho, double drive_value) {
    const Eigen::Matrix2cd h = hamiltonian_matrix(model, drive_value);
    Eigen::Matrix2cd out = cd(0, -1) * (h * rho.m - rho.m * h);
    if (baths.empty()) return out;

    const Eigen::Matrix2cd v = eigenvectors_for_drive(model, drive_value);
    const Eigen::Vector2cd ground = v.col(0);
    const Eigen::Vector2cd excited = v.col(1);
    const Eigen::Matrix2cd lower = ground * excited.adjoint();
    const Eigen::Matrix2cd raise = lower.adjoint();
    const Eigen::Matrix2cd z = excited * excited.adjoint() - ground * ground.adjoint();

    for (const auto& bath : baths) {
        const RateSet r = rates_for_drive(model, bath, drive_value);
        out += r.down * dissipator(lower, rho.m) + r.up * dissipator(raise, rho.m);
        if (r.phi != 0.0) out += r.phi * (z * rho.m * z - rho.m);
    }
    return out;
}

Eigen::Matrix2cd master_equation_rhs(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                                     const DensityMatrix& rho, double t) {
    return master_equation_rhs_for_drive(model, baths, rho, waveform_value(model.drive, t));
}

Eigen::Matrix4d bloch_generator(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                                double drive_value) {
    const double hz = model.g * drive_value;
    const double hx = model.omega0;
    Eigen::Matrix4d gen = Eigen::Matrix4d::Zero();
    // r' = h x r with h = (omega0, 0, g Omega)
    gen(1, 2) = -hz;
    gen(2, 1) = hz;
    gen(2, 3) = -hx;
    gen(3, 2) = hx;
    if (baths.empty()) return gen;

    const Eigen::Vector3d n = Eigen::Vector3d(hx, 0.0, hz).normalized();
    const Eigen::Matrix3d longitudinal = n * n.transpose();
    const Eigen::Matrix3d transverse = Eigen::Matrix3d::Identity() - longitudinal;
    for (const auto& bath : baths) {
        const RateSet r = rates_for_drive(model, bath, drive_value);
        const double gamma_perp = 0.5 * r.sigma + 2.0 * r.phi;
        gen.bottomRightCorner<3, 3>() -= gamma_perp * transverse + r.sigma * longitudinal;
        gen.block<3, 1>(1, 0) -= (r.down - r.up) * n;
    }
    return gen;
}

double heat_rate(const QubitDriveModel& model, const BathCoupling& bath, const Eigen::Vector3d& r,
                 double drive_value) {
    const RateSet rates = rates_for_drive(model, bath, drive_value);
    if (rates.sigma == 0.0) return 0.0;
    const Eigenbasis eb = eigenbasis_for_drive(model, drive_value);
    const double along = excited_axis(eb.mixing_angle).dot(r);
    return 0.5 * eb.omega * (rates.sigma * along + rates.down - rates.up);
}

DensityMatrix thermal_state(const QubitDriveModel& model, std::span<const BathCoupling> baths, double t) {
    const double drive = waveform_value(model.drive, t);
    const Eigenbasis eb = eigenbasis_for_drive(model, drive);
    const Eigen::Vector3d n = excited_axis(eb.mixing_angle);
    const RateSet total = total_rates_for_drive(model, baths, drive);
    double polarization = -1.0;  // <n.sigma> = rho_ee - rho_gg
    if (total.sigma > 0.0) {
        polarization = (total.up - total.down) / total.sigma;
    } else if (!baths.empty()) {
        polarization = -std::tanh(0.5 * eb.omega / baths.front().thermal);
    }
    return DensityMatrix::from_bloch(polarization * n);
}

DensityMatrix evolve_one_cycle(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                               const DensityMatrix& rho0, const IntegratorConfig& cfg) {
    validate(model);
    validate(cfg);
    DensityMatrix rho = rho0;
    for (const Leg& leg : cycle_legs(model, cfg.steps_per_cycle)) {
        const double h = (leg.t1 - leg.t0) / leg.steps;
        auto rhs = [&](const Eigen::Matrix2cd& m, double t) {
            DensityMatrix tmp;
            tmp.m = m;
            return master_equation_rhs_for_drive(model, baths, tmp, leg_drive(model, leg, t));
        };
        for (int k = 0; k < leg.steps; ++k) {
            const double t = leg.t0 + k * h;
            const Eigen::Matrix2cd k1 = rhs(rho.m, t);
            const Eigen::Matrix2cd k2 = rhs(rho.m + 0.5 * h * k1, t + 0.5 * h);
            const Eigen::Matrix2cd k3 = rhs(rho.m + 0.5 * h * k2, t + 0.5 * h);
            const Eigen::Matrix2cd k4 = rhs(rho.m + h * k3, t + h);
            rho.m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double lmin = rho.min_eigenvalue();
            if (lmin < kPositivityFloor) throw StepUnstable(t + h, lmin);
        }
    }
    return rho;
}

DensityMatrix evolve_frozen(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                            const DensityMatrix& rho0, double drive_value, double duration, int steps) {
    if (steps < 1) throw DomainError("evolve_frozen needs at least one step");
    std::vector<Leg> legs{{0.0, duration, steps, true, drive_value}};
    Eigen::Vector4d v = augmented(rho0);
    integrate_bloch(model, baths, legs, v, [](double, double, const Eigen::Vector4d&) {});
    return DensityMatrix::from_bloch(v.tail<3>() / v(0));
}

Eigen::Matrix4d cycle_monodromy(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                                const IntegratorConfig& cfg) {
    validate(model);
    validate(cfg);
    Eigen::Matrix4d phi = Eigen::Matrix4d::Identity();
    integrate_bloch(model, baths, cycle_legs(model, cfg.steps_per_cycle), phi,
                    [](double, double, const Eigen::Matrix4d&) {});
    return phi;
}

CycleSolution find_steady_cycle(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                                const IntegratorConfig& cfg) {
    validate(model);
    validate(cfg);
    for (const auto& b : baths) validate(b);

    // RK4 applied to a linear equation is an affine map per step, so the
    // product over one period reproduces a full integrated cycle exactly
    // (up to rounding); iterating it is iterating the cycle.
    const Eigen::Matrix4d phi = cycle_monodromy(model, baths, cfg);

    CycleSolution sol;
    sol.period = drive_period(model.drive);
    Eigen::Vector4d start = augmented(thermal_state(model, baths, 0.0));
    double residual = 0.0;
    int cycles = 0;
    while (true) {
        if (cycles >= cfg.max_cycles) throw NotConverged(cycles, residual);
        const Eigen::Vector4d next = phi * start;
        // A coarse step makes the map expand; catch it before it overflows.
        if (!next.allFinite()) throw StepUnstable(sol.period * (cycles + 1), -std::numeric_limits<double>::infinity());
        if (const double lmin = bloch_min_eigenvalue(next); lmin < kPositivityFloor)
            throw StepUnstable(sol.period * (cycles + 1), lmin);
        residual = 0.5 * (next - start).tail<3>().cwiseAbs().maxCoeff();
        sol.residual_history.push_back(residual);
        start = next;
        ++cycles;
        if (residual < cfg.convergence_tol) break;
    }
    sol.cycles_to_converge = cycles;
    sol.residual = residual;
    sol.converged = true;

    Eigen::Vector4d v = start;
    sol.trajectory.reserve(static_cast<std::size_t>(cfg.steps_per_cycle) + 4);
    integrate_bloch(model, baths, cycle_legs(model, cfg.steps_per_cycle), v,
                    [&](double t, double drive, const Eigen::Vector4d& x) {
                        const double lmin = bloch_min_eigenvalue(x);
                        if (lmin < kPositivityFloor) throw StepUnstable(t, lmin);
                        const Eigen::Vector3d r = x.tail<3>();
                        TrajectorySample s;
                        s.t = t;
                        s.drive = drive;
                        s.rho = DensityMatrix::from_bloch(r);
                        s.eigen = to_eigenframe(r, eigenbasis_for_drive(model, drive).mixing_angle);
                        sol.trajectory.push_back(std::move(s));
                    });
    sol.closure = component_distance(sol.trajectory.front().rho, sol.trajectory.back().rho);

    const CyclePower cp = cycle_power_exact(model, baths, sol);
    sol.heat_per_cycle = cp.heat_per_cycle;
    sol.power = cp.power;
    sol.total_power = cp.total_power;
    sol.work_per_cycle = cp.work_per_cycle;
    return sol;
}

}  // namespace qheat
