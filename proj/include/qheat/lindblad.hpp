// lindblad.hpp: time-dependent master equation and steady-cycle search
//
// Jump operators are built in the instantaneous eigenbasis of H(t); the
// coherent part is integrated in the fixed lab basis.

#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qheat/dissipation.hpp"
#include "qheat/frame.hpp"
#include "qheat/model.hpp"

namespace qheat {

/// 2x2 density matrix in the sigma_z eigenbasis.
struct DensityMatrix {
    Eigen::Matrix2cd m{Eigen::Matrix2cd::Identity() * 0.5};

    static DensityMatrix from_bloch(const Eigen::Vector3d& r);

    Eigen::Vector3d bloch() const;
    /// (rho_00, rho_11, Re rho_01, Im rho_01)
    std::array<double, 4> components() const;
    double trace() const { return m.trace().real(); }
    double purity() const;
    double min_eigenvalue() const;
};

/// Max-abs difference of the four real components.
double component_distance(const DensityMatrix& a, const DensityMatrix& b);

struct IntegratorConfig {
    int steps_per_cycle{4096};
    double convergence_tol{1e-10};
    int max_cycles{20000};
};

void validate(const IntegratorConfig& cfg);

struct Eigenbasis {
    double omega{0.0};         // gap
    double mixing_angle{0.0};  // theta, sin theta = g Omega / omega
};

Eigenbasis eigenbasis_for_drive(const QubitDriveModel& model, double drive_value);
Eigenbasis instantaneous_eigenbasis(const QubitDriveModel& model, double t);

Eigen::Matrix2cd hamiltonian_matrix(const QubitDriveModel& model, double drive_value);

/// Ground and excited eigenvectors of H for a drive value, as columns (g, e).
Eigen::Matrix2cd eigenvectors_for_drive(const QubitDriveModel& model, double drive_value);

/// d rho / dt with the dissipators built from eigenbasis ladder operators.
Eigen::Matrix2cd master_equation_rhs(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                                     const DensityMatrix& rho, double t);
Eigen::Matrix2cd master_equation_rhs_for_drive(const QubitDriveModel& model,
                                               std::span<const BathCoupling> baths,
                                               const DensityMatrix& rho, double drive_value);

/// The same equation acting on (1, r_x, r_y, r_z). First row is zero.
Eigen::Matrix4d bloch_generator(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                                double drive_value);

/// Heat flow from the qubit into one bath, -Tr[H L_b rho], at a drive value.
double heat_rate(const QubitDriveModel& model, const BathCoupling& bath, const Eigen::Vector3d& r,
                 double drive_value);

/// Thermal state of H(t) under the baths active at t. Falls back to the
/// first bath's Boltzmann state, then to the ground state.
DensityMatrix thermal_state(const QubitDriveModel& model, std::span<const BathCoupling> baths, double t);

/// One drive period from t = 0 with the matrix form of the equation.
/// Throws StepUnstable if the minimum eigenvalue drops below -1e-6.
DensityMatrix evolve_one_cycle(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                               const DensityMatrix& rho0, const IntegratorConfig& cfg);

/// Propagate with the drive held at a fixed value (no time dependence).
DensityMatrix evolve_frozen(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                            const DensityMatrix& rho0, double drive_value, double duration, int steps);

/// One-period affine map on (1, r): r(T) = M r(0) + b, from the RK4 scheme.
Eigen::Matrix4d cycle_monodromy(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                                const IntegratorConfig& cfg);

struct TrajectorySample {
    double t{0.0};
    double drive{0.0};  // Omega at the sample (square legs: the leg value)
    DensityMatrix rho;
    BlochState eigen;   // eigenframe coordinates at this drive value
};

struct CycleSolution {
    double period{0.0};
    std::vector<TrajectorySample> trajectory;  // t from 0 to period inclusive
    std::vector<double> heat_per_cycle;        // per bath, energy into the bath
    std::vector<double> power;                 // per bath
    double total_power{0.0};
    double work_per_cycle{0.0};
    int cycles_to_converge{0};
    bool converged{false};
    double residual{0.0};
    double closure{0.0};                      // component distance first vs last sample
    std::vector<double> residual_history;
};

/// Iterates the one-cycle map from the thermal state at t = 0 until the
/// cycle-start state moves less than convergence_tol, then records one
/// cycle with heats and powers attached. Throws NotConverged.
CycleSolution find_steady_cycle(const QubitDriveModel& model, std::span<const BathCoupling> baths,
                                const IntegratorConfig& cfg = {});

}  // namespace qheat
