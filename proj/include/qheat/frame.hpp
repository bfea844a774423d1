// frame.hpp: Bloch vectors in the lab frame and in the instantaneous eigenframe
//
// Lab Bloch vector r = (<sigma_x>, <sigma_y>, <sigma_z>). The Hamiltonian is
// (omega / 2) n.sigma with n = (cos theta, 0, sin theta), sin theta = g Omega / omega.
// Eigenframe coordinates:
//   D = -r.n / 2                 (= 1/2 - rho_ee)
//   R =  r.(-sin theta, 0, cos theta) / 2
//   I = -r_y / 2
// With these axes free precession rotates (R, I) by +omega t and a sudden
// switch from theta = 0 to theta_1 mixes (D, R) with the signs of the
// steady-state leg map.

#pragma once

#include <cmath>

#include <Eigen/Core>

namespace qheat {

struct BlochState {
    double R{0.0};
    double I{0.0};
    double D{0.0};

    /// R^2 + I^2 + D^2, a quarter of the squared Bloch radius.
    double norm_sq() const { return R * R + I * I + D * D; }
    double rho_ee() const { return 0.5 - D; }
};

/// Map state vector ordering (D, R, I).
inline Eigen::Vector3d to_map_vector(const BlochState& s) { return {s.D, s.R, s.I}; }
inline BlochState from_map_vector(const Eigen::Vector3d& v) { return {v(1), v(2), v(0)}; }

inline Eigen::Vector3d excited_axis(double theta) {
    return {std::cos(theta), 0.0, std::sin(theta)};
}

inline BlochState to_eigenframe(const Eigen::Vector3d& r, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {0.5 * (-s * r.x() + c * r.z()), -0.5 * r.y(), -0.5 * (c * r.x() + s * r.z())};
}

inline Eigen::Vector3d from_eigenframe(const BlochState& b, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // r = 2 (R e_R + I e_I + D e_D), e_D = -n
    return {2.0 * (-s * b.R - c * b.D), -2.0 * b.I, 2.0 * (c * b.R - s * b.D)};
}

}  // namespace qheat
