// Shared parameter sets for the test binaries.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qheat/dissipation.hpp"
#include "qheat/model.hpp"
#include "qheat/units.hpp"

namespace qheat::test {

inline constexpr double kPi = std::numbers::pi;

inline QubitDriveModel reference_model(double a = 8.0, double f_ghz = 6.16228) {
    return {units::ghz_to_angular(6.0), units::ghz_to_angular(1.0),
            TanhCosine{a, units::ghz_to_angular(f_ghz)}};
}

inline QubitDriveModel square_model(double dt1, double dt2) {
    return {units::ghz_to_angular(6.0), units::ghz_to_angular(1.0), AsymmetricSquare{dt1, dt2}};
}

inline BathCoupling reference_bath(double kappa = 0.01, double t_mk = 70.0) {
    BathCoupling b;
    b.kappa = kappa;
    b.thermal = units::millikelvin_to_angular(t_mk);
    return b;
}

inline std::vector<BathCoupling> one_bath(double kappa = 0.01, double t_mk = 70.0) {
    return {reference_bath(kappa, t_mk)};
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace qheat::test
