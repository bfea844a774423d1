// analytic.hpp: four-leg steady-state map for square-wave driving
//
// Corners: p (start of the low-gap leg), q (end of it), r (just after the
// sudden switch up), s (end of the high-gap leg). State vectors are ordered
// (D, R, I).

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qheat/dissipation.hpp"
#include "qheat/frame.hpp"
#include "qheat/model.hpp"

namespace qheat {

enum class LegKind { Thermal2, SuddenUp, Thermal1, SuddenDown };

/// Linearized follows the first-order leg equations; Exponential relaxes
/// exactly toward D = (down - up) / (2 sigma) with exponential decay factors.
enum class ThermalLegForm { Linearized, Exponential };

struct MapParams {
    double omega1{1.0};
    double omega2{1.0};
    double dt1{1.0};  // high-gap leg r -> s
    double dt2{1.0};  // low-gap leg p -> q
    RateSet branch1{};
    RateSet branch2{};
    double eta{0.0};
    ThermalLegForm form{ThermalLegForm::Linearized};

    double period() const { return dt1 + dt2; }
};

void validate(const MapParams& params);

/// Map parameters for a model and its baths: leg durations from the drive
/// (half periods for the tanh drive) and rates summed per branch.
MapParams map_params(const QubitDriveModel& model, std::span<const BathCoupling> baths);

/// Affine map x -> linear x + offset on (D, R, I).
struct LegPropagator {
    LegKind kind{LegKind::Thermal2};
    Eigen::Matrix3d linear{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d offset{Eigen::Vector3d::Zero()};

    Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return linear * x + offset; }
};

struct LegSet {
    std::array<LegPropagator, 4> legs;  // p->q, q->r, r->s, s->p
    bool validity_warning{false};
    std::vector<std::string> warnings;
};

/// sigma * dt above this on either branch flags the linearized legs.
inline constexpr double kMapValidityLimit = 0.1;

LegSet build_leg_propagators(const MapParams& params);

/// One full cycle p -> p.
LegPropagator composite_map(const LegSet& legs);

struct CornerStates {
    BlochState p, q, r, s;
    double residual{0.0};  // |composite(p) - p|_inf
};

/// Exact fixed point by a 3x3 linear solve. Throws SingularMap when the
/// composite map has spectral radius 1.
CornerStates steady_state_fixed_point(const MapParams& params);

/// Fixed point by plain iteration of the composite map from the origin.
CornerStates iterate_fixed_point(const MapParams& params, double tol = 1e-14, int max_iter = 10000000);

/// Closed-form power for zero branch-1 rates and equal legs (rad/ns per ns).
double closed_form_power(const MapParams& params);

/// Closed-form excited-state occupation at p, same preconditions.
double closed_form_excitation(const MapParams& params);

struct PurityAudit {
    std::array<double, 4> corner{};      // R^2 + I^2 + D^2 at p, q, r, s
    std::array<double, 4> leg_change{};  // along p->q, q->r, r->s, s->p
};

PurityAudit purity_audit(const CornerStates& corners);

struct MapPower {
    double total{0.0};
    double p1{0.0};  // high-gap leg, bath 1
    double p2{0.0};  // low-gap leg, bath 2
};

/// Heat per cycle from corner differences times the drive frequency.
MapPower map_power(const MapParams& params, const CornerStates& corners);

}  // namespace qheat
