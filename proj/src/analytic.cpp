#include "qheat/analytic.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qheat/errors.hpp"

namespace qheat {

namespace {

constexpr double kSpectralMargin = 1e-13;

LegPropagator thermal_leg(LegKind kind, double omega, double dt, const RateSet& rates, ThermalLegForm form) {
    LegPropagator leg;
    leg.kind = kind;
    double pop_keep = 0.0;
    double pop_offset = 0.0;
    double coherence_keep = 0.0;
    if (form == ThermalLegForm::Linearized) {
        pop_keep = 1.0 - rates.sigma * dt;
        pop_offset = (rates.down - 0.5 * rates.sigma) * dt;
        coherence_keep = 1.0 - 0.5 * rates.sigma * dt - 2.0 * rates.phi * dt;
    } else {
        pop_keep = std::exp(-rates.sigma * dt);
        const double d_inf = rates.sigma > 0.0 ? 0.5 * (rates.down - rates.up) / rates.sigma : 0.0;
        pop_offset = d_inf * (1.0 - pop_keep);
        coherence_keep = std::exp(-(0.5 * rates.sigma + 2.0 * rates.phi) * dt);
    }
    const double c = std::cos(omega * dt);
    const double s = std::sin(omega * dt);
    leg.linear << pop_keep, 0.0, 0.0,
                  0.0, c * coherence_keep, -s * coherence_keep,
                  0.0, s * coherence_keep, c * coherence_keep;
    leg.offset << pop_offset, 0.0, 0.0;
    return leg;
}

LegPropagator sudden_leg(LegKind kind, double eta) {
    LegPropagator leg;
    leg.kind = kind;
    const double c = std::sqrt(1.0 - eta * eta);
    // (D, R) rows; up: D' = c D - eta R, R' = eta D + c R. Down is the inverse.
    const double sign = kind == LegKind::SuddenUp ? 1.0 : -1.0;
    leg.linear << c, -sign * eta, 0.0,
                  sign * eta, c, 0.0,
                  0.0, 0.0, 1.0;
    return leg;
}

void require_closed_form_domain(const MapParams& p) {
    validate(p);
    const double dt = p.dt2;
    if (std::abs(p.dt1 - p.dt2) > 1e-9 * dt)
        throw DomainError("closed form requires equal leg durations");
    if (p.branch1.down != 0.0 || p.branch1.sigma != 0.0)
        throw DomainError("closed form requires vanishing branch-1 rates");
    if (p.branch2.sigma * dt > kMapValidityLimit)
        throw DomainError("closed form requires sigma_2 dt << 1");
    if (!(p.branch2.sigma > 0.0)) throw DomainError("closed form requires a nonzero branch-2 rate");
}

double closed_form_denominator(const MapParams& p) {
    const double w1 = p.omega1;
    const double w2 = p.omega2;
    const double dt = p.dt2;
    const double k = 2.0 * (w1 * w1 - w2 * w2) * std::cos(w2 * dt) + (w1 - w2) * (w1 - w2) * std::cos((w1 - w2) * dt);
    return 4.0 * w1 * w1 - (w1 + w2) * (w1 + w2) * std::cos((w1 + w2) * dt) - k;
}

BlochState corner(const Eigen::Vector3d& v) { return from_map_vector(v); }

}  // namespace

void validate(const MapParams& p) {
    if (!(p.omega1 >= p.omega2 && p.omega2 > 0.0)) throw DomainError("map requires omega1 >= omega2 > 0");
    if (!(p.dt1 > 0.0 && p.dt2 > 0.0)) throw DomainError("map requires positive leg durations");
    if (!(p.eta >= 0.0 && p.eta < 1.0)) throw DomainError("map requires 0 <= eta < 1");
    for (const RateSet* r : {&p.branch1, &p.branch2}) {
        if (r->down < 0.0 || r->up < 0.0 || r->phi < 0.0 || r->sigma < 0.0)
            throw DomainError("map rates must be non-negative");
    }
}

MapParams map_params(const QubitDriveModel& model, std::span<const BathCoupling> baths) {
    validate(model);
    MapParams p;
    const auto [w1, w2] = extremal_gaps(model);
    p.omega1 = w1;
    p.omega2 = w2;
    p.eta = mixing_eta(model);
    if (const auto* sq = std::get_if<AsymmetricSquare>(&model.drive)) {
        p.dt1 = sq->dt1;
        p.dt2 = sq->dt2;
    } else {
        p.dt1 = p.dt2 = 0.5 * drive_period(model.drive);
    }
    p.branch1 = total_rates_for_drive(model, baths, 2.0);
    p.branch2 = total_rates_for_drive(model, baths, 0.0);
    return p;
}

LegSet build_leg_propagators(const MapParams& params) {
    validate(params);
    LegSet set;
    set.legs[0] = thermal_leg(LegKind::Thermal2, params.omega2, params.dt2, params.branch2, params.form);
    set.legs[1] = sudden_leg(LegKind::SuddenUp, params.eta);
    set.legs[2] = thermal_leg(LegKind::Thermal1, params.omega1, params.dt1, params.branch1, params.form);
    set.legs[3] = sudden_leg(LegKind::SuddenDown, params.eta);

    auto check = [&](const char* name, double x) {
        if (x > kMapValidityLimit) {
            std::ostringstream msg;
            msg << name << " sigma*dt = " << x << " exceeds " << kMapValidityLimit;
            set.warnings.push_back(msg.str());
            set.validity_warning = true;
        }
    };
    check("branch 1", params.branch1.sigma * params.dt1);
    check("branch 2", params.branch2.sigma * params.dt2);
    return set;
}

LegPropagator composite_map(const LegSet& legs) {
    LegPropagator total;
    total.kind = LegKind::Thermal2;
    for (const auto& leg : legs.legs) {
        total.offset = leg.linear * total.offset + leg.offset;
        total.linear = leg.linear * total.linear;
    }
    return total;
}

CornerStates steady_state_fixed_point(const MapParams& params) {
    const LegSet legs = build_leg_propagators(params);
    const LegPropagator m = composite_map(legs);

    const Eigen::EigenSolver<Eigen::Matrix3d> es(m.linear, false);
    const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    if (radius >= 1.0 - kSpectralMargin)
        throw SingularMap("composite cycle map has spectral radius 1; no unique steady cycle");

    const Eigen::Vector3d p = (Eigen::Matrix3d::Identity() - m.linear).fullPivLu().solve(m.offset);
    const Eigen::Vector3d q = legs.legs[0].apply(p);
    const Eigen::Vector3d r = legs.legs[1].apply(q);
    const Eigen::Vector3d s = legs.legs[2].apply(r);

    CornerStates out{corner(p), corner(q), corner(r), corner(s), 0.0};
    out.residual = (legs.legs[3].apply(s) - p).cwiseAbs().maxCoeff();
    return out;
}

CornerStates iterate_fixed_point(const MapParams& params, double tol, int max_iter) {
    const LegSet legs = build_leg_propagators(params);
    const LegPropagator m = composite_map(legs);
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    double step = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        const Eigen::Vector3d next = m.apply(p);
        step = (next - p).cwiseAbs().maxCoeff();
        p = next;
        if (step < tol) break;
    }
    if (it == max_iter) throw NotConverged(it, step);
    const Eigen::Vector3d q = legs.legs[0].apply(p);
    const Eigen::Vector3d r = legs.legs[1].apply(q);
    const Eigen::Vector3d s = legs.legs[2].apply(r);
    return {corner(p), corner(q), corner(r), corner(s), (legs.legs[3].apply(s) - p).cwiseAbs().maxCoeff()};
}

double closed_form_power(const MapParams& params) {
    require_closed_form_domain(params);
    const double w1 = params.omega1;
    const double w2 = params.omega2;
    const double dt = params.dt2;
    const double bias = 2.0 * params.branch2.down - params.branch2.sigma;
    return w2 * bias * (1.0 - std::cos(w1 * dt)) * (w1 * w1 - w2 * w2) / (2.0 * closed_form_denominator(params));
}

double closed_form_excitation(const MapParams& params) {
    require_closed_form_domain(params);
    const double w1 = params.omega1;
    const double w2 = params.omega2;
    const double dt = params.dt2;
    const double bias = (2.0 * params.branch2.down - params.branch2.sigma) / params.branch2.sigma;
    const double amp = w1 * std::cos(0.5 * w1 * dt) * std::sin(0.5 * w2 * dt) +
                       w2 * std::cos(0.5 * w2 * dt) * std::sin(0.5 * w1 * dt);
    return 0.5 - bias * 4.0 * amp * amp / closed_form_denominator(params);
}

PurityAudit purity_audit(const CornerStates& c) {
    PurityAudit a;
    a.corner = {c.p.norm_sq(), c.q.norm_sq(), c.r.norm_sq(), c.s.norm_sq()};
    for (std::size_t i = 0; i < 4; ++i) a.leg_change[i] = a.corner[(i + 1) % 4] - a.corner[i];
    return a;
}

MapPower map_power(const MapParams& params, const CornerStates& c) {
    const double rate = 1.0 / params.period();
    MapPower out;
    out.p2 = params.omega2 * (c.q.D - c.p.D) * rate;
    out.p1 = params.omega1 * (c.s.D - c.r.D) * rate;
    out.total = out.p1 + out.p2;
    return out;
}

}  // namespace qheat
