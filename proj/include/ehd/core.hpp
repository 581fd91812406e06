#pragma once

#include <cmath>
#include <string>

#include "ehd/errors.hpp"

// Corona-discharge thruster model.
//
// A thruster is a sharp emitter electrode held at high voltage above a
// grounded collector mesh at gap d. Above the onset voltage the discharge
// current follows Townsend's quadratic law
//
//     I = C * V * (V - V_crit)
//
// and the thrust equals the Coulomb force on the ion cloud,
//
//     F = I * d / mu
//
// with corona power P = I * V and ideal efficiency F/P = d / (mu * V).
// Everything in this header is a pure function over immutable value types;
// all quantities are SI (V, A, N, W, m, kg).

namespace ehd {

/// Ion transport properties of the working gas.
struct GasMedium {
    double ion_mobility = 2e-4;  // m^2/(V*s), positive ions in air
};

/// Electrode geometry of a single thruster.
struct ThrusterGeometry {
    double gap_d = 0.0;        // emitter-collector spacing, m
    double flow_area = 0.0;    // open mesh area, m^2
    double blockage = 0.0;     // obstructed fraction of collector, [0,1)
    double lever_arm_l = 0.0;  // distance from vehicle center to thrust line, m
    int emitter_tip_count = 1; // informational
};

/// Townsend current-law parameters for one discharge gap.
struct TownsendModel {
    double c_geom = 0.0;  // geometry constant, A/V^2
    double v_crit = 0.0;  // corona onset voltage, V
};

struct OperatingPoint {
    double voltage = 0.0;  // applied potential, V (>= 0)
};

/// Single multiplicative factor mapping ideal Coulomb thrust to measured
/// thrust; absorbs collector blockage and drag losses.
struct LossModel {
    double eta = 1.0;  // (0, 1]
};

/// Operating-point bundle computed by evaluate_operating_point().
struct ThrusterPerformance {
    double current = 0.0;                   // A
    double thrust = 0.0;                    // N (loss-adjusted)
    double power = 0.0;                     // W
    double efficiency = 0.0;                // N/W, ideal d/(mu*V)
    double thrust_density = 0.0;            // N/m^2
    double thrust_density_per_power = 0.0;  // N/(m^2*W)
};

inline void validate(const GasMedium& gas) {
    if (!(gas.ion_mobility > 0.0))
        throw Error(ErrorCode::schema_error, "ion_mobility must be > 0");
}

inline void validate(const ThrusterGeometry& geom) {
    if (!(geom.gap_d > 0.0))
        throw Error(ErrorCode::schema_error, "gap_d must be > 0");
    if (!(geom.flow_area > 0.0))
        throw Error(ErrorCode::schema_error, "flow_area must be > 0");
    if (!(geom.blockage >= 0.0 && geom.blockage < 1.0))
        throw Error(ErrorCode::schema_error, "blockage must be in [0,1)");
    if (!(geom.lever_arm_l > 0.0))
        throw Error(ErrorCode::schema_error, "lever_arm_l must be > 0");
    if (geom.emitter_tip_count < 1)
        throw Error(ErrorCode::schema_error, "emitter_tip_count must be >= 1");
}

inline void validate(const TownsendModel& model) {
    if (!(model.c_geom > 0.0))
        throw Error(ErrorCode::schema_error, "c_geom must be > 0");
    if (!(model.v_crit > 0.0))
        throw Error(ErrorCode::schema_error, "v_crit must be > 0");
}

inline void validate(const OperatingPoint& op) {
    if (!(op.voltage >= 0.0))
        throw Error(ErrorCode::schema_error, "voltage must be >= 0");
}

inline void validate(const LossModel& loss) {
    if (!(loss.eta > 0.0 && loss.eta <= 1.0))
        throw Error(ErrorCode::schema_error, "eta must be in (0,1]");
}

/// Discharge current I = C*V*(V - V_crit), clamped to 0 at and below onset
/// (no discharge exists there; the raw quadratic would go negative).
inline double townsend_current(const TownsendModel& model, const OperatingPoint& op) {
    if (op.voltage <= model.v_crit) return 0.0;
    return model.c_geom * op.voltage * (op.voltage - model.v_crit);
}

/// Coulomb force on the ion volume, F = I*d/mu.
inline double coulomb_thrust(double current, const ThrusterGeometry& geom,
                             const GasMedium& gas) {
    return current * geom.gap_d / gas.ion_mobility;
}

/// Thrust directly from the Townsend law: coulomb_thrust of townsend_current.
inline double townsend_thrust(const TownsendModel& model, const OperatingPoint& op,
                              const ThrusterGeometry& geom, const GasMedium& gas) {
    return coulomb_thrust(townsend_current(model, op), geom, gas);
}

/// Electrical input power P = I*V.
inline double corona_power(double current, const OperatingPoint& op) {
    return current * op.voltage;
}

/// Ideal thrust-per-power F/P = d/(mu*V). Undefined at V = 0.
inline double ideal_efficiency(const ThrusterGeometry& geom, const GasMedium& gas,
                               const OperatingPoint& op) {
    if (op.voltage <= 0.0)
        throw Error(ErrorCode::domain_error,
                    "ideal_efficiency is undefined at zero voltage");
    return geom.gap_d / (gas.ion_mobility * op.voltage);
}

/// Thrust per unit mesh flow area.
inline double thrust_density(double thrust, const ThrusterGeometry& geom) {
    return thrust / geom.flow_area;
}

inline double thrust_to_weight(double total_thrust, double mass, double g) {
    return total_thrust / (mass * g);
}

/// Evaluates the whole performance bundle at one operating point. The thrust
/// field carries the loss-adjusted (measured-model) value eta * F_townsend.
inline ThrusterPerformance evaluate_operating_point(const TownsendModel& model,
                                                    const LossModel& loss,
                                                    const ThrusterGeometry& geom,
                                                    const GasMedium& gas,
                                                    const OperatingPoint& op) {
    ThrusterPerformance perf;
    perf.current = townsend_current(model, op);
    perf.thrust = loss.eta * coulomb_thrust(perf.current, geom, gas);
    perf.power = corona_power(perf.current, op);
    perf.efficiency = ideal_efficiency(geom, gas, op);
    perf.thrust_density = thrust_density(perf.thrust, geom);
    perf.thrust_density_per_power =
        perf.power > 0.0 ? perf.thrust_density / perf.power : 0.0;
    return perf;
}

} // namespace ehd
