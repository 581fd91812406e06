#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "ehd/core.hpp"
#include "ehd/errors.hpp"

// Planar (x-z) rigid-body dynamics of the quad thruster and a PD hover
// controller. Thruster numbering follows the free-body convention used by
// the dynamics: the F2+F4 pair sits on the +x side of center, F1+F3 on the
// -x side, both at lever arm l, thrusting along the body axis (rotated with
// the body by theta):
//
//     I_p * theta_dd = [(F2+F4) - (F1+F3)] * l
//     m * z_dd       = [(F2+F4) + (F1+F3)] * cos(theta) - m*g
//     m * x_dd       = [(F2+F4) + (F1+F3)] * sin(theta)

namespace ehd::flightdyn {

struct QuadParams {
    double mass = 0.0;        // kg
    double inertia_ip = 0.0;  // kg*m^2 about the pitch/roll axis
    double lever_arm_l = 0.0; // m
    double g = 9.80;          // m/s^2
};

struct QuadState {
    double x = 0.0;
    double z = 0.0;
    double theta = 0.0;
    double x_dot = 0.0;
    double z_dot = 0.0;
    double theta_dot = 0.0;
    double time = 0.0;
};

/// Voltage-commanded thruster bank: Townsend thrust between onset and
/// sparkover, zero below onset, permanent failure above sparkover.
struct ActuatorModel {
    TownsendModel townsend;
    LossModel loss;
    ThrusterGeometry geom;
    GasMedium gas;
    double v_min = 0.0;     // V, lowest commanded operating voltage
    double v_spark = 0.0;   // V, sparkover limit
    double v_margin = 100.0; // V kept below v_spark by the controller
};

/// Commanded voltages in thruster order (F1, F2, F3, F4).
struct ThrustCommand {
    std::array<double, 4> voltages{};
};

struct ControllerGains {
    double kp_theta = 0.0;  // N per rad of attitude error (force differential)
    double kd_theta = 0.0;  // N per rad/s
    double kp_z = 0.0;      // N per m of altitude error (total force)
    double kd_z = 0.0;      // N per m/s
};

struct SimConfig {
    double dt = 1e-3;       // s
    double duration = 1.0;  // s
    int record_stride = 1;  // steps between recorded samples
};

/// Per-run sparkover memory; a thruster that ever exceeds v_spark stays dead.
struct SparkLatch {
    std::array<bool, 4> failed{};
};

inline void validate(const QuadParams& p) {
    if (!(p.mass > 0.0 && p.inertia_ip > 0.0 && p.lever_arm_l > 0.0 && p.g > 0.0))
        throw Error(ErrorCode::schema_error, "quad parameters must all be > 0");
}

inline void validate(const ActuatorModel& act) {
    validate(act.townsend);
    validate(act.loss);
    validate(act.geom);
    validate(act.gas);
    if (!(act.townsend.v_crit <= act.v_min && act.v_min < act.v_spark))
        throw Error(ErrorCode::schema_error, "need v_crit <= v_min < v_spark");
    if (!(act.v_margin >= 0.0 && act.v_min <= act.v_spark - act.v_margin))
        throw Error(ErrorCode::schema_error, "v_margin leaves no command range");
}

inline void validate(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.duration >= cfg.dt) || cfg.record_stride < 1)
        throw Error(ErrorCode::schema_error, "invalid simulation config");
}

/// Forces produced by one command, updating the sparkover latch.
inline std::array<double, 4> thrust_from_command(const ActuatorModel& act,
                                                 const ThrustCommand& cmd,
                                                 SparkLatch& latch) {
    std::array<double, 4> forces{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double v = cmd.voltages[i];
        if (v > act.v_spark) latch.failed[i] = true;
        if (latch.failed[i] || v <= act.townsend.v_crit) {
            forces[i] = 0.0;
            continue;
        }
        forces[i] = act.loss.eta * townsend_thrust(act.townsend, {v}, act.geom, act.gas);
    }
    return forces;
}

struct StateDerivative {
    double x_dot = 0.0;
    double z_dot = 0.0;
    double theta_dot = 0.0;
    double x_ddot = 0.0;
    double z_ddot = 0.0;
    double theta_ddot = 0.0;
};

inline StateDerivative dynamics_rhs(const QuadState& state,
                                    const std::array<double, 4>& forces,
                                    const QuadParams& params) {
    const double pair13 = forces[0] + forces[2];
    const double pair24 = forces[1] + forces[3];
    const double total = pair13 + pair24;
    StateDerivative d;
    d.x_dot = state.x_dot;
    d.z_dot = state.z_dot;
    d.theta_dot = state.theta_dot;
    d.theta_ddot = (pair24 - pair13) * params.lever_arm_l / params.inertia_ip;
    d.z_ddot = total * std::cos(state.theta) / params.mass - params.g;
    d.x_ddot = total * std::sin(state.theta) / params.mass;
    return d;
}

/// Classical 4th-order Runge-Kutta step with forces held constant (the
/// attitude still rotates within the step, so the stage states differ).
inline QuadState step_rk4(const QuadState& state, const std::array<double, 4>& forces,
                          const QuadParams& params, double dt) {
    const auto shifted = [&](const StateDerivative& d, double h) {
        QuadState s = state;
        s.x += h * d.x_dot;
        s.z += h * d.z_dot;
        s.theta += h * d.theta_dot;
        s.x_dot += h * d.x_ddot;
        s.z_dot += h * d.z_ddot;
        s.theta_dot += h * d.theta_ddot;
        return s;
    };
    const StateDerivative k1 = dynamics_rhs(state, forces, params);
    const StateDerivative k2 = dynamics_rhs(shifted(k1, dt / 2.0), forces, params);
    const StateDerivative k3 = dynamics_rhs(shifted(k2, dt / 2.0), forces, params);
    const StateDerivative k4 = dynamics_rhs(shifted(k3, dt), forces, params);

    QuadState next = state;
    const double w = dt / 6.0;
    next.x += w * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot);
    next.z += w * (k1.z_dot + 2.0 * k2.z_dot + 2.0 * k3.z_dot + k4.z_dot);
    next.theta += w * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot);
    next.x_dot += w * (k1.x_ddot + 2.0 * k2.x_ddot + 2.0 * k3.x_ddot + k4.x_ddot);
    next.z_dot += w * (k1.z_ddot + 2.0 * k2.z_ddot + 2.0 * k3.z_ddot + k4.z_ddot);
    next.theta_dot +=
        w * (k1.theta_ddot + 2.0 * k2.theta_ddot + 2.0 * k3.theta_ddot + k4.theta_ddot);
    next.time += dt;
    return next;
}

/// Largest force a single thruster may be commanded to (at v_spark - v_margin).
inline double max_commandable_thrust(const ActuatorModel& act) {
    const double v_cap = act.v_spark - act.v_margin;
    return act.loss.eta * townsend_thrust(act.townsend, {v_cap}, act.geom, act.gas);
}

/// Inverts eta*C*V*(V - V_crit)*d/mu = desired for the commanded voltage.
/// Saturating: 0 for no thrust, v_min floor for sub-floor demands, and
/// v_spark - v_margin when the demand exceeds what is commandable.
inline double invert_thrust_to_voltage(const ActuatorModel& act, double desired) {
    if (desired <= 0.0) return 0.0;
    const double v_cap = act.v_spark - act.v_margin;
    if (desired >= max_commandable_thrust(act)) return v_cap;
    const double floor_thrust =
        act.loss.eta * townsend_thrust(act.townsend, {act.v_min}, act.geom, act.gas);
    if (desired <= floor_thrust) return act.v_min;

    const double k =
        act.loss.eta * act.townsend.c_geom * act.geom.gap_d / act.gas.ion_mobility;
    const double v_crit = act.townsend.v_crit;
    return 0.5 * (v_crit + std::sqrt(v_crit * v_crit + 4.0 * desired / k));
}

struct Setpoint {
    double theta_ref = 0.0;  // rad
    double z_ref = 0.0;      // m
};

struct ControlOutput {
    ThrustCommand command;
    bool unreachable_setpoint = false;
};

/// PD attitude + altitude control with gravity feedforward. Total force and
/// force differential are allocated symmetrically onto the two thruster
/// pairs, then mapped to voltages through the inverse Townsend law.
inline ControlOutput pd_controller(const QuadState& state, const Setpoint& setpoint,
                                   const ControllerGains& gains, const ActuatorModel& act,
                                   const QuadParams& params) {
    // Feedforward holds weight through the thrust tilt; the cosine is floored
    // so an extreme excursion cannot demand unbounded force.
    const double cos_theta = std::max(std::cos(state.theta), 0.1);
    const double total = params.mass * params.g / cos_theta +
                         gains.kp_z * (setpoint.z_ref - state.z) -
                         gains.kd_z * state.z_dot;
    const double diff = gains.kp_theta * (setpoint.theta_ref - state.theta) -
                        gains.kd_theta * state.theta_dot;

    const std::array<double, 4> desired = {
        (total - diff) / 4.0,  // F1
        (total + diff) / 4.0,  // F2
        (total - diff) / 4.0,  // F3
        (total + diff) / 4.0,  // F4
    };

    ControlOutput out;
    const double f_max = max_commandable_thrust(act);
    for (std::size_t i = 0; i < 4; ++i) {
        if (desired[i] > f_max) out.unreachable_setpoint = true;
        out.command.voltages[i] = invert_thrust_to_voltage(act, desired[i]);
    }
    return out;
}

struct TrajectoryPoint {
    QuadState state;
    ThrustCommand command;
    std::array<double, 4> forces{};
    bool unreachable_setpoint = false;
};

/// Per-step command authority: a feedback controller or an open-loop schedule.
using CommandSource = std::function<ControlOutput(const QuadState&)>;

inline CommandSource constant_voltage_source(double voltage) {
    return [voltage](const QuadState&) {
        ControlOutput out;
        out.command.voltages = {voltage, voltage, voltage, voltage};
        return out;
    };
}

inline CommandSource pd_source(const Setpoint& setpoint, const ControllerGains& gains,
                               const ActuatorModel& act, const QuadParams& params) {
    return [=](const QuadState& state) {
        return pd_controller(state, setpoint, gains, act, params);
    };
}

namespace detail {

inline bool diverged(const QuadState& s) {
    const double limit = 1e6;
    return !(std::abs(s.x) <= limit && std::abs(s.z) <= limit &&
             std::abs(s.theta) <= limit && std::abs(s.x_dot) <= limit &&
             std::abs(s.z_dot) <= limit && std::abs(s.theta_dot) <= limit);
}

// Unilateral ground contact at z = 0: no penetration, no restitution.
inline void apply_ground_contact(QuadState& s) {
    if (s.z <= 0.0) {
        s.z = 0.0;
        if (s.z_dot < 0.0) s.z_dot = 0.0;
    }
}

} // namespace detail

/// Fixed-step rollout. Commands are recomputed every step and zero-order-held
/// across it; sparkover failures latch for the remainder of the run. Records
/// the state each record_stride steps plus the terminal state.
inline std::vector<TrajectoryPoint> simulate(const QuadState& initial,
                                             const CommandSource& source,
                                             const ActuatorModel& act,
                                             const QuadParams& params,
                                             const SimConfig& cfg) {
    validate(act);
    validate(params);
    validate(cfg);

    const auto n_steps =
        static_cast<long long>(std::llround(cfg.duration / cfg.dt));
    std::vector<TrajectoryPoint> trajectory;
    trajectory.reserve(static_cast<std::size_t>(n_steps / cfg.record_stride) + 2);

    SparkLatch latch;
    QuadState state = initial;
    detail::apply_ground_contact(state);

    ThrustCommand last_cmd;
    std::array<double, 4> last_forces{};
    bool last_unreachable = false;

    for (long long step = 0; step < n_steps; ++step) {
        const ControlOutput control = source(state);
        const std::array<double, 4> forces =
            thrust_from_command(act, control.command, latch);

        if (step % cfg.record_stride == 0)
            trajectory.push_back({state, control.command, forces,
                                  control.unreachable_setpoint});

        state = step_rk4(state, forces, params, cfg.dt);
        detail::apply_ground_contact(state);
        if (detail::diverged(state))
            throw Error(ErrorCode::numerical_divergence,
                        "state magnitude exceeded 1e6 during rollout");

        last_cmd = control.command;
        last_forces = forces;
        last_unreachable = control.unreachable_setpoint;
    }

    trajectory.push_back({state, last_cmd, last_forces, last_unreachable});
    return trajectory;
}

/// Documented default hover gains for the 37 mg vehicle: critically damped
/// altitude loop at ~10 rad/s and attitude loop at ~20 rad/s.
inline ControllerGains default_hover_gains() {
    return ControllerGains{1.2e-4, 1.2e-5, 3.7e-3, 7.4e-4};
}

} // namespace ehd::flightdyn
