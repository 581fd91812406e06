#pragma once

#include "ehd/core.hpp"

// Reference constants for the 37 mg quad-thruster vehicle. These are
// the values the shipped default model artifact (data/default_model.json) is
// built from; load_artifact() output wins over these whenever a fitted model
// file is supplied.

namespace ehd::constants {

inline constexpr double ion_mobility = 2e-4;     // m^2/(V*s)
inline constexpr double gap_d = 3.5e-3;          // m
inline constexpr double flow_area = 21.6e-6;     // m^2 (15x9 openings of 100 um)
inline constexpr double blockage = 0.3275;       // collector blockage fraction
inline constexpr double thruster_pitch = 7e-3;   // m, center-to-center
inline constexpr double lever_arm = 3.5e-3;      // m, half pitch
inline constexpr int emitter_tips = 8;

inline constexpr double vehicle_mass = 37e-6;    // kg
inline constexpr double gravity = 9.80;          // m/s^2, makes weight 362.6 uN
inline constexpr double vehicle_weight = 362.6e-6;  // N

inline constexpr double c_geom = 2.06e-12;       // A/V^2, calibrated
inline constexpr double v_onset = 3600.0;        // V, corona onset
inline constexpr double eta = 0.87;              // measured/ideal thrust ratio
inline constexpr double v_min = 3600.0;          // V, lower end of operating range
inline constexpr double v_spark = 5200.0;        // V, sparkover limit
inline constexpr double v_margin = 100.0;        // V kept below v_spark by control

// Uniform-plate estimate m*w^2/12 with w = 0.018 m footprint; override from a
// measured value when one exists.
inline constexpr double pitch_inertia = 1.0e-9;  // kg*m^2

inline GasMedium default_gas() { return GasMedium{ion_mobility}; }

inline ThrusterGeometry default_geometry() {
    return ThrusterGeometry{gap_d, flow_area, blockage, lever_arm, emitter_tips};
}

inline TownsendModel default_townsend() { return TownsendModel{c_geom, v_onset}; }

inline LossModel default_loss() { return LossModel{eta}; }

} // namespace ehd::constants
