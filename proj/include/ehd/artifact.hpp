#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehd/calib.hpp"
#include "ehd/constants.hpp"
#include "ehd/core.hpp"
#include "ehd/errors.hpp"

// On-disk model artifact: the fitted Townsend model (pooled and per
// thruster), loss factor, geometry, gas and fit statistics, plus the vehicle
// block the simulator needs. JSON with a mandatory format_version tag.
// Doubles are written in shortest-round-trip decimal form, so a load
// reproduces every field exactly and a re-save reproduces the file bytes.

namespace ehd::io {

inline constexpr int artifact_format_version = 1;

struct VehicleInfo {
    double mass = constants::vehicle_mass;          // kg
    double gravity = constants::gravity;            // m/s^2
    double inertia_ip = constants::pitch_inertia;   // kg*m^2
    double v_min = constants::v_min;                // V
    double v_spark = constants::v_spark;            // V
};

struct ModelArtifact {
    TownsendModel model;  // pooled fit
    std::vector<calib::PerThrusterFit> per_thruster;
    LossModel loss;
    ThrusterGeometry geometry;
    GasMedium gas;
    double rms_residual = 0.0;  // A
    double v_crit_mean = 0.0;   // V
    double v_crit_std = 0.0;    // V
    VehicleInfo vehicle;
};

inline void validate(const ModelArtifact& a) {
    validate(a.model);
    validate(a.loss);
    validate(a.geometry);
    validate(a.gas);
    for (const auto& p : a.per_thruster) validate(p.model);
    if (!(a.rms_residual >= 0.0) || !(a.v_crit_std >= 0.0))
        throw Error(ErrorCode::schema_error, "fit statistics must be >= 0");
    if (!(a.vehicle.mass > 0.0 && a.vehicle.gravity > 0.0 && a.vehicle.inertia_ip > 0.0))
        throw Error(ErrorCode::schema_error, "vehicle parameters must be > 0");
    if (!(a.model.v_crit <= a.vehicle.v_min && a.vehicle.v_min < a.vehicle.v_spark))
        throw Error(ErrorCode::schema_error, "need v_crit <= v_min < v_spark");
}

/// Bundles a calibration result with the shipped default geometry/vehicle.
inline ModelArtifact make_artifact(const calib::FitResult& fit, const LossModel& loss,
                                   const ThrusterGeometry& geom, const GasMedium& gas) {
    ModelArtifact a;
    a.model = fit.model;
    a.per_thruster = fit.per_thruster_models;
    a.loss = loss;
    a.geometry = geom;
    a.gas = gas;
    a.rms_residual = fit.rms_residual;
    a.v_crit_mean = fit.v_crit_mean;
    a.v_crit_std = fit.v_crit_std;
    a.vehicle.v_min = std::max(constants::v_min, fit.model.v_crit);
    return a;
}

namespace detail {

using json = nlohmann::ordered_json;

inline json to_json(const ModelArtifact& a) {
    json j;
    j["format_version"] = artifact_format_version;
    j["townsend"] = {{"c_geom_A_per_V2", a.model.c_geom}, {"v_crit_V", a.model.v_crit}};
    j["per_thruster"] = json::array();
    for (const auto& p : a.per_thruster)
        j["per_thruster"].push_back({{"thruster_id", p.thruster_id},
                                     {"c_geom_A_per_V2", p.model.c_geom},
                                     {"v_crit_V", p.model.v_crit},
                                     {"rms_residual_A", p.rms_residual}});
    j["loss"] = {{"eta", a.loss.eta}};
    j["geometry"] = {{"gap_d_m", a.geometry.gap_d},
                     {"flow_area_m2", a.geometry.flow_area},
                     {"blockage", a.geometry.blockage},
                     {"lever_arm_m", a.geometry.lever_arm_l},
                     {"emitter_tip_count", a.geometry.emitter_tip_count}};
    j["gas"] = {{"ion_mobility_m2_per_Vs", a.gas.ion_mobility}};
    j["fit_stats"] = {{"rms_residual_A", a.rms_residual},
                      {"v_crit_mean_V", a.v_crit_mean},
                      {"v_crit_std_V", a.v_crit_std}};
    j["vehicle"] = {{"mass_kg", a.vehicle.mass},
                    {"gravity_m_per_s2", a.vehicle.gravity},
                    {"inertia_ip_kg_m2", a.vehicle.inertia_ip},
                    {"v_min_V", a.vehicle.v_min},
                    {"v_spark_V", a.vehicle.v_spark}};
    return j;
}

inline double number_at(const json& j, const char* key) {
    if (!j.contains(key))
        throw Error(ErrorCode::schema_error, std::string("missing field '") + key + "'");
    if (!j.at(key).is_number())
        throw Error(ErrorCode::schema_error, std::string("field '") + key + "' is not a number");
    return j.at(key).get<double>();
}

inline const json& object_at(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_object())
        throw Error(ErrorCode::schema_error, std::string("missing object '") + key + "'");
    return j.at(key);
}

inline ModelArtifact from_json(const json& j) {
    if (!j.contains("format_version"))
        throw Error(ErrorCode::version_mismatch, "missing format_version tag");
    if (!j.at("format_version").is_number_integer() ||
        j.at("format_version").get<int>() != artifact_format_version)
        throw Error(ErrorCode::version_mismatch,
                    "unsupported format_version " + j.at("format_version").dump());

    ModelArtifact a;
    const json& townsend = object_at(j, "townsend");
    a.model.c_geom = number_at(townsend, "c_geom_A_per_V2");
    a.model.v_crit = number_at(townsend, "v_crit_V");

    if (j.contains("per_thruster")) {
        if (!j.at("per_thruster").is_array())
            throw Error(ErrorCode::schema_error, "per_thruster must be an array");
        for (const auto& p : j.at("per_thruster")) {
            calib::PerThrusterFit fit;
            fit.thruster_id = static_cast<int>(number_at(p, "thruster_id"));
            fit.model.c_geom = number_at(p, "c_geom_A_per_V2");
            fit.model.v_crit = number_at(p, "v_crit_V");
            fit.rms_residual = number_at(p, "rms_residual_A");
            a.per_thruster.push_back(fit);
        }
    }

    a.loss.eta = number_at(object_at(j, "loss"), "eta");

    const json& geom = object_at(j, "geometry");
    a.geometry.gap_d = number_at(geom, "gap_d_m");
    a.geometry.flow_area = number_at(geom, "flow_area_m2");
    a.geometry.blockage = number_at(geom, "blockage");
    a.geometry.lever_arm_l = number_at(geom, "lever_arm_m");
    a.geometry.emitter_tip_count = static_cast<int>(number_at(geom, "emitter_tip_count"));

    a.gas.ion_mobility = number_at(object_at(j, "gas"), "ion_mobility_m2_per_Vs");

    const json& stats = object_at(j, "fit_stats");
    a.rms_residual = number_at(stats, "rms_residual_A");
    a.v_crit_mean = number_at(stats, "v_crit_mean_V");
    a.v_crit_std = number_at(stats, "v_crit_std_V");

    const json& vehicle = object_at(j, "vehicle");
    a.vehicle.mass = number_at(vehicle, "mass_kg");
    a.vehicle.gravity = number_at(vehicle, "gravity_m_per_s2");
    a.vehicle.inertia_ip = number_at(vehicle, "inertia_ip_kg_m2");
    a.vehicle.v_min = number_at(vehicle, "v_min_V");
    a.vehicle.v_spark = number_at(vehicle, "v_spark_V");

    validate(a);
    return a;
}

} // namespace detail

inline std::string serialize_model(const ModelArtifact& artifact) {
    return detail::to_json(artifact).dump(2) + "\n";
}

inline ModelArtifact deserialize_model(const std::string& text) {
    detail::json j;
    try {
        // ignore_comments lets the shipped defaults file annotate each value
        j = detail::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::parse_error, e.what());
    }
    return detail::from_json(j);
}

/// Atomic write: the file appears complete or not at all.
inline void save_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
    validate(artifact);
    const std::string text = serialize_model(artifact);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
        out << text;
        if (!out) throw Error(ErrorCode::io_error, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::io_error, "cannot move artifact into " + path.string());
    }
}

inline ModelArtifact load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

} // namespace ehd::io
