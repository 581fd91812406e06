// ehdtool: fit, predict, sweep, simulate and report on the quad-thruster
// model from the command line. All library math is SI; flags accept unit
// suffixes (5.2kV, 260uN, 37mg) and convert here at the boundary.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehd/ehd.hpp"

namespace fs = std::filesystem;
using ehd::Error;
using ehd::ErrorCode;

namespace {

// ---------------------------------------------------------------------------
// Output plumbing

fs::path resolve_output_path(const std::string& raw) {
    fs::path path(raw);
    const char* out_dir = std::getenv("EHDTOOL_OUTPUT_DIR");
    if (out_dir && *out_dir && path.is_relative()) {
        path = fs::path(out_dir) / path;
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    return path;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
        out << content;
        if (!out) throw Error(ErrorCode::io_error, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::io_error, "cannot move output into " + path.string());
    }
}

void emit(const std::string& content, const std::string& out_flag) {
    if (out_flag.empty()) {
        std::cout << content;
    } else {
        write_file_atomic(resolve_output_path(out_flag), content);
    }
}

std::vector<std::string> csv_comments(bool timestamp) {
    std::vector<std::string> comments;
    if (timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        comments.push_back(std::string("generated ") + buf);
    }
    return comments;
}

// ---------------------------------------------------------------------------
// Model loading

ehd::io::ModelArtifact default_artifact() {
    ehd::io::ModelArtifact a;
    a.model = ehd::constants::default_townsend();
    a.loss = ehd::constants::default_loss();
    a.geometry = ehd::constants::default_geometry();
    a.gas = ehd::constants::default_gas();
    a.v_crit_mean = ehd::constants::v_onset;
    a.v_crit_std = 100.0;
    return a;
}

ehd::io::ModelArtifact artifact_from_flag(const std::string& model_path) {
    if (model_path.empty()) return default_artifact();
    return ehd::io::load_model(model_path);
}

ehd::flightdyn::ActuatorModel actuator_from_artifact(const ehd::io::ModelArtifact& a,
                                                     double v_margin) {
    ehd::flightdyn::ActuatorModel act;
    act.townsend = a.model;
    act.loss = a.loss;
    act.geom = a.geometry;
    act.gas = a.gas;
    act.v_min = a.vehicle.v_min;
    act.v_spark = a.vehicle.v_spark;
    act.v_margin = v_margin;
    return act;
}

std::string kv_line(const std::string& key, const std::string& value) {
    std::ostringstream out;
    out << std::left << std::setw(34) << key << value << "\n";
    return out.str();
}

std::string kv_line(const std::string& key, double value) {
    return kv_line(key, ehd::units::format_double(value));
}

// ---------------------------------------------------------------------------
// Subcommands

int run_fit(const std::string& data_path, const std::string& out_path,
            const ehd::ThrusterGeometry& geom, const ehd::GasMedium& gas) {
    std::ifstream in(data_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot read " + data_path);
    const ehd::csv::Measurements data = ehd::csv::parse_measurements(in);
    if (data.vi.empty())
        throw Error(ErrorCode::insufficient_data, "no current samples in " + data_path);

    const ehd::calib::FitResult fit = ehd::calib::fit_townsend(data.vi);
    ehd::LossModel loss{1.0};
    if (!data.vf.empty()) loss = ehd::calib::fit_loss(data.vf, fit.model, geom, gas);

    std::ostringstream out;
    out << kv_line("pooled_c_geom_A_V2", fit.model.c_geom)
        << kv_line("pooled_v_crit_V", fit.model.v_crit)
        << kv_line("rms_residual_A", fit.rms_residual);
    for (const auto& p : fit.per_thruster_models) {
        std::ostringstream key;
        key << "thruster_" << p.thruster_id;
        std::ostringstream val;
        val << "C=" << ehd::units::format_double(p.model.c_geom)
            << " V_crit=" << ehd::units::format_double(p.model.v_crit)
            << " rms=" << ehd::units::format_double(p.rms_residual);
        out << kv_line(key.str(), val.str());
    }
    out << kv_line("v_crit_mean_V", fit.v_crit_mean)
        << kv_line("v_crit_std_V", fit.v_crit_std)
        << kv_line("eta", loss.eta);
    if (data.vf.empty()) out << kv_line("eta_note", "no thrust samples; eta left at 1");
    std::cout << out.str();

    if (!out_path.empty()) {
        const auto artifact = ehd::io::make_artifact(fit, loss, geom, gas);
        ehd::io::save_model(artifact, resolve_output_path(out_path));
    }
    return 0;
}

int run_predict(const std::string& model_path, double voltage, bool as_csv,
                const std::string& out_path, bool timestamp) {
    const auto artifact = artifact_from_flag(model_path);
    const ehd::OperatingPoint op{voltage};
    const ehd::ThrusterPerformance perf = ehd::evaluate_operating_point(
        artifact.model, artifact.loss, artifact.geometry, artifact.gas, op);
    const double ideal_thrust =
        ehd::townsend_thrust(artifact.model, op, artifact.geometry, artifact.gas);
    const double weight = artifact.vehicle.mass * artifact.vehicle.gravity;

    const std::vector<std::pair<std::string, double>> fields = {
        {"voltage_V", voltage},
        {"current_A", perf.current},
        {"townsend_thrust_N", ideal_thrust},
        {"expected_thrust_N", perf.thrust},
        {"quad_townsend_thrust_N", 4.0 * ideal_thrust},
        {"quad_expected_thrust_N", 4.0 * perf.thrust},
        {"power_W", perf.power},
        {"quad_power_W", 4.0 * perf.power},
        {"efficiency_N_per_W", perf.efficiency},
        {"thrust_density_N_per_m2", perf.thrust_density},
        {"thrust_density_per_power", perf.thrust_density_per_power},
        {"quad_townsend_thrust_to_weight",
         ehd::thrust_to_weight(4.0 * ideal_thrust, artifact.vehicle.mass,
                               artifact.vehicle.gravity)},
        {"quad_expected_thrust_to_weight", 4.0 * perf.thrust / weight},
    };

    std::ostringstream out;
    if (as_csv) {
        ehd::csv::Table table;
        std::vector<std::string> row;
        for (const auto& [key, value] : fields) {
            table.header.push_back(key);
            row.push_back(ehd::units::format_double(value));
        }
        table.rows.push_back(row);
        ehd::csv::write_csv(out, table, csv_comments(timestamp));
    } else {
        for (const auto& [key, value] : fields) out << kv_line(key, value);
    }
    emit(out.str(), out_path);
    return 0;
}

int run_sweep(const std::string& model_path, const std::string& axis_name,
              const std::string& from_text, const std::string& to_text, int steps,
              const std::string& voltage_text, const std::string& out_path,
              bool timestamp) {
    const auto artifact = artifact_from_flag(model_path);
    ehd::sweep::SweepSpec spec;
    spec.model = artifact.model;
    spec.geom = artifact.geometry;
    spec.gas = artifact.gas;
    spec.loss = artifact.loss;
    spec.steps = steps;

    if (axis_name == "voltage") {
        spec.axis = ehd::sweep::SweepAxis::voltage;
        spec.start = ehd::units::parse_quantity(from_text, ehd::units::Dimension::voltage);
        spec.stop = ehd::units::parse_quantity(to_text, ehd::units::Dimension::voltage);
    } else if (axis_name == "gap_d") {
        spec.axis = ehd::sweep::SweepAxis::gap_d;
        spec.start = ehd::units::parse_quantity(from_text, ehd::units::Dimension::length);
        spec.stop = ehd::units::parse_quantity(to_text, ehd::units::Dimension::length);
    } else if (axis_name == "c_geom") {
        spec.axis = ehd::sweep::SweepAxis::c_geom;
        spec.start = ehd::units::parse_number(from_text);
        spec.stop = ehd::units::parse_number(to_text);
    } else {
        throw Error(ErrorCode::usage_error, "unknown sweep axis '" + axis_name + "'");
    }

    if (spec.axis != ehd::sweep::SweepAxis::voltage) {
        if (voltage_text.empty())
            throw Error(ErrorCode::usage_error,
                        "--voltage is required for non-voltage sweep axes");
        spec.op.voltage =
            ehd::units::parse_quantity(voltage_text, ehd::units::Dimension::voltage);
    }

    const auto rows = ehd::sweep::run_sweep(spec);
    std::ostringstream out;
    ehd::csv::emit_sweep_csv(out, spec.axis, rows, csv_comments(timestamp));
    emit(out.str(), out_path);
    return 0;
}

int run_simulate(const std::string& model_path, const std::string& mode,
                 const std::string& voltage_text, double z_ref, double theta_ref,
                 double z0, double theta0, const ehd::flightdyn::ControllerGains& gains,
                 const ehd::flightdyn::SimConfig& cfg, double v_margin,
                 std::optional<double> mass_override, std::optional<double> inertia_override,
                 const std::string& out_path, bool timestamp) {
    const auto artifact = artifact_from_flag(model_path);
    const auto act = actuator_from_artifact(artifact, v_margin);

    ehd::flightdyn::QuadParams params;
    params.mass = mass_override.value_or(artifact.vehicle.mass);
    params.inertia_ip = inertia_override.value_or(artifact.vehicle.inertia_ip);
    params.lever_arm_l = artifact.geometry.lever_arm_l;
    params.g = artifact.vehicle.gravity;

    ehd::flightdyn::QuadState initial;
    initial.z = z0;
    initial.theta = theta0;

    ehd::flightdyn::CommandSource source;
    if (mode == "openloop") {
        if (voltage_text.empty())
            throw Error(ErrorCode::usage_error, "--voltage is required in openloop mode");
        const double voltage =
            ehd::units::parse_quantity(voltage_text, ehd::units::Dimension::voltage);
        source = ehd::flightdyn::constant_voltage_source(voltage);
    } else if (mode == "hover") {
        source = ehd::flightdyn::pd_source({theta_ref, z_ref}, gains, act, params);
    } else {
        throw Error(ErrorCode::usage_error, "unknown simulate mode '" + mode + "'");
    }

    const auto trajectory = ehd::flightdyn::simulate(initial, source, act, params, cfg);
    std::ostringstream out;
    ehd::csv::emit_trajectory_csv(out, trajectory, csv_comments(timestamp));
    emit(out.str(), out_path);
    return 0;
}

int run_report(const std::string& model_path, const std::string& basis_name,
               double target_power, bool as_csv, const std::string& out_path,
               bool timestamp) {
    const auto artifact = artifact_from_flag(model_path);

    const double peak_v = artifact.vehicle.v_spark;
    const ehd::ThrusterPerformance peak = ehd::evaluate_operating_point(
        artifact.model, artifact.loss, artifact.geometry, artifact.gas, {peak_v});
    std::vector<ehd::sweep::BenchmarkEntry> entries = {
        ehd::sweep::quad_thruster_entry(),
        ehd::sweep::robofly_entry(),
        {"model@" + ehd::units::format_double(peak_v) + "V", peak.thrust, peak.power,
         artifact.geometry.flow_area, artifact.vehicle.mass * artifact.vehicle.gravity},
    };

    const auto basis = basis_name == "thruster" ? ehd::sweep::PowerBasis::per_thruster
                                                : ehd::sweep::PowerBasis::whole_quad;
    const auto matched = ehd::sweep::ionocraft_comparison(
        artifact.model, artifact.loss, artifact.geometry, artifact.gas,
        artifact.vehicle.v_spark, basis, target_power,
        artifact.vehicle.mass * artifact.vehicle.gravity);

    if (!as_csv) {
        std::ostringstream out;
        out << ehd::sweep::format_benchmark_table(entries) << "\n"
            << "matched power comparison (" << ehd::units::format_double(target_power)
            << " W, " << (basis == ehd::sweep::PowerBasis::whole_quad ? "whole quad" : "per thruster")
            << "):\n"
            << ehd::sweep::format_matched_power_table(matched);
        emit(out.str(), out_path);
        return 0;
    }

    if (out_path.empty())
        throw Error(ErrorCode::usage_error, "--csv report needs -o BASE for its two tables");

    ehd::csv::Table bench;
    bench.header = {"design", "thrust_N", "power_W", "area_m2",
                    "weight_N", "efficiency_N_per_W", "density_N_per_m2",
                    "density_per_power"};
    for (const auto& e : entries) {
        const auto d = ehd::sweep::derive(e);
        bench.rows.push_back(
            {e.name, ehd::units::format_double(e.thrust), ehd::units::format_double(e.power),
             ehd::units::format_double(e.area),
             e.weight ? ehd::units::format_double(*e.weight) : "",
             ehd::units::format_double(d.efficiency), ehd::units::format_double(d.density),
             ehd::units::format_double(d.density_per_power)});
    }
    std::ostringstream bench_text;
    ehd::csv::write_csv(bench_text, bench, csv_comments(timestamp));
    write_file_atomic(resolve_output_path(out_path + ".benchmark.csv"), bench_text.str());

    ehd::csv::Table match;
    match.header = {"design", "thrust_N", "power_W", "weight_N", "thrust_to_weight",
                    "voltage_V"};
    for (const auto* row : {&matched.reference, &matched.ours}) {
        match.rows.push_back({row->name, ehd::units::format_double(row->thrust),
                              ehd::units::format_double(row->power),
                              ehd::units::format_double(row->weight),
                              ehd::units::format_double(row->thrust_to_weight),
                              ehd::units::format_double(row->voltage)});
    }
    std::ostringstream match_text;
    ehd::csv::write_csv(match_text, match, csv_comments(timestamp));
    write_file_atomic(resolve_output_path(out_path + ".matched.csv"), match_text.str());
    return 0;
}

void print_machine_error(ErrorCode code, const std::string& message) {
    nlohmann::json j;
    j["error"] = ehd::to_string(code);
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EHD quad-thruster model toolchain"};
    app.require_subcommand(1);

    // fit ---------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit Townsend and loss models to a CSV");
    std::string fit_data, fit_out, fit_gap = "3.5mm", fit_area, fit_mobility;
    fit->add_option("data", fit_data, "measurement CSV")->required();
    fit->add_option("-o,--output", fit_out, "model artifact path");
    fit->add_option("--gap-d", fit_gap, "electrode gap (e.g. 3.5mm)");
    fit->add_option("--flow-area", fit_area, "mesh flow area in m^2");
    fit->add_option("--mobility", fit_mobility, "ion mobility in m^2/(V*s)");

    // predict -----------------------------------------------------------
    auto* predict = app.add_subcommand("predict", "evaluate one operating point");
    std::string pre_model, pre_voltage, pre_out;
    bool pre_csv = false, pre_timestamp = false;
    predict->add_option("--model", pre_model, "model artifact (default: built-in)");
    predict->add_option("--voltage", pre_voltage, "applied voltage (e.g. 5.2kV)")->required();
    predict->add_flag("--csv", pre_csv, "emit CSV instead of aligned text");
    predict->add_option("-o,--output", pre_out, "write to file instead of stdout");
    predict->add_flag("--timestamp", pre_timestamp, "add a generation-time comment");

    // sweep ---------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one axis, emit a CSV table");
    std::string sw_model, sw_axis = "voltage", sw_from, sw_to, sw_voltage, sw_out;
    int sw_steps = 0;
    bool sw_timestamp = false;
    sweep_cmd->add_option("--model", sw_model, "model artifact (default: built-in)");
    sweep_cmd->add_option("--axis", sw_axis, "voltage | gap_d | c_geom");
    sweep_cmd->add_option("--from", sw_from, "axis start (unit suffix ok)")->required();
    sweep_cmd->add_option("--to", sw_to, "axis stop")->required();
    sweep_cmd->add_option("--steps", sw_steps, "number of rows (>= 2)")->required();
    sweep_cmd->add_option("--voltage", sw_voltage, "fixed voltage for non-voltage axes");
    sweep_cmd->add_option("-o,--output", sw_out, "write to file instead of stdout");
    sweep_cmd->add_flag("--timestamp", sw_timestamp, "add a generation-time comment");

    // simulate ------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "planar flight rollout, emit trajectory CSV");
    std::string sim_model, sim_mode = "openloop", sim_voltage, sim_out;
    double sim_zref = 0.0, sim_thetaref = 0.0, sim_z0 = 0.0, sim_theta0 = 0.0;
    double sim_vmargin = ehd::constants::v_margin;
    std::optional<double> sim_mass, sim_inertia;
    ehd::flightdyn::ControllerGains sim_gains = ehd::flightdyn::default_hover_gains();
    ehd::flightdyn::SimConfig sim_cfg;
    bool sim_timestamp = false;
    sim->add_option("--model", sim_model, "model artifact (default: built-in)");
    sim->add_option("--mode", sim_mode, "openloop | hover");
    sim->add_option("--voltage", sim_voltage, "openloop command voltage (e.g. 4.6kV)");
    sim->add_option("--z-ref", sim_zref, "hover altitude setpoint, m");
    sim->add_option("--theta-ref", sim_thetaref, "hover attitude setpoint, rad");
    sim->add_option("--z0", sim_z0, "initial altitude, m");
    sim->add_option("--theta0", sim_theta0, "initial attitude, rad");
    sim->add_option("--kp-theta", sim_gains.kp_theta, "attitude P gain, N/rad");
    sim->add_option("--kd-theta", sim_gains.kd_theta, "attitude D gain, N*s/rad");
    sim->add_option("--kp-z", sim_gains.kp_z, "altitude P gain, N/m");
    sim->add_option("--kd-z", sim_gains.kd_z, "altitude D gain, N*s/m");
    sim->add_option("--dt", sim_cfg.dt, "integrator step, s");
    sim->add_option("--duration", sim_cfg.duration, "simulated time, s");
    sim->add_option("--stride", sim_cfg.record_stride, "steps between recorded rows");
    sim->add_option("--v-margin", sim_vmargin, "commanded margin below sparkover, V");
    sim->add_option("--mass", sim_mass, "override vehicle mass, kg");
    sim->add_option("--inertia", sim_inertia, "override pitch inertia, kg*m^2");
    sim->add_option("-o,--output", sim_out, "write to file instead of stdout");
    sim->add_flag("--timestamp", sim_timestamp, "add a generation-time comment");

    // report --------------------------------------------------------------
    auto* report = app.add_subcommand("report", "benchmark and matched-power tables");
    std::string rep_model, rep_basis = "quad", rep_out;
    double rep_power = 0.048;
    bool rep_csv = false, rep_timestamp = false;
    report->add_option("--model", rep_model, "model artifact (default: built-in)");
    report->add_option("--power-basis", rep_basis, "quad | thruster");
    report->add_option("--target-power", rep_power, "matched power, W");
    report->add_flag("--csv", rep_csv, "emit CSV tables (needs -o BASE)");
    report->add_option("-o,--output", rep_out, "output path (or BASE with --csv)");
    report->add_flag("--timestamp", rep_timestamp, "add a generation-time comment");

    try {
        app.parse(argc, argv);

        if (fit->parsed()) {
            ehd::ThrusterGeometry geom = ehd::constants::default_geometry();
            ehd::GasMedium gas = ehd::constants::default_gas();
            geom.gap_d = ehd::units::parse_quantity(fit_gap, ehd::units::Dimension::length);
            if (!fit_area.empty()) geom.flow_area = ehd::units::parse_number(fit_area);
            if (!fit_mobility.empty()) gas.ion_mobility = ehd::units::parse_number(fit_mobility);
            return run_fit(fit_data, fit_out, geom, gas);
        }
        if (predict->parsed()) {
            const double voltage =
                ehd::units::parse_quantity(pre_voltage, ehd::units::Dimension::voltage);
            return run_predict(pre_model, voltage, pre_csv, pre_out, pre_timestamp);
        }
        if (sweep_cmd->parsed())
            return run_sweep(sw_model, sw_axis, sw_from, sw_to, sw_steps, sw_voltage,
                             sw_out, sw_timestamp);
        if (sim->parsed())
            return run_simulate(sim_model, sim_mode, sim_voltage, sim_zref, sim_thetaref,
                                sim_z0, sim_theta0, sim_gains, sim_cfg, sim_vmargin,
                                sim_mass, sim_inertia, sim_out, sim_timestamp);
        if (report->parsed())
            return run_report(rep_model, rep_basis, rep_power, rep_csv, rep_out,
                              rep_timestamp);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        print_machine_error(ErrorCode::usage_error, e.what());
        return 2;
    } catch (const Error& e) {
        print_machine_error(e.code(), e.what());
        return e.code() == ErrorCode::usage_error ? 2 : 1;
    } catch (const std::exception& e) {
        print_machine_error(ErrorCode::io_error, std::string("unexpected: ") + e.what());
        return 1;
    }
}
