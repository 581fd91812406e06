#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ehd/calib.hpp"
#include "ehd/errors.hpp"
#include "ehd/flightdyn.hpp"
#include "ehd/sweep.hpp"
#include "ehd/units.hpp"

// CSV dialect: comma separated, UTF-8, mandatory header row, '#' comment
// lines, LF on emit, LF or CRLF on parse. Numbers are emitted in canonical
// shortest-round-trip form, so emitting, parsing and re-emitting a file
// reproduces it byte for byte.

namespace ehd::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> row_lines;  // 1-based source line of each row
    int header_line = 0;
};

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(begin));
            return fields;
        }
        fields.emplace_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
}

} // namespace detail

inline Table read_csv(std::istream& in) {
    Table table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (table.header.empty()) {
            table.header = detail::split_fields(line);
            table.header_line = line_no;
            continue;
        }
        auto fields = detail::split_fields(line);
        if (fields.size() != table.header.size()) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected " << table.header.size()
                << " fields, got " << fields.size();
            throw Error(ErrorCode::parse_error, msg.str());
        }
        table.rows.push_back(std::move(fields));
        table.row_lines.push_back(line_no);
    }
    if (table.header.empty())
        throw Error(ErrorCode::empty_file, "no header row found");
    return table;
}

inline void write_csv(std::ostream& out, const Table& table,
                      const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

struct Measurements {
    std::vector<calib::VISample> vi;
    std::vector<calib::VFSample> vf;
};

namespace detail {

struct MeasurementColumns {
    int thruster = -1;
    int voltage = -1;
    int current = -1;
    int thrust = -1;
    double voltage_scale = 1.0;
    double current_scale = 1.0;
    double thrust_scale = 1.0;
};

inline MeasurementColumns resolve_columns(const Table& table) {
    MeasurementColumns cols;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        const std::string& name = table.header[i];
        const std::size_t underscore = name.find('_');
        const std::string base = name.substr(0, underscore);
        const std::string suffix =
            underscore == std::string::npos ? "" : name.substr(underscore + 1);
        const int index = static_cast<int>(i);
        if (base == "thruster" || base == "thruster_id" || name == "thruster_id") {
            cols.thruster = index;
        } else if (base == "voltage") {
            cols.voltage = index;
            if (!suffix.empty())
                cols.voltage_scale = units::suffix_scale(suffix, units::Dimension::voltage);
        } else if (base == "current") {
            cols.current = index;
            if (!suffix.empty())
                cols.current_scale = units::suffix_scale(suffix, units::Dimension::current);
        } else if (base == "thrust") {
            cols.thrust = index;
            if (!suffix.empty())
                cols.thrust_scale = units::suffix_scale(suffix, units::Dimension::force);
        } else {
            throw Error(ErrorCode::parse_error, "unknown column '" + name + "'");
        }
    }
    if (cols.thruster < 0)
        throw Error(ErrorCode::parse_error, "missing 'thruster' column");
    if (cols.voltage < 0)
        throw Error(ErrorCode::parse_error, "missing 'voltage' column");
    if (cols.current < 0 && cols.thrust < 0)
        throw Error(ErrorCode::parse_error, "need a 'current' or 'thrust' column");
    return cols;
}

inline Error row_error(int line, const std::string& column, const std::string& what) {
    std::ostringstream msg;
    msg << "line " << line << ", column '" << column << "': " << what;
    return Error(ErrorCode::parse_error, msg.str());
}

} // namespace detail

/// Reads a measurement file into SI samples. Header units convert at the
/// boundary; a row may leave current or thrust blank but not both.
inline Measurements parse_measurements(std::istream& in) {
    const Table table = read_csv(in);
    const auto cols = detail::resolve_columns(table);

    Measurements out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.row_lines[r];

        const std::string& id_text = row[static_cast<std::size_t>(cols.thruster)];
        int thruster_id = 0;
        try {
            std::size_t used = 0;
            thruster_id = std::stoi(id_text, &used);
            if (used != id_text.size()) throw std::invalid_argument(id_text);
        } catch (const std::exception&) {
            throw detail::row_error(line, "thruster", "not an integer: '" + id_text + "'");
        }

        const std::string& v_text = row[static_cast<std::size_t>(cols.voltage)];
        if (v_text.empty()) throw detail::row_error(line, "voltage", "missing value");
        double voltage = 0.0;
        try {
            voltage = units::parse_number(v_text) * cols.voltage_scale;
        } catch (const Error&) {
            throw detail::row_error(line, "voltage", "not a number: '" + v_text + "'");
        }
        if (!(voltage > 0.0))
            throw detail::row_error(line, "voltage", "must be > 0");

        bool has_measurement = false;
        if (cols.current >= 0) {
            const std::string& text = row[static_cast<std::size_t>(cols.current)];
            if (!text.empty()) {
                double current = 0.0;
                try {
                    current = units::parse_number(text) * cols.current_scale;
                } catch (const Error&) {
                    throw detail::row_error(line, "current", "not a number: '" + text + "'");
                }
                if (current < 0.0)
                    throw detail::row_error(line, "current", "must be >= 0");
                out.vi.push_back({voltage, current, thruster_id});
                has_measurement = true;
            }
        }
        if (cols.thrust >= 0) {
            const std::string& text = row[static_cast<std::size_t>(cols.thrust)];
            if (!text.empty()) {
                double thrust = 0.0;
                try {
                    thrust = units::parse_number(text) * cols.thrust_scale;
                } catch (const Error&) {
                    throw detail::row_error(line, "thrust", "not a number: '" + text + "'");
                }
                if (thrust < 0.0)
                    throw detail::row_error(line, "thrust", "must be >= 0");
                out.vf.push_back({voltage, thrust, thruster_id});
                has_measurement = true;
            }
        }
        if (!has_measurement)
            throw detail::row_error(line, "current/thrust", "row carries no measurement");
    }
    return out;
}

inline Measurements parse_measurements(const std::string& text) {
    std::istringstream in(text);
    return parse_measurements(in);
}

/// Canonical SI emission of V-I samples.
inline void emit_vi_csv(std::ostream& out, const std::vector<calib::VISample>& samples,
                        const std::vector<std::string>& comments = {}) {
    Table table;
    table.header = {"thruster", "voltage_V", "current_A"};
    for (const auto& s : samples)
        table.rows.push_back({std::to_string(s.thruster_id),
                              units::format_double(s.voltage),
                              units::format_double(s.current)});
    write_csv(out, table, comments);
}

/// Canonical SI emission of V-thrust samples.
inline void emit_vf_csv(std::ostream& out, const std::vector<calib::VFSample>& samples,
                        const std::vector<std::string>& comments = {}) {
    Table table;
    table.header = {"thruster", "voltage_V", "thrust_N"};
    for (const auto& s : samples)
        table.rows.push_back({std::to_string(s.thruster_id),
                              units::format_double(s.voltage),
                              units::format_double(s.thrust)});
    write_csv(out, table, comments);
}

inline void emit_sweep_csv(std::ostream& out, sweep::SweepAxis axis,
                           const std::vector<sweep::SweepRow>& rows,
                           const std::vector<std::string>& comments = {}) {
    Table table;
    table.header = {std::string(sweep::to_string(axis)), "current_A", "thrust_N",
                    "power_W",  "efficiency_N_per_W",    "thrust_density_N_per_m2",
                    "thrust_density_per_power"};
    for (const auto& r : rows)
        table.rows.push_back({units::format_double(r.axis_value),
                              units::format_double(r.performance.current),
                              units::format_double(r.performance.thrust),
                              units::format_double(r.performance.power),
                              units::format_double(r.performance.efficiency),
                              units::format_double(r.performance.thrust_density),
                              units::format_double(r.performance.thrust_density_per_power)});
    write_csv(out, table, comments);
}

inline void emit_trajectory_csv(std::ostream& out,
                                const std::vector<flightdyn::TrajectoryPoint>& trajectory,
                                const std::vector<std::string>& comments = {}) {
    Table table;
    table.header = {"time_s", "x_m", "z_m", "theta_rad", "x_dot_m_s", "z_dot_m_s",
                    "theta_dot_rad_s", "v1_V", "v2_V", "v3_V", "v4_V",
                    "f1_N", "f2_N", "f3_N", "f4_N", "unreachable"};
    for (const auto& p : trajectory) {
        std::vector<std::string> row = {
            units::format_double(p.state.time), units::format_double(p.state.x),
            units::format_double(p.state.z), units::format_double(p.state.theta),
            units::format_double(p.state.x_dot), units::format_double(p.state.z_dot),
            units::format_double(p.state.theta_dot)};
        for (double v : p.command.voltages) row.push_back(units::format_double(v));
        for (double f : p.forces) row.push_back(units::format_double(f));
        row.push_back(p.unreachable_setpoint ? "1" : "0");
        table.rows.push_back(std::move(row));
    }
    write_csv(out, table, comments);
}

} // namespace ehd::csv
