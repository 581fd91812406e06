#pragma once

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ehd/core.hpp"
#include "ehd/errors.hpp"

// Parameter sweeps over the thruster model and benchmark tables comparing
// propulsion designs on efficiency (F/P), thrust density (F/area) and thrust
// density per unit power.

namespace ehd::sweep {

enum class SweepAxis { voltage, gap_d, c_geom };

inline const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::voltage: return "voltage";
        case SweepAxis::gap_d: return "gap_d";
        case SweepAxis::c_geom: return "c_geom";
    }
    return "unknown";
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::voltage;
    double start = 0.0;  // axis units (V, m, or A/V^2)
    double stop = 0.0;
    int steps = 0;       // >= 2, uniformly spaced including both endpoints
    // Fixed evaluation context; op.voltage is used for non-voltage axes.
    TownsendModel model;
    ThrusterGeometry geom;
    GasMedium gas;
    LossModel loss;
    OperatingPoint op;
};

struct SweepRow {
    double axis_value = 0.0;
    ThrusterPerformance performance;
};

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (!(spec.start < spec.stop) || spec.steps < 2)
        throw Error(ErrorCode::schema_error, "sweep needs start < stop and steps >= 2");
    validate(spec.model);
    validate(spec.geom);
    validate(spec.gas);
    validate(spec.loss);

    const double step = (spec.stop - spec.start) / static_cast<double>(spec.steps - 1);
    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(spec.steps));
    for (int i = 0; i < spec.steps; ++i) {
        const double value =
            i == spec.steps - 1 ? spec.stop : spec.start + step * static_cast<double>(i);
        TownsendModel model = spec.model;
        ThrusterGeometry geom = spec.geom;
        OperatingPoint op = spec.op;
        switch (spec.axis) {
            case SweepAxis::voltage: op.voltage = value; break;
            case SweepAxis::gap_d: geom.gap_d = value; break;
            case SweepAxis::c_geom: model.c_geom = value; break;
        }
        try {
            rows.push_back({value, evaluate_operating_point(model, spec.loss, geom,
                                                            spec.gas, op)});
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << e.what() << " (at " << to_string(spec.axis) << " = " << value << ")";
            throw Error(e.code(), msg.str());
        }
    }
    return rows;
}

/// One propulsion design; only primary measured quantities are stored, every
/// comparison metric is recomputed on demand.
struct BenchmarkEntry {
    std::string name;
    double thrust = 0.0;  // N
    double power = 0.0;   // W
    double area = 0.0;    // m^2
    std::optional<double> weight;  // N, absent when the source does not report it
};

struct BenchmarkDerived {
    double efficiency = 0.0;         // N/W
    double density = 0.0;            // N/m^2
    double density_per_power = 0.0;  // N/(m^2*W)
    std::optional<double> thrust_to_weight;
};

inline BenchmarkDerived derive(const BenchmarkEntry& e) {
    BenchmarkDerived d;
    d.efficiency = e.thrust / e.power;
    d.density = e.thrust / e.area;
    d.density_per_power = d.density / e.power;
    if (e.weight && *e.weight > 0.0) d.thrust_to_weight = e.thrust / *e.weight;
    return d;
}

struct ComparisonRatios {
    double efficiency = 0.0;         // a.efficiency / b.efficiency
    double density_per_power = 0.0;  // a.density_per_power / b.density_per_power
};

inline ComparisonRatios comparison_ratios(const BenchmarkEntry& a, const BenchmarkEntry& b) {
    const BenchmarkDerived da = derive(a);
    const BenchmarkDerived db = derive(b);
    return {da.efficiency / db.efficiency, da.density_per_power / db.density_per_power};
}

/// The measured quad-thruster operating maximum.
inline BenchmarkEntry quad_thruster_entry() {
    return {"quad-thruster", 0.295e-3, 90.4e-3, 21.6e-6, 362.6e-6};
}

/// Flapping-wing reference point (RoboFly class vehicle); no published weight
/// at this operating point, so thrust-to-weight is left blank.
inline BenchmarkEntry robofly_entry() {
    return {"robofly", 0.736e-3, 0.060, 308e-6, std::nullopt};
}

/// Which power the matched-power comparison holds fixed: the whole four
/// thruster vehicle or a single thruster.
enum class PowerBasis { whole_quad, per_thruster };

struct MatchedPowerRow {
    std::string name;
    double thrust = 0.0;        // N
    double power = 0.0;         // W
    double weight = 0.0;        // N
    double thrust_to_weight = 0.0;
    double voltage = 0.0;       // V, 0 for fixed literature rows
};

struct MatchedPowerComparison {
    MatchedPowerRow reference;
    MatchedPowerRow ours;
};

namespace detail {

inline constexpr int bisection_max_iters = 60;
inline constexpr double bisection_rel_tol = 1e-6;

} // namespace detail

/// Finds the voltage where the model's corona power equals target_power by
/// bisection (power is strictly increasing above onset), then reports our
/// vehicle's loss-adjusted thrust there next to the single-emitter ionocraft
/// row (200 uN at 0.048 W on a 98 uN vehicle).
inline MatchedPowerComparison ionocraft_comparison(
    const TownsendModel& model, const LossModel& loss, const ThrusterGeometry& geom,
    const GasMedium& gas, double v_spark, PowerBasis basis = PowerBasis::whole_quad,
    double target_power = 0.048, double vehicle_weight = 362.6e-6) {
    validate(model);
    validate(loss);
    validate(geom);
    validate(gas);

    const double thrusters = basis == PowerBasis::whole_quad ? 4.0 : 1.0;
    const auto power_at = [&](double v) {
        return thrusters * corona_power(townsend_current(model, {v}), {v});
    };
    if (target_power > power_at(v_spark))
        throw Error(ErrorCode::power_unreachable,
                    "target power exceeds corona power at the sparkover limit");

    double lo = model.v_crit, hi = v_spark;
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < detail::bisection_max_iters; ++i) {
        mid = 0.5 * (lo + hi);
        const double p = power_at(mid);
        if (std::abs(p - target_power) <= detail::bisection_rel_tol * target_power) break;
        (p < target_power ? lo : hi) = mid;
    }

    MatchedPowerComparison out;
    out.reference = {"ionocraft", 200e-6, target_power, 98e-6, 200e-6 / 98e-6, 0.0};
    const double quad_thrust =
        4.0 * loss.eta * townsend_thrust(model, {mid}, geom, gas);
    out.ours = {"quad-thruster", quad_thrust, power_at(mid), vehicle_weight,
                quad_thrust / vehicle_weight, mid};
    return out;
}

namespace detail {

inline std::string fixed4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace detail

/// Aligned-text comparison table with recomputed metrics and, below it, the
/// pairwise metric ratios between entries.
inline std::string format_benchmark_table(const std::vector<BenchmarkEntry>& entries) {
    if (entries.empty())
        throw Error(ErrorCode::insufficient_data, "benchmark table needs >= 1 entry");

    std::ostringstream out;
    out << std::left << std::setw(16) << "design" << std::right << std::setw(12)
        << "thrust_mN" << std::setw(12) << "power_mW" << std::setw(12) << "area_mm2"
        << std::setw(12) << "eff_mN_W" << std::setw(14) << "dens_N_m2" << std::setw(16)
        << "dens_N_m2W" << std::setw(8) << "T_W" << "\n";
    for (const auto& e : entries) {
        const BenchmarkDerived d = derive(e);
        out << std::left << std::setw(16) << e.name << std::right << std::setw(12)
            << detail::fixed4(e.thrust * 1e3) << std::setw(12)
            << detail::fixed4(e.power * 1e3) << std::setw(12)
            << detail::fixed4(e.area * 1e6) << std::setw(12)
            << detail::fixed4(d.efficiency * 1e3) << std::setw(14)
            << detail::fixed4(d.density) << std::setw(16)
            << detail::fixed4(d.density_per_power) << std::setw(8)
            << (d.thrust_to_weight ? detail::fixed4(*d.thrust_to_weight) : "-") << "\n";
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            const ComparisonRatios r = comparison_ratios(entries[i], entries[j]);
            out << "ratio " << entries[i].name << "/" << entries[j].name
                << ": efficiency " << detail::fixed4(r.efficiency)
                << ", density_per_power " << detail::fixed4(r.density_per_power) << "\n";
        }
    }
    return out.str();
}

inline std::string format_matched_power_table(const MatchedPowerComparison& cmp) {
    std::ostringstream out;
    out << std::left << std::setw(16) << "design" << std::right << std::setw(12)
        << "thrust_uN" << std::setw(12) << "power_mW" << std::setw(12) << "weight_uN"
        << std::setw(8) << "T_W" << std::setw(12) << "voltage_V" << "\n";
    for (const MatchedPowerRow* row : {&cmp.reference, &cmp.ours}) {
        out << std::left << std::setw(16) << row->name << std::right << std::setw(12)
            << detail::fixed4(row->thrust * 1e6) << std::setw(12)
            << detail::fixed4(row->power * 1e3) << std::setw(12)
            << detail::fixed4(row->weight * 1e6) << std::setw(8)
            << detail::fixed4(row->thrust_to_weight) << std::setw(12)
            << (row->voltage > 0.0 ? detail::fixed4(row->voltage) : "-") << "\n";
    }
    return out.str();
}

} // namespace ehd::sweep
