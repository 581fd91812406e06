#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "ehd/core.hpp"
#include "ehd/errors.hpp"

// Calibration of the Townsend current law and the thrust loss factor from
// measured (V, I) and (V, F) points.
//
// The current law I = C*V*(V - V_crit) is bilinear in C but not in V_crit, so
// the fit is separable least squares: for a fixed V_crit candidate the best C
// is a one-line linear least-squares solution, and V_crit itself is found by
// a 1 V grid scan followed by golden-section refinement to 0.1 V. This is
// deterministic and derivative-free. Zero-current samples are kept out of the
// residual sum; they only bound V_crit from below.

namespace ehd::calib {

struct VISample {
    double voltage = 0.0;  // V, > 0
    double current = 0.0;  // A, >= 0
    int thruster_id = 0;
};

struct VFSample {
    double voltage = 0.0;  // V, > 0
    double thrust = 0.0;   // N, >= 0
    int thruster_id = 0;
};

struct PerThrusterFit {
    int thruster_id = 0;
    TownsendModel model;
    double rms_residual = 0.0;  // A
};

struct FitResult {
    TownsendModel model;        // pooled over all supplied samples
    double rms_residual = 0.0;  // A, over positive-current samples
    std::vector<PerThrusterFit> per_thruster_models;
    double v_crit_mean = 0.0;   // V, across per-thruster fits
    double v_crit_std = 0.0;    // V, sample std (n-1)
};

namespace detail {

inline constexpr double grid_step_v = 1.0;
inline constexpr double refine_tol_v = 0.1;

// Best C for a fixed onset candidate, plus the full clamped-model SSE over
// every positive-current sample (samples at or below the candidate predict 0).
struct CandidateFit {
    double c = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

inline CandidateFit fit_at_onset(double v_crit, const std::vector<VISample>& samples) {
    double sxx = 0.0, sxy = 0.0;
    for (const auto& s : samples) {
        if (s.current <= 0.0 || s.voltage <= v_crit) continue;
        const double x = s.voltage * (s.voltage - v_crit);
        sxx += x * x;
        sxy += s.current * x;
    }
    CandidateFit out;
    if (sxx > 0.0) out.c = sxy / sxx;
    out.sse = 0.0;
    for (const auto& s : samples) {
        if (s.current <= 0.0) continue;
        const double pred =
            s.voltage > v_crit ? out.c * s.voltage * (s.voltage - v_crit) : 0.0;
        const double r = s.current - pred;
        out.sse += r * r;
    }
    return out;
}

inline double golden_refine(double lo, double hi, const std::vector<VISample>& samples) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c1 = b - gr * (b - a);
    double c2 = a + gr * (b - a);
    double f1 = fit_at_onset(c1, samples).sse;
    double f2 = fit_at_onset(c2, samples).sse;
    while (b - a > refine_tol_v) {
        if (f1 < f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = fit_at_onset(c1, samples).sse;
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = fit_at_onset(c2, samples).sse;
        }
    }
    return 0.5 * (a + b);
}

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

// Canonical sample order so the fit is bit-identical under input permutation.
inline std::vector<VISample> sorted_samples(std::vector<VISample> samples) {
    std::sort(samples.begin(), samples.end(), [](const VISample& a, const VISample& b) {
        if (a.voltage != b.voltage) return a.voltage < b.voltage;
        if (a.current != b.current) return a.current < b.current;
        return a.thruster_id < b.thruster_id;
    });
    return samples;
}

inline std::pair<TownsendModel, double> fit_single(const std::vector<VISample>& input) {
    const auto samples = sorted_samples(input);

    std::vector<double> distinct;
    for (const auto& s : samples)
        if (distinct.empty() || s.voltage != distinct.back()) distinct.push_back(s.voltage);
    if (distinct.size() < 3)
        throw Error(ErrorCode::insufficient_data,
                    "townsend fit needs >= 3 distinct voltages");

    std::size_t n_pos = 0;
    double v_pos_min = std::numeric_limits<double>::infinity();
    double v_zero_max = 0.0;
    for (const auto& s : samples) {
        if (s.current > 0.0) {
            ++n_pos;
            v_pos_min = std::min(v_pos_min, s.voltage);
        } else {
            v_zero_max = std::max(v_zero_max, s.voltage);
        }
    }
    if (n_pos == 0)
        throw Error(ErrorCode::degenerate_data, "all currents are zero");
    if (n_pos < 2)
        throw Error(ErrorCode::insufficient_data,
                    "townsend fit needs >= 2 samples above onset");

    double v_lo = std::max(0.5 * samples.front().voltage, v_zero_max);
    const double v_hi = v_pos_min;
    v_lo = std::min(v_lo, v_hi);

    double best_v = v_lo;
    double best_sse = fit_at_onset(v_lo, samples).sse;
    for (double v = v_lo + grid_step_v; v < v_hi + grid_step_v; v += grid_step_v) {
        const double vc = std::min(v, v_hi);
        const double sse = fit_at_onset(vc, samples).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_v = vc;
        }
    }

    const double v_crit = golden_refine(std::max(v_lo, best_v - grid_step_v),
                                        std::min(v_hi, best_v + grid_step_v), samples);
    const CandidateFit fit = fit_at_onset(v_crit, samples);
    if (!(fit.c > 0.0))
        throw Error(ErrorCode::nonphysical_fit, "fitted geometry constant is <= 0");

    std::size_t n_above = 0;
    for (const auto& s : samples)
        if (s.current > 0.0 && s.voltage > v_crit) ++n_above;
    if (n_above < 2)
        throw Error(ErrorCode::insufficient_data,
                    "townsend fit needs >= 2 samples above the fitted onset");

    const double rms = std::sqrt(fit.sse / static_cast<double>(n_pos));
    return {TownsendModel{fit.c, v_crit}, rms};
}

} // namespace detail

/// Fits (C, V_crit) to V-I data: one pooled fit over everything plus one fit
/// per thruster id, with mean/std of the per-thruster onsets.
inline FitResult fit_townsend(const std::vector<VISample>& samples) {
    FitResult result;
    auto [pooled, rms] = detail::fit_single(samples);
    result.model = pooled;
    result.rms_residual = rms;

    std::map<int, std::vector<VISample>> by_thruster;
    for (const auto& s : samples) by_thruster[s.thruster_id].push_back(s);

    std::vector<double> onsets;
    for (const auto& [id, subset] : by_thruster) {
        auto [model, sub_rms] = detail::fit_single(subset);
        result.per_thruster_models.push_back({id, model, sub_rms});
        onsets.push_back(model.v_crit);
    }
    std::tie(result.v_crit_mean, result.v_crit_std) = detail::mean_std(onsets);
    return result;
}

/// Least-squares loss factor: eta minimizing sum (F_meas - eta*F_model)^2 over
/// samples above onset, i.e. sum(F_meas*F_model)/sum(F_model^2), capped at 1.
inline LossModel fit_loss(const std::vector<VFSample>& input, const TownsendModel& model,
                          const ThrusterGeometry& geom, const GasMedium& gas) {
    if (input.empty())
        throw Error(ErrorCode::insufficient_data, "loss fit needs >= 1 sample");

    // canonical order, same reason as the current fit: summation must not
    // depend on how the caller happened to order the samples
    std::vector<VFSample> samples = input;
    std::sort(samples.begin(), samples.end(), [](const VFSample& a, const VFSample& b) {
        if (a.voltage != b.voltage) return a.voltage < b.voltage;
        if (a.thrust != b.thrust) return a.thrust < b.thrust;
        return a.thruster_id < b.thruster_id;
    });

    double smm = 0.0, smf = 0.0;
    std::size_t n_above = 0;
    for (const auto& s : samples) {
        if (s.voltage <= model.v_crit) continue;
        const double predicted = townsend_thrust(model, {s.voltage}, geom, gas);
        smm += predicted * predicted;
        smf += s.thrust * predicted;
        ++n_above;
    }
    if (n_above == 0)
        throw Error(ErrorCode::all_below_onset, "no loss sample lies above onset");

    const double eta = smf / smm;
    if (!(eta > 0.0))
        throw Error(ErrorCode::degenerate_data, "all measured thrusts are zero");
    return LossModel{std::min(eta, 1.0)};
}

/// Mean and sample standard deviation (n-1) of per-thruster onset voltages.
inline std::pair<double, double> thruster_spread(const std::vector<FitResult>& results) {
    if (results.size() < 2)
        throw Error(ErrorCode::insufficient_data, "spread needs >= 2 thrusters");
    std::vector<double> onsets;
    onsets.reserve(results.size());
    for (const auto& r : results) onsets.push_back(r.model.v_crit);
    return detail::mean_std(onsets);
}

} // namespace ehd::calib
