#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ehd/calib.hpp"

// Shared test fixtures. The synthetic-data generator here is the independent
// oracle for the calibration round trips: it evaluates the current law
// directly, never through the library.

namespace testsupport {

// Deterministic standard-normal stream: mt19937_64, 53-bit uniforms via
// (x >> 11) * 2^-53, Box-Muller (cosine branch, one draw per pair). The same
// construction is documented in the README so other implementations can
// reproduce the exact datasets.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        const double u1 = std::max(uniform(), 0x1p-53);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
    std::mt19937_64 engine_;
};

// Direct evaluation of I = C*V*(V - V_crit); zero at or below onset.
inline double townsend_law(double c, double v_crit, double v) {
    return v > v_crit ? c * v * (v - v_crit) : 0.0;
}

inline std::vector<ehd::calib::VISample> make_vi_samples(
    double c, double v_crit, const std::vector<double>& voltages, int thruster_id = 1) {
    std::vector<ehd::calib::VISample> samples;
    samples.reserve(voltages.size());
    for (double v : voltages)
        samples.push_back({v, townsend_law(c, v_crit, v), thruster_id});
    return samples;
}

inline std::vector<ehd::calib::VISample> add_multiplicative_noise(
    std::vector<ehd::calib::VISample> samples, double sigma, std::uint64_t seed) {
    NormalStream noise(seed);
    for (auto& s : samples) s.current *= 1.0 + sigma * noise.next();
    return samples;
}

} // namespace testsupport
