#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ldv {

namespace constants {
// Fixed physical constants (SI, 2019 redefinition). Not configurable.
inline constexpr double speed_of_light = 2.99792458e8;     // m/s
inline constexpr double electron_charge = 1.602176634e-19; // C
inline constexpr double boltzmann = 1.380649e-23;          // J/K
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
} // namespace constants

/// Uniformly sampled real signal. The unit of `samples` is carried by
/// context (A, V, W, m, m/s, rad); sample n sits at t = n / sample_rate,
/// starting at t = 0.
struct TimeSeries {
    double sample_rate = 0.0; // Hz
    std::vector<double> samples;

    std::size_t size() const { return samples.size(); }
    double duration() const {
        return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

/// Identifies one reproducible random stream. Distinct (seed, stream_id)
/// pairs give statistically independent streams; equal pairs give
/// bit-identical output regardless of chunking or thread schedule.
struct RandomSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

} // namespace ldv
