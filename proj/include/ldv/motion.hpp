#pragma once

// Prescribed target vibration kinematics. Displacement, velocity and
// acceleration are evaluated analytically at the sample instants, so the
// three series are mutually consistent to machine precision.

#include <cstdint>
#include <span>
#include <vector>

#include "ldv/types.hpp"

namespace ldv::motion {

struct ToneComponent {
    double amplitude_m = 0.0;
    double frequency_hz = 0.0;
    double phase_rad = 0.0;
};

enum class ProfileKind { sinusoid, multi_tone, chirp };

/// Target motion description. `sinusoid` and `chirp` use exactly one
/// component; `multi_tone` requires strictly increasing frequencies.
/// A chirp sweeps linearly from f_start to f_end over the synthesis
/// duration, with analytically integrated phase.
struct MotionProfile {
    ProfileKind kind = ProfileKind::sinusoid;
    std::vector<ToneComponent> components;
    double chirp_f_start_hz = 0.0;
    double chirp_f_end_hz = 0.0;
};

/// Throws InvalidProfileError on structural violations.
void validate(const MotionProfile& profile);

/// Highest frequency present (sweep end frequencies included for chirps).
double max_frequency(const MotionProfile& profile);

/// Upper bound on |v(t)|: sum of 2*pi*f*A over components (exact for a
/// single tone); 2*pi*max(f)*A for chirps.
double peak_speed(const MotionProfile& profile);

struct SampledKinematics {
    double sample_rate = 0.0; // Hz
    std::vector<double> displacement; // m
    std::vector<double> velocity;     // m/s
    std::vector<double> acceleration; // m/s^2
};

/// Evaluates the profile over [n0, n1) at rate `sample_rate`, writing into
/// caller buffers (any of which may be empty to skip that quantity).
/// `duration` fixes the chirp sweep rate and is ignored for tones.
/// Chunked evaluation is bit-identical to whole-signal evaluation.
void synth_kinematics_range(const MotionProfile& profile, double sample_rate, double duration,
                            std::uint64_t n0, std::uint64_t n1, std::span<double> displacement,
                            std::span<double> velocity, std::span<double> acceleration);

/// Whole-signal convenience wrapper. Requires sample_rate > 10x the highest
/// profile frequency and duration > 0.
SampledKinematics synth_kinematics(const MotionProfile& profile, double sample_rate,
                                   double duration);

} // namespace ldv::motion
