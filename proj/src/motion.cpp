#include "ldv/motion.hpp"

#include <cmath>

#include "ldv/errors.hpp"

namespace ldv::motion {

using constants::two_pi;

void validate(const MotionProfile& profile) {
    if (profile.components.empty()) {
        throw InvalidProfileError("motion profile has no components");
    }
    for (const auto& c : profile.components) {
        if (c.amplitude_m < 0.0) throw InvalidProfileError("component amplitude must be >= 0");
        if (c.frequency_hz <= 0.0 && profile.kind != ProfileKind::chirp) {
            throw InvalidProfileError("component frequency must be > 0");
        }
    }
    switch (profile.kind) {
    case ProfileKind::sinusoid:
        if (profile.components.size() != 1) {
            throw InvalidProfileError("sinusoid profile takes exactly one component");
        }
        break;
    case ProfileKind::multi_tone:
        for (std::size_t i = 1; i < profile.components.size(); ++i) {
            if (profile.components[i].frequency_hz <= profile.components[i - 1].frequency_hz) {
                throw InvalidProfileError("multi-tone frequencies must be strictly increasing");
            }
        }
        break;
    case ProfileKind::chirp:
        if (profile.components.size() != 1) {
            throw InvalidProfileError("chirp profile takes exactly one component");
        }
        if (profile.chirp_f_start_hz <= 0.0 || profile.chirp_f_end_hz <= 0.0) {
            throw InvalidProfileError("chirp sweep frequencies must be > 0");
        }
        break;
    }
}

double max_frequency(const MotionProfile& profile) {
    if (profile.kind == ProfileKind::chirp) {
        return std::max(profile.chirp_f_start_hz, profile.chirp_f_end_hz);
    }
    double f = 0.0;
    for (const auto& c : profile.components) f = std::max(f, c.frequency_hz);
    return f;
}

double peak_speed(const MotionProfile& profile) {
    validate(profile);
    if (profile.kind == ProfileKind::chirp) {
        return two_pi * max_frequency(profile) * profile.components[0].amplitude_m;
    }
    double v = 0.0;
    for (const auto& c : profile.components) v += two_pi * c.frequency_hz * c.amplitude_m;
    return v;
}

void synth_kinematics_range(const MotionProfile& profile, double sample_rate, double duration,
                            std::uint64_t n0, std::uint64_t n1, std::span<double> displacement,
                            std::span<double> velocity, std::span<double> acceleration) {
    const std::size_t count = static_cast<std::size_t>(n1 - n0);
    if (!displacement.empty() && displacement.size() != count) {
        throw InvalidInputError("synth_kinematics_range: displacement buffer size mismatch");
    }
    if (!velocity.empty() && velocity.size() != count) {
        throw InvalidInputError("synth_kinematics_range: velocity buffer size mismatch");
    }
    if (!acceleration.empty() && acceleration.size() != count) {
        throw InvalidInputError("synth_kinematics_range: acceleration buffer size mismatch");
    }

    if (!displacement.empty()) std::fill(displacement.begin(), displacement.end(), 0.0);
    if (!velocity.empty()) std::fill(velocity.begin(), velocity.end(), 0.0);
    if (!acceleration.empty()) std::fill(acceleration.begin(), acceleration.end(), 0.0);

    if (profile.kind == ProfileKind::chirp) {
        const auto& c = profile.components[0];
        const double f0 = profile.chirp_f_start_hz;
        const double rate = (profile.chirp_f_end_hz - f0) / duration; // Hz/s
        for (std::size_t i = 0; i < count; ++i) {
            const double t = static_cast<double>(n0 + i) / sample_rate;
            const double theta = two_pi * (f0 * t + 0.5 * rate * t * t) + c.phase_rad;
            const double finst = f0 + rate * t;
            const double s = std::sin(theta);
            const double co = std::cos(theta);
            if (!displacement.empty()) displacement[i] = c.amplitude_m * s;
            if (!velocity.empty()) velocity[i] = c.amplitude_m * two_pi * finst * co;
            if (!acceleration.empty()) {
                acceleration[i] = c.amplitude_m * (two_pi * rate * co -
                                                   (two_pi * finst) * (two_pi * finst) * s);
            }
        }
        return;
    }

    for (const auto& c : profile.components) {
        const double w = two_pi * c.frequency_hz;
        for (std::size_t i = 0; i < count; ++i) {
            const double t = static_cast<double>(n0 + i) / sample_rate;
            const double theta = w * t + c.phase_rad;
            const double s = std::sin(theta);
            const double co = std::cos(theta);
            if (!displacement.empty()) displacement[i] += c.amplitude_m * s;
            if (!velocity.empty()) velocity[i] += c.amplitude_m * w * co;
            if (!acceleration.empty()) acceleration[i] -= c.amplitude_m * w * w * s;
        }
    }
}

SampledKinematics synth_kinematics(const MotionProfile& profile, double sample_rate,
                                   double duration) {
    validate(profile);
    if (duration <= 0.0) throw InvalidInputError("synth_kinematics: duration must be > 0");
    if (sample_rate <= 10.0 * max_frequency(profile)) {
        throw SamplingViolationError("synth_kinematics: sample rate must exceed 10x highest frequency");
    }

    const std::uint64_t n = static_cast<std::uint64_t>(std::llround(duration * sample_rate));
    if (n == 0) throw InvalidInputError("synth_kinematics: duration too short for one sample");

    SampledKinematics kin;
    kin.sample_rate = sample_rate;
    kin.displacement.resize(n);
    kin.velocity.resize(n);
    kin.acceleration.resize(n);
    synth_kinematics_range(profile, sample_rate, duration, 0, n, kin.displacement, kin.velocity,
                           kin.acceleration);
    return kin;
}

} // namespace ldv::motion
