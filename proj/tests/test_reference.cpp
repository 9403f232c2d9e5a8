#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ldv/errors.hpp"
#include "ldv/reference.hpp"
#include "support.hpp"

using namespace ldv;

namespace {

motion::SampledKinematics tone_kinematics(double amplitude, double frequency, double fs,
                                          double duration) {
    motion::MotionProfile p;
    p.kind = motion::ProfileKind::sinusoid;
    p.components = {{amplitude, frequency, 0.0}};
    return motion::synth_kinematics(p, fs, duration);
}

} // namespace

TEST_CASE("amplitude law: voltage amplitude = sensitivity * (2 pi f)^2 * A") {
    reference::AccelerometerConfig cfg;
    cfg.noise_floor_density = 1e-12; // effectively noiseless
    const double amplitude = 163e-6;
    const double frequency = 10.0;
    const auto kin = tone_kinematics(amplitude, frequency, cfg.sample_rate, 2.0);
    const auto v = reference::simulate_accelerometer(kin, cfg, RandomSeed{1, 0});

    const double peak_accel = std::pow(constants::two_pi * frequency, 2) * amplitude;
    CHECK(peak_accel == doctest::Approx(0.6436).epsilon(1e-3));

    const std::size_t trim =
        static_cast<std::size_t>(reference::settle_seconds(cfg) * cfg.sample_rate) + 2;
    const std::span<const double> interior(v.samples.data() + trim, v.samples.size() - 2 * trim);
    const auto fit = dsp::fit_tone(interior, cfg.sample_rate, frequency);
    CHECK(fit.amplitude == doctest::Approx(cfg.sensitivity * peak_accel).epsilon(0.005));
    CHECK(fit.amplitude == doctest::Approx(64.36e-3).epsilon(0.005));
}

TEST_CASE("zero motion: spectrum has no dominant peak") {
    reference::AccelerometerConfig cfg;
    const auto kin = tone_kinematics(0.0, 10.0, cfg.sample_rate, 2.0);
    const auto v = reference::simulate_accelerometer(kin, cfg, RandomSeed{2, 0});
    TimeSeries ts = v;
    const auto spec = dsp::compute_spectrum(ts, dsp::Window::hann);

    std::vector<double> mags(spec.magnitude.begin() + 1, spec.magnitude.end());
    std::sort(mags.begin(), mags.end());
    const double median = mags[mags.size() / 2];
    const double peak = mags.back();
    CHECK(peak < 6.0 * median);
}

TEST_CASE("peak estimation on the accelerometer channel") {
    reference::AccelerometerConfig cfg;

    // pure tone, noiseless: exact to interpolation accuracy
    {
        reference::AccelerometerConfig quiet = cfg;
        quiet.noise_floor_density = 1e-12;
        const auto kin = tone_kinematics(0.3e-3, 24.25, quiet.sample_rate, 2.0);
        const auto v = reference::simulate_accelerometer(kin, quiet, RandomSeed{3, 0});
        const auto est = reference::accel_peak_frequency(v, 10.0, 40.0);
        CHECK(est.frequency_hz == doctest::Approx(24.25).epsilon(1e-4));
    }

    // 6 Hz pad-style scenario with default noise
    {
        const auto kin = tone_kinematics(0.5e-3, 6.0, cfg.sample_rate, 3.0);
        const auto v = reference::simulate_accelerometer(kin, cfg, RandomSeed{3, 1});
        const auto est = reference::accel_peak_frequency(v, 3.0, 12.0);
        CHECK(std::abs(est.frequency_hz - 6.0) < 0.2);
    }

    // 76 Hz gear-style scenario
    {
        const auto kin = tone_kinematics(0.1e-3, 76.0, cfg.sample_rate, 2.0);
        const auto v = reference::simulate_accelerometer(kin, cfg, RandomSeed{3, 2});
        const auto est = reference::accel_peak_frequency(v, 38.0, 120.0);
        CHECK(est.frequency_hz > 75.5);
        CHECK(est.frequency_hz < 76.5);
    }
}

TEST_CASE("analytic acceleration agrees with twice-differenced displacement") {
    reference::AccelerometerConfig cfg;
    cfg.noise_floor_density = 1e-12;
    const auto kin = tone_kinematics(0.2e-3, 30.0, cfg.sample_rate, 1.0);

    motion::SampledKinematics fd = kin;
    const double fs = kin.sample_rate;
    for (std::size_t i = 1; i + 1 < fd.acceleration.size(); ++i) {
        fd.acceleration[i] =
            (kin.displacement[i + 1] - 2.0 * kin.displacement[i] + kin.displacement[i - 1]) * fs * fs;
    }
    const auto va = reference::simulate_accelerometer(kin, cfg, RandomSeed{4, 0});
    const auto vf = reference::simulate_accelerometer(fd, cfg, RandomSeed{4, 0});

    const std::size_t trim =
        static_cast<std::size_t>(reference::settle_seconds(cfg) * cfg.sample_rate) + 2;
    std::vector<double> a(va.samples.begin() + trim, va.samples.end() - trim);
    std::vector<double> f(vf.samples.begin() + trim, vf.samples.end() - trim);
    CHECK(testsupport::rel_rms_error(f, a) < 1e-3);
}

TEST_CASE("kinematics sampled faster than the sensor are decimated") {
    reference::AccelerometerConfig cfg;
    cfg.noise_floor_density = 1e-12;
    const auto kin_fast = tone_kinematics(0.1e-3, 40.0, 4.0 * cfg.sample_rate, 1.0);
    const auto v = reference::simulate_accelerometer(kin_fast, cfg, RandomSeed{5, 0});
    CHECK(v.sample_rate == cfg.sample_rate);
    CHECK(v.samples.size() == static_cast<std::size_t>(cfg.sample_rate * 1.0));
    const auto est = reference::accel_peak_frequency(v, 20.0, 60.0);
    CHECK(est.frequency_hz == doctest::Approx(40.0).epsilon(1e-3));
}

TEST_CASE("validation errors") {
    reference::AccelerometerConfig cfg;

    // sensor faster than the supplied kinematics
    const auto kin_slow = tone_kinematics(1e-4, 10.0, cfg.sample_rate / 2.0, 2.0);
    CHECK_THROWS_AS(reference::simulate_accelerometer(kin_slow, cfg, RandomSeed{6, 0}),
                    InvalidConfigError);

    // non-integer rate ratio
    const auto kin_odd = tone_kinematics(1e-4, 10.0, 1.5 * cfg.sample_rate, 2.0);
    CHECK_THROWS_AS(reference::simulate_accelerometer(kin_odd, cfg, RandomSeed{6, 1}),
                    InvalidConfigError);

    reference::AccelerometerConfig bad = cfg;
    bad.bandwidth = cfg.sample_rate; // >= Nyquist
    CHECK_THROWS_AS(reference::validate(bad), InvalidConfigError);
}
