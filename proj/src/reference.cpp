#include "ldv/reference.hpp"

#include <cmath>

#include "ldv/demod.hpp"
#include "ldv/errors.hpp"

namespace ldv::reference {

namespace {

constexpr std::uint64_t kAccelStreamTag = 5;

std::vector<double> bandwidth_filter(const AccelerometerConfig& cfg) {
    const double nyq = cfg.sample_rate / 2.0;
    dsp::FilterSpec spec;
    spec.kind = dsp::FilterSpec::Kind::low;
    spec.cutoff_lo = cfg.bandwidth;
    spec.transition_width = std::min(0.2 * cfg.bandwidth, 0.98 * nyq - cfg.bandwidth);
    spec.stopband_atten_db = 80.0;
    return dsp::design_fir(spec, cfg.sample_rate);
}

} // namespace

void validate(const AccelerometerConfig& cfg) {
    if (cfg.sensitivity <= 0.0) throw InvalidConfigError("accelerometer: sensitivity must be > 0");
    if (cfg.noise_floor_density <= 0.0) {
        throw InvalidConfigError("accelerometer: noise floor density must be > 0");
    }
    if (cfg.sample_rate <= 0.0) throw InvalidConfigError("accelerometer: sample rate must be > 0");
    if (cfg.bandwidth <= 0.0 || cfg.bandwidth >= cfg.sample_rate / 2.0) {
        throw InvalidConfigError("accelerometer: bandwidth must be in (0, sample_rate/2)");
    }
}

TimeSeries simulate_accelerometer(const motion::SampledKinematics& kin,
                                  const AccelerometerConfig& cfg, RandomSeed seed) {
    validate(cfg);
    if (kin.sample_rate < cfg.sample_rate) {
        throw InvalidConfigError("simulate_accelerometer: kinematics sampled below sensor rate");
    }
    const double ratio = kin.sample_rate / cfg.sample_rate;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw InvalidConfigError("simulate_accelerometer: rate mismatch is not an integer factor");
    }

    // Resample the acceleration to the sensor rate when needed.
    std::vector<double> accel;
    if (ratio > 1.5) {
        demod::Decimator decim(kin.sample_rate, cfg.sample_rate);
        decim.push(kin.acceleration, accel);
        decim.flush(accel);
    } else {
        accel = kin.acceleration;
    }

    const auto taps = bandwidth_filter(cfg);
    auto filtered = dsp::apply_fir(accel, taps);

    const CounterRng rng(derive_stream(seed, kAccelStreamTag));
    const double noise_rms =
        cfg.noise_floor_density * cfg.sensitivity * std::sqrt(cfg.sample_rate / 2.0);

    TimeSeries out;
    out.sample_rate = cfg.sample_rate;
    out.samples.resize(filtered.size());
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        out.samples[i] = cfg.sensitivity * filtered[i] + noise_rms * rng.normal(i);
    }
    return out;
}

dsp::PeakEstimate accel_peak_frequency(const TimeSeries& signal, double f_lo, double f_hi) {
    const auto spec = dsp::compute_spectrum(signal, dsp::Window::hann);
    return dsp::peak_frequency(spec, f_lo, f_hi);
}

double settle_seconds(const AccelerometerConfig& cfg) {
    const auto taps = bandwidth_filter(cfg);
    return static_cast<double>((taps.size() - 1) / 2) / cfg.sample_rate;
}

} // namespace ldv::reference
