#include "ldv/noise.hpp"

#include <bit>
#include <cmath>
#include <complex>

#include "ldv/dsp.hpp"
#include "ldv/errors.hpp"

namespace ldv::noise {

namespace {

// Stream tags so each noise source draws from its own substream.
enum StreamTag : std::uint64_t { kShot = 1, kThermal = 2, kFlicker = 3, kSpeckle = 4 };

// Integral of f^-beta over [a, b].
double powerlaw_integral(double beta, double a, double b) {
    if (beta == 1.0) return std::log(b / a);
    return (std::pow(b, 1.0 - beta) - std::pow(a, 1.0 - beta)) / (1.0 - beta);
}

// Frequency-domain shaping: complex Gaussian bins carrying exactly the
// target power-law power over [fs/n, fs/4], inverse-transformed. DC stays
// zero; n must be a power of two so bin partitioning is exact.
std::vector<double> flicker_samples(double i_signal, const NoiseConfig& cfg, std::size_t n,
                                    double fs, RandomSeed seed) {
    const double level = cfg.flicker_k * std::pow(i_signal, cfg.flicker_alpha);
    std::vector<std::complex<double>> bins(n / 2 + 1, {0.0, 0.0});
    if (level > 0.0) {
        const CounterRng rng(derive_stream(seed, kFlicker));
        const double df = fs / static_cast<double>(n);
        const std::size_t k_top = n / 4;
        for (std::size_t k = 1; k < k_top; ++k) {
            const double p_k =
                level * powerlaw_integral(cfg.flicker_beta, df * static_cast<double>(k),
                                          df * static_cast<double>(k + 1));
            const double sigma = static_cast<double>(n) * std::sqrt(p_k) / 2.0;
            const auto g = rng.normal_pair(k);
            bins[k] = {sigma * g[0], sigma * g[1]};
        }
    }
    return dsp::irfft(bins, n);
}

} // namespace

void validate(const NoiseConfig& cfg) {
    if (cfg.temperature <= 0.0) throw InvalidConfigError("noise: temperature must be > 0");
    if (cfg.amp_input_resistance <= 0.0 || cfg.detector_resistance <= 0.0) {
        throw InvalidConfigError("noise: resistances must be > 0");
    }
    if (cfg.flicker_k < 0.0) throw InvalidConfigError("noise: flicker constant must be >= 0");
    if (cfg.flicker_beta <= 0.0) throw InvalidConfigError("noise: flicker beta must be > 0");
    if (cfg.speckle_mean <= 0.0) throw InvalidConfigError("noise: speckle mean must be > 0");
    if (cfg.speckle_correlation_time <= 0.0) {
        throw InvalidConfigError("noise: speckle correlation time must be > 0");
    }
}

double shot_noise_rms(double i_signal_a, double bandwidth_hz) {
    if (i_signal_a < 0.0) throw InvalidInputError("shot_noise_rms: signal current must be >= 0");
    if (bandwidth_hz <= 0.0) throw InvalidInputError("shot_noise_rms: bandwidth must be > 0");
    return std::sqrt(2.0 * constants::electron_charge * i_signal_a * bandwidth_hz);
}

double thermal_noise_rms(double temperature_k, double r_input_ohm, double r_detector_ohm,
                         double bandwidth_hz) {
    if (temperature_k <= 0.0 || bandwidth_hz <= 0.0) {
        throw InvalidInputError("thermal_noise_rms: temperature and bandwidth must be > 0");
    }
    if (r_input_ohm <= 0.0 || r_detector_ohm <= 0.0) {
        throw InvalidInputError("thermal_noise_rms: resistances must be > 0");
    }
    return std::sqrt(4.0 * constants::boltzmann * temperature_k * bandwidth_hz *
                     (r_input_ohm + r_detector_ohm) / (r_input_ohm * r_detector_ohm));
}

TimeSeries gen_white_noise(double rms, std::size_t n, double fs, RandomSeed seed) {
    if (rms < 0.0) throw InvalidInputError("gen_white_noise: rms must be >= 0");
    TimeSeries out;
    out.sample_rate = fs;
    out.samples.assign(n, 0.0);
    if (rms > 0.0) {
        const CounterRng rng(seed);
        for (std::size_t i = 0; i < n; ++i) out.samples[i] = rms * rng.normal(i);
    }
    return out;
}

TimeSeries gen_flicker_noise(double i_signal_a, const NoiseConfig& cfg, std::size_t n, double fs,
                             RandomSeed seed) {
    if (i_signal_a < 0.0) throw InvalidInputError("gen_flicker_noise: signal current must be >= 0");
    if (n < 8 || !std::has_single_bit(n)) {
        throw InvalidInputError("gen_flicker_noise: length must be a power of two >= 8");
    }
    TimeSeries out;
    out.sample_rate = fs;
    out.samples = flicker_samples(i_signal_a, cfg, n, fs, seed);
    return out;
}

TimeSeries gen_speckle_multiplier(const NoiseConfig& cfg, std::size_t n, double fs,
                                  RandomSeed seed) {
    validate(cfg);
    const double span = fs * cfg.speckle_correlation_time;
    if (span < 1.0) {
        throw InvalidConfigError("gen_speckle_multiplier: correlation interval under one sample");
    }
    const std::uint64_t interval = static_cast<std::uint64_t>(std::ceil(span));
    const CounterRng rng(seed);
    TimeSeries out;
    out.sample_rate = fs;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.samples[i] = rng.exponential(static_cast<std::uint64_t>(i) / interval);
    }
    return out;
}

NoiseSynth::NoiseSynth(const optics::OpticalConfig& opt, const optics::DetectorConfig& det,
                       const NoiseConfig& cfg, double dc_signal_current_a, RandomSeed seed,
                       std::uint64_t total_samples)
    : shot_rng_(derive_stream(seed, kShot)),
      thermal_rng_(derive_stream(seed, kThermal)),
      speckle_rng_(derive_stream(seed, kSpeckle)) {
    validate(cfg);
    if (dc_signal_current_a < 0.0) throw InvalidInputError("NoiseSynth: DC current must be >= 0");
    const double fs = det.sample_rate;
    if (fs <= 0.0) throw InvalidInputError("NoiseSynth: detector sample rate must be > 0");

    dc_current_ = optics::dc_current(opt, det);
    shot_ = cfg.enabled.shot;
    thermal_ = cfg.enabled.thermal;
    flicker_ = cfg.enabled.flicker && cfg.flicker_k > 0.0;
    speckle_ = cfg.enabled.speckle;

    const double df = fs / 2.0; // Nyquist bandwidth of the sampled stream
    if (shot_) shot_rms_ = shot_noise_rms(dc_signal_current_a, df);
    if (thermal_) {
        thermal_rms_ =
            thermal_noise_rms(cfg.temperature, cfg.amp_input_resistance, cfg.detector_resistance, df);
    }

    if (speckle_) {
        const double span = fs * cfg.speckle_correlation_time;
        if (span < 1.0) throw InvalidConfigError("NoiseSynth: speckle interval under one sample");
        speckle_interval_samples_ = static_cast<std::uint64_t>(std::ceil(span));
    }

    if (flicker_) {
        // Flicker power is concentrated at low frequencies; synthesize it on
        // a coarser grid (held between grid points) to bound memory when the
        // optical rate is in the MHz range.
        flicker_hold_ = 1;
        while (fs / static_cast<double>(flicker_hold_) > 400e3) flicker_hold_ *= 2;
        const std::uint64_t points = (total_samples + flicker_hold_ - 1) / flicker_hold_;
        std::size_t m = 8;
        while (m < points) m *= 2;
        flicker_grid_ = flicker_samples(dc_signal_current_a, cfg, m,
                                        fs / static_cast<double>(flicker_hold_), seed);
    }
}

void NoiseSynth::apply(std::span<double> chunk, std::uint64_t n0) const {
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        const std::uint64_t n = n0 + static_cast<std::uint64_t>(i);
        double x = chunk[i];
        if (speckle_) {
            const double m = speckle_rng_.exponential(n / speckle_interval_samples_);
            x = dc_current_ + std::sqrt(m) * (x - dc_current_);
        }
        if (shot_) x += shot_rms_ * shot_rng_.normal(n);
        if (thermal_) x += thermal_rms_ * thermal_rng_.normal(n);
        if (flicker_) x += flicker_grid_[static_cast<std::size_t>(n / flicker_hold_)];
        chunk[i] = x;
    }
}

TimeSeries apply_noise(const TimeSeries& clean, double dc_signal_current_a,
                       const optics::OpticalConfig& opt, const optics::DetectorConfig& det,
                       const NoiseConfig& cfg, RandomSeed seed) {
    if (clean.sample_rate != det.sample_rate) {
        throw InvalidInputError("apply_noise: series rate does not match detector config");
    }
    const NoiseSynth synth(opt, det, cfg, dc_signal_current_a, seed, clean.samples.size());
    TimeSeries out = clean;
    synth.apply(out.samples, 0);
    return out;
}

} // namespace ldv::noise
