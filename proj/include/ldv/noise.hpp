#pragma once

// Photocurrent noise models: shot and thermal white noise with closed-form
// RMS, 1/f^beta flicker noise synthesized by frequency-domain shaping, and
// negative-exponential speckle fading of the interference term. All
// generators are counter-addressed so chunked generation is bit-identical
// to whole-signal generation.

#include <cstdint>
#include <span>

#include "ldv/optics.hpp"
#include "ldv/rng.hpp"
#include "ldv/types.hpp"

namespace ldv::noise {

struct NoiseToggles {
    bool shot = true;
    bool thermal = true;
    bool flicker = true;
    bool speckle = false; // cooperative-target default; enable for rough surfaces
};

struct NoiseConfig {
    double temperature = 290.0;            // K
    double amp_input_resistance = 100.0;   // ohm (R_i)
    double detector_resistance = 100.0;    // ohm (R_d); parallel combination 50 ohm
    double flicker_k = 1e-24;              // process constant, A^2 Hz^(beta-1) / A^alpha
    double flicker_alpha = 1.0;
    double flicker_beta = 1.0;
    double speckle_mean = 1e-3;            // W (mean intensity; multiplier is normalized)
    double speckle_correlation_time = 1e-3; // s
    NoiseToggles enabled;
};

void validate(const NoiseConfig& cfg);

/// Shot-noise RMS current: sqrt(2 e i_signal df).
double shot_noise_rms(double i_signal_a, double bandwidth_hz);

/// Johnson-Nyquist RMS current with R_L = R_i R_d / (R_i + R_d):
/// sqrt(4 k_B T df (R_i + R_d) / (R_i R_d)).
double thermal_noise_rms(double temperature_k, double r_input_ohm, double r_detector_ohm,
                         double bandwidth_hz);

/// Zero-mean white Gaussian series with population standard deviation `rms`.
/// The bandwidth used to compute `rms` must equal fs/2.
TimeSeries gen_white_noise(double rms, std::size_t n, double fs, RandomSeed seed);

/// Zero-mean series whose one-sided PSD follows flicker_k * i^alpha / f^beta
/// over [fs/n, fs/4] and is zero outside. `n` must be a power of two >= 8.
TimeSeries gen_flicker_noise(double i_signal_a, const NoiseConfig& cfg, std::size_t n, double fs,
                             RandomSeed seed);

/// Piecewise-constant unit-mean multiplier, constant over each correlation
/// interval of ceil(fs * correlation_time) samples, values i.i.d. Exp(1).
TimeSeries gen_speckle_multiplier(const NoiseConfig& cfg, std::size_t n, double fs,
                                  RandomSeed seed);

/// Streaming noise composition onto a clean detector signal: the AC term is
/// scaled by sqrt(speckle multiplier), then shot + thermal + flicker current
/// is added. Bandwidth for the additive terms is fixed at fs/2. Inside the
/// streaming path flicker is synthesized once on a reduced-rate grid (held
/// constant between grid points), since its power sits at low frequencies.
class NoiseSynth {
public:
    NoiseSynth(const optics::OpticalConfig& opt, const optics::DetectorConfig& det,
               const NoiseConfig& cfg, double dc_signal_current_a, RandomSeed seed,
               std::uint64_t total_samples);

    /// Applies noise in place to `chunk`, whose first sample has absolute
    /// index `n0`. Chunk boundaries do not affect the result.
    void apply(std::span<double> chunk, std::uint64_t n0) const;

    double shot_rms() const { return shot_rms_; }
    double thermal_rms() const { return thermal_rms_; }

private:
    double dc_current_ = 0.0;
    bool shot_ = false;
    bool thermal_ = false;
    bool flicker_ = false;
    bool speckle_ = false;
    double shot_rms_ = 0.0;
    double thermal_rms_ = 0.0;
    CounterRng shot_rng_;
    CounterRng thermal_rng_;
    CounterRng speckle_rng_;
    std::uint64_t speckle_interval_samples_ = 1;
    std::vector<double> flicker_grid_;
    std::uint64_t flicker_hold_ = 1;
};

/// Whole-signal convenience wrapper around NoiseSynth. `clean` must come
/// from synth_detector_signal with the same optical/detector configs.
TimeSeries apply_noise(const TimeSeries& clean, double dc_signal_current_a,
                       const optics::OpticalConfig& opt, const optics::DetectorConfig& det,
                       const NoiseConfig& cfg, RandomSeed seed);

} // namespace ldv::noise
