#pragma once

// Reference accelerometer channel used to cross-validate the vibrometer:
// band-limited acceleration pickup, voltage conversion, and additive sensor
// noise.

#include "ldv/dsp.hpp"
#include "ldv/motion.hpp"
#include "ldv/rng.hpp"
#include "ldv/types.hpp"

namespace ldv::reference {

struct AccelerometerConfig {
    double sensitivity = 0.1;          // V / (m/s^2)
    double noise_floor_density = 1e-4; // (m/s^2) / sqrt(Hz)
    double bandwidth = 5e3;            // Hz
    double sample_rate = 20e3;         // Hz
};

void validate(const AccelerometerConfig& cfg);

/// Sensor output voltage: sensitivity * (acceleration low-passed at the
/// configured bandwidth) plus white Gaussian noise of the configured density
/// over the Nyquist band. Kinematics sampled faster than the sensor are
/// decimated by an integer factor first.
TimeSeries simulate_accelerometer(const motion::SampledKinematics& kin,
                                  const AccelerometerConfig& cfg, RandomSeed seed);

/// Spectrum peak of the accelerometer channel in [f_lo, f_hi] (Hann window).
dsp::PeakEstimate accel_peak_frequency(const TimeSeries& signal, double f_lo, double f_hi);

/// Edge settling time of the bandwidth filter, for trimming analyses.
double settle_seconds(const AccelerometerConfig& cfg);

} // namespace ldv::reference
