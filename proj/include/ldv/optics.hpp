#pragma once

// Heterodyne interferometer front end: Doppler shift, interferometric phase,
// field superposition and the detected photocurrent. Only the beat around
// the Bragg carrier is synthesized; the common optical frequency is factored
// out analytically since the detector cannot follow it.

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ldv/motion.hpp"
#include "ldv/types.hpp"

namespace ldv::optics {

struct OpticalConfig {
    double wavelength = 632.8e-9;        // m (HeNe default)
    double bragg_shift = 0.0;            // Hz; scenario runner sizes this when left 0
    double mixing_efficiency = 0.8;      // K, dimensionless in (0, 1]
    double reflectivity = 0.5;           // R, dimensionless in (0, 1]
    double intensity_measurement = 1e-3; // W
    double intensity_reference = 1e-3;   // W
    double loss_reference = 0.9;         // L_r, intensity-domain, (0, 1]
    double loss_measurement = 0.9;       // L_m, intensity-domain, (0, 1]
};

struct DetectorConfig {
    double responsivity = 0.5; // A/W
    double bandwidth = 0.0;    // Hz; runner sets fs/2 when left 0
    double sample_rate = 0.0;  // Hz (fs_opt)
};

void validate(const OpticalConfig& cfg);
void validate(const DetectorConfig& cfg);

/// f_d = 2 v / lambda; sign follows the sign of v (approach positive).
double doppler_shift(double velocity_mps, double wavelength_m);

/// Round-trip interferometric phase: phi = 4 pi dL / lambda.
double phase_from_displacement(double displacement_m, double wavelength_m);

/// DC photocurrent of the detected signal: responsivity * (Im Lm + Ir Lr).
double dc_current(const OpticalConfig& opt, const DetectorConfig& det);

/// Amplitude of the interference (AC) photocurrent term:
/// responsivity * 2 K sqrt(Im Lm Ir Lr R).
double ac_current_amplitude(const OpticalConfig& opt, const DetectorConfig& det);

/// Complex reference and measurement fields at the detector. The reference
/// field has constant phase and amplitude sqrt(Ir Lr); the measurement field
/// has amplitude sqrt(Im Lm R) and phase 2 pi f_b t - phi(t).
std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>
synth_fields(const motion::SampledKinematics& kin, const OpticalConfig& cfg);

/// Detected photocurrent for sample range [n0, n1), written into `out`
/// (size n1-n0). Bit-identical to whole-signal synthesis.
void detector_signal_range(std::span<const double> displacement, std::uint64_t n0,
                           const OpticalConfig& opt, const DetectorConfig& det,
                           std::span<double> out);

/// Whole-signal photocurrent synthesis (A). Requires
/// kin.sample_rate == det.sample_rate and Nyquist margin for the beat.
TimeSeries synth_detector_signal(const motion::SampledKinematics& kin, const OpticalConfig& opt,
                                 const DetectorConfig& det);

} // namespace ldv::optics
