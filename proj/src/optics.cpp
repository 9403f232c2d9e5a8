#include "ldv/optics.hpp"

#include <algorithm>
#include <cmath>

#include "ldv/errors.hpp"

namespace ldv::optics {

using constants::two_pi;

void validate(const OpticalConfig& cfg) {
    if (cfg.wavelength <= 0.0) throw InvalidConfigError("optics: wavelength must be > 0");
    if (cfg.bragg_shift < 0.0) throw InvalidConfigError("optics: Bragg shift must be >= 0");
    if (cfg.mixing_efficiency <= 0.0 || cfg.mixing_efficiency > 1.0) {
        throw InvalidConfigError("optics: mixing efficiency must be in (0, 1]");
    }
    if (cfg.reflectivity <= 0.0 || cfg.reflectivity > 1.0) {
        throw InvalidConfigError("optics: reflectivity must be in (0, 1]");
    }
    if (cfg.intensity_measurement <= 0.0 || cfg.intensity_reference <= 0.0) {
        throw InvalidConfigError("optics: beam intensities must be > 0");
    }
    if (cfg.loss_reference <= 0.0 || cfg.loss_reference > 1.0 || cfg.loss_measurement <= 0.0 ||
        cfg.loss_measurement > 1.0) {
        throw InvalidConfigError("optics: arm losses must be in (0, 1]");
    }
}

void validate(const DetectorConfig& cfg) {
    if (cfg.responsivity <= 0.0) throw InvalidConfigError("detector: responsivity must be > 0");
    if (cfg.bandwidth <= 0.0) throw InvalidConfigError("detector: bandwidth must be > 0");
    if (cfg.sample_rate <= 0.0) throw InvalidConfigError("detector: sample rate must be > 0");
}

double doppler_shift(double velocity_mps, double wavelength_m) {
    if (wavelength_m <= 0.0) throw InvalidConfigError("doppler_shift: wavelength must be > 0");
    return 2.0 * velocity_mps / wavelength_m;
}

double phase_from_displacement(double displacement_m, double wavelength_m) {
    if (wavelength_m <= 0.0) {
        throw InvalidConfigError("phase_from_displacement: wavelength must be > 0");
    }
    return 4.0 * constants::pi * displacement_m / wavelength_m;
}

double dc_current(const OpticalConfig& opt, const DetectorConfig& det) {
    return det.responsivity * (opt.intensity_measurement * opt.loss_measurement +
                               opt.intensity_reference * opt.loss_reference);
}

double ac_current_amplitude(const OpticalConfig& opt, const DetectorConfig& det) {
    return det.responsivity * 2.0 * opt.mixing_efficiency *
           std::sqrt(opt.intensity_measurement * opt.loss_measurement *
                     opt.intensity_reference * opt.loss_reference * opt.reflectivity);
}

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void check_nyquist(double fs, double f_b, double max_speed, double wavelength) {
    const double top = f_b + std::abs(doppler_shift(max_speed, wavelength));
    if (fs <= 2.0 * top) {
        throw SamplingViolationError("optics: sample rate below 2x (carrier + max Doppler)");
    }
}

// Carrier phase in radians at sample n. f_b * n stays exactly representable
// for integer carriers over any practical record, so fmod keeps the argument
// small before the trig call.
inline double carrier_phase(double f_b, std::uint64_t n, double fs) {
    return two_pi * (std::fmod(f_b * static_cast<double>(n), fs) / fs);
}

} // namespace

std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>
synth_fields(const motion::SampledKinematics& kin, const OpticalConfig& cfg) {
    validate(cfg);
    if (kin.displacement.size() != kin.velocity.size()) {
        throw InvalidInputError("synth_fields: kinematics series lengths differ");
    }
    check_nyquist(kin.sample_rate, cfg.bragg_shift, max_abs(kin.velocity), cfg.wavelength);

    const std::size_t n = kin.displacement.size();
    const double ref_amp = std::sqrt(cfg.intensity_reference * cfg.loss_reference);
    const double meas_amp =
        std::sqrt(cfg.intensity_measurement * cfg.loss_measurement * cfg.reflectivity);

    std::vector<std::complex<double>> reference(n, std::complex<double>(ref_amp, 0.0));
    std::vector<std::complex<double>> measurement(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = carrier_phase(cfg.bragg_shift, i, kin.sample_rate) -
                             phase_from_displacement(kin.displacement[i], cfg.wavelength);
        measurement[i] = std::polar(meas_amp, theta);
    }
    return {std::move(reference), std::move(measurement)};
}

void detector_signal_range(std::span<const double> displacement, std::uint64_t n0,
                           const OpticalConfig& opt, const DetectorConfig& det,
                           std::span<double> out) {
    if (out.size() != displacement.size()) {
        throw InvalidInputError("detector_signal_range: buffer size mismatch");
    }
    const double fs = det.sample_rate;
    const double dc = dc_current(opt, det);
    const double ac = ac_current_amplitude(opt, det);
    const double phase_scale = 4.0 * constants::pi / opt.wavelength;
    const double f_b = opt.bragg_shift;

    for (std::size_t i = 0; i < displacement.size(); ++i) {
        const double theta =
            carrier_phase(f_b, n0 + i, fs) - phase_scale * displacement[i];
        out[i] = dc + ac * std::cos(theta);
    }
}

TimeSeries synth_detector_signal(const motion::SampledKinematics& kin, const OpticalConfig& opt,
                                 const DetectorConfig& det) {
    validate(opt);
    validate(det);
    if (kin.sample_rate != det.sample_rate) {
        throw InvalidInputError("synth_detector_signal: kinematics rate != detector rate");
    }
    check_nyquist(kin.sample_rate, opt.bragg_shift, max_abs(kin.velocity), opt.wavelength);

    TimeSeries out;
    out.sample_rate = kin.sample_rate;
    out.samples.resize(kin.displacement.size());
    detector_signal_range(kin.displacement, 0, opt, det, out.samples);
    return out;
}

} // namespace ldv::optics
