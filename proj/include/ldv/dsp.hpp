#pragma once

// Vibration-domain signal analysis: FFT spectra, FIR filter design and
// application, Henderson moving average, and sub-bin spectral peak
// estimation.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ldv/types.hpp"

namespace ldv::dsp {

// ---------------------------------------------------------------------------
// Transforms (FFTW-backed, double precision, any length)

/// Forward complex DFT, unnormalized: X[k] = sum_n x[n] e^{-i 2pi k n / N}.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);

/// Forward real DFT; returns the N/2+1 non-negative-frequency bins.
std::vector<std::complex<double>> rfft(std::span<const double> x);

/// Inverse of rfft, normalized by 1/N. `n` is the real output length.
std::vector<double> irfft(std::span<const std::complex<double>> half_spectrum, std::size_t n);

// ---------------------------------------------------------------------------
// Spectra

enum class Window { rectangular, hann };

/// One-sided amplitude spectrum. Magnitudes are coherent-gain corrected so a
/// full-scale sine coherently sampled at a bin center reads its true
/// amplitude at that bin.
struct Spectrum {
    double sample_rate = 0.0;
    std::size_t record_length = 0;
    Window window = Window::rectangular;
    std::vector<double> frequency_axis; // Hz, 0 .. fs/2, record_length/2 + 1 bins
    std::vector<double> magnitude;      // linear amplitude per bin
    std::vector<double> phase;          // radians per bin

    double bin_spacing() const { return sample_rate / static_cast<double>(record_length); }
};

Spectrum compute_spectrum(const TimeSeries& series, Window window);

// ---------------------------------------------------------------------------
// FIR filters (windowed-sinc, Kaiser window)

struct FilterSpec {
    enum class Kind { low, high, band };
    Kind kind = Kind::low;
    double cutoff_lo = 0.0;         // Hz; passband edge (low/high) or lower passband edge (band)
    double cutoff_hi = 0.0;         // Hz; upper passband edge (band only)
    double transition_width = 0.0;  // Hz; transition band extends outward from the passband
    double stopband_atten_db = 80.0;
};

/// Designs a linear-phase FIR meeting the spec; odd tap count. Throws
/// DesignFailureError if more than 8191 taps would be required.
std::vector<double> design_fir(const FilterSpec& spec, double fs);

/// Same-length convolution with group-delay compensation (taps must be odd);
/// the input is zero-padded at both ends.
std::vector<double> apply_fir(std::span<const double> x, std::span<const double> taps);

/// Zero-phase (forward-backward) filtering for offline analysis.
std::vector<double> filtfilt(std::span<const double> x, std::span<const double> taps);

// ---------------------------------------------------------------------------
// Henderson moving average

/// Standard Henderson weights for an odd term count >= 5. Weights sum to 1
/// and reproduce cubic polynomials exactly.
std::vector<double> henderson_weights(int terms);

/// Symmetric Henderson smoothing; series ends use truncated, renormalized
/// kernels.
TimeSeries henderson_smooth(const TimeSeries& series, int terms);

// ---------------------------------------------------------------------------
// Peak estimation

struct PeakEstimate {
    double frequency_hz = 0.0;
    double amplitude = 0.0; // linear, window-corrected
    std::size_t bin_index = 0;
    bool interpolated = false;
};

/// Largest-magnitude bin in [f_lo, f_hi], refined by three-point parabolic
/// interpolation on log magnitude.
PeakEstimate peak_frequency(const Spectrum& spec, double f_lo, double f_hi);

/// Least-squares fit of a*sin(2pi f t) + b*cos(2pi f t) + c at a known
/// frequency; returns amplitude sqrt(a^2+b^2), phase and offset.
struct ToneFit {
    double amplitude = 0.0;
    double phase = 0.0; // radians, x(t) ~ amplitude * sin(2pi f t + phase) + offset
    double offset = 0.0;
};

ToneFit fit_tone(std::span<const double> x, double fs, double frequency_hz);

} // namespace ldv::dsp
