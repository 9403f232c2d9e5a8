#pragma once

// Displacement recovery from the heterodyne photocurrent: I/Q mixing at the
// Bragg carrier, low-pass filtering, arctangent phase extraction with
// unwrapping, scaling to meters, and anti-aliased decimation to the
// vibration-analysis rate. Processing is chunked; chunk boundaries never
// change the output.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ldv/types.hpp"

namespace ldv::demod {

struct DemodConfig {
    double carrier_hz = 0.0;     // Bragg carrier f_b
    double input_rate = 0.0;     // Hz (fs_opt)
    double lowpass_cutoff = 0.0; // Hz; 0 selects the default 0.7 * carrier
    double output_rate = 20e3;   // Hz; input_rate must be an integer multiple
};

struct VibrationRecord {
    TimeSeries displacement;       // m, zero-mean, at output_rate
    TimeSeries velocity;           // m/s, central differences of displacement
    double residual_phase_rms = 0; // rad; phase power above output_rate/2
};

/// Same-length streaming FIR with group-delay compensation and optional
/// decimation. Output j corresponds to input index j * decimation.
class StreamingFir {
public:
    StreamingFir(std::vector<double> taps, std::uint64_t decimation = 1);

    /// Consumes a chunk and appends every output that became computable.
    void push(std::span<const double> in, std::vector<double>& out);

    /// Emits the remaining outputs as if the input were zero-padded.
    void flush(std::vector<double>& out);

    std::uint64_t group_delay() const { return delay_; }
    std::uint64_t decimation() const { return decim_; }

private:
    void emit(std::vector<double>& out, std::optional<std::uint64_t> total);

    std::vector<double> taps_;
    std::uint64_t decim_ = 1;
    std::uint64_t delay_ = 0;
    std::vector<double> buf_;
    std::uint64_t buf_base_ = 0;  // absolute input index of buf_[0]
    std::uint64_t received_ = 0;
    std::uint64_t next_out_ = 0;  // next output ordinal
};

/// Multi-stage decimator from input_rate to output_rate with linear-phase
/// anti-alias filters protecting [0, output_rate/2].
class Decimator {
public:
    Decimator(double input_rate, double output_rate, double stopband_atten_db = 80.0);

    void push(std::span<const double> in, std::vector<double>& out);
    void flush(std::vector<double>& out);

    std::uint64_t factor() const { return factor_; }
    /// End-to-end filter settling time (one edge), in seconds.
    double settle_seconds() const { return settle_seconds_; }

private:
    std::vector<StreamingFir> stages_;
    std::vector<std::vector<double>> scratch_;
    std::uint64_t factor_ = 1;
    double settle_seconds_ = 0.0;
};

void validate(const DemodConfig& cfg);

/// Complex baseband envelope: multiply by e^{-i 2 pi f_b t}, low-pass at the
/// configured cutoff. The envelope argument tracks -phi(t) + const.
std::vector<std::complex<double>> iq_demodulate(const TimeSeries& signal, const DemodConfig& cfg);

/// Removes 2 pi jumps: whenever a successive difference exceeds pi in
/// magnitude, a multiple of 2 pi is added so it falls in (-pi, pi].
std::vector<double> unwrap_phase(std::span<const double> wrapped);

/// Converts an unwrapped interferometric phase series (rad) to a decimated,
/// zero-mean displacement/velocity record via dL = phase * lambda / (4 pi).
VibrationRecord kinematics_from_phase(const TimeSeries& phase, double wavelength_m,
                                      const DemodConfig& cfg);

/// Full streaming chain from photocurrent chunks to a VibrationRecord.
class Demodulator {
public:
    Demodulator(const DemodConfig& cfg, double wavelength_m);

    void push(std::span<const double> photocurrent);
    VibrationRecord finish();

    double settle_seconds() const;
    /// Output samples at each record edge contaminated by filter settling.
    std::uint64_t settle_output_samples() const;

private:
    void consume_filtered(std::size_t count);

    DemodConfig cfg_;
    double wavelength_ = 0.0;
    std::vector<double> lp_taps_;
    StreamingFir fir_re_;
    StreamingFir fir_im_;
    Decimator decim_;
    std::vector<double> mix_re_, mix_im_, flt_re_, flt_im_, disp_, dec_out_;
    std::vector<double> decimated_;
    int mixer_period_ = 0; // >0: carrier phase repeats every mixer_period_ samples
    std::vector<double> mix_cos_, mix_sin_;
    std::uint64_t n_in_ = 0;   // absolute input counter (mixer phase)
    std::uint64_t n_flt_ = 0;  // absolute filtered-sample counter
    bool have_prev_ = false;
    double prev_raw_ = 0.0;
    double unwrap_offset_ = 0.0;
    double sum_full_ = 0.0, sum2_full_ = 0.0;
    std::uint64_t count_full_ = 0;
};

} // namespace ldv::demod
