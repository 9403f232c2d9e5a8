#include "ldv/demod.hpp"

#include <algorithm>
#include <cmath>

#include "ldv/dsp.hpp"
#include "ldv/errors.hpp"

namespace ldv::demod {

using constants::pi;
using constants::two_pi;

// ---------------------------------------------------------------------------
// StreamingFir

StreamingFir::StreamingFir(std::vector<double> taps, std::uint64_t decimation)
    : taps_(std::move(taps)), decim_(decimation) {
    if (taps_.empty() || taps_.size() % 2 == 0) {
        throw InvalidInputError("StreamingFir: tap count must be odd");
    }
    if (decim_ == 0) throw InvalidInputError("StreamingFir: decimation must be >= 1");
    delay_ = (taps_.size() - 1) / 2;
}

void StreamingFir::push(std::span<const double> in, std::vector<double>& out) {
    buf_.insert(buf_.end(), in.begin(), in.end());
    received_ += in.size();
    emit(out, std::nullopt);
}

void StreamingFir::flush(std::vector<double>& out) {
    emit(out, received_);
}

void StreamingFir::emit(std::vector<double>& out, std::optional<std::uint64_t> total) {
    const std::uint64_t nh = taps_.size();
    const std::uint64_t d = delay_;

    while (true) {
        const std::uint64_t center = next_out_ * decim_; // input index of this output
        const std::uint64_t top = center + d;            // highest input index needed
        if (total) {
            if (center >= *total) break;
        } else {
            if (top >= received_) break; // need more input
        }

        double acc = 0.0;
        // Window covers input indices [center - d, center + d], zero outside
        // [0, received_). The buffer always retains everything >= buf_base_.
        if (center >= d && top < received_) {
            const double* xp = buf_.data() + (top - buf_base_);
            const double* h = taps_.data();
            for (std::uint64_t k = 0; k < nh; ++k) acc += h[k] * xp[-(std::ptrdiff_t)k];
        } else {
            for (std::uint64_t k = 0; k < nh; ++k) {
                // signed arithmetic: j may be negative near the leading edge
                const std::int64_t j = static_cast<std::int64_t>(top) - static_cast<std::int64_t>(k);
                if (j < 0 || static_cast<std::uint64_t>(j) >= received_) continue;
                acc += taps_[k] * buf_[static_cast<std::uint64_t>(j) - buf_base_];
            }
        }
        out.push_back(acc);
        ++next_out_;
    }

    // Drop buffer entries no future output can reference.
    const std::uint64_t needed_from =
        (next_out_ * decim_ >= d) ? next_out_ * decim_ - d : 0;
    if (needed_from > buf_base_ + 4096) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(needed_from - buf_base_));
        buf_base_ = needed_from;
    }
}

// ---------------------------------------------------------------------------
// Decimator

namespace {

std::vector<std::uint64_t> plan_stages(std::uint64_t factor) {
    std::vector<std::uint64_t> stages;
    std::uint64_t rem = factor;
    static constexpr std::uint64_t kPreferred[] = {8, 6, 5, 4, 3, 2};
    while (rem > 1) {
        std::uint64_t picked = 0;
        for (std::uint64_t f : kPreferred) {
            if (rem % f == 0) {
                picked = f;
                break;
            }
        }
        if (picked == 0) picked = rem; // leftover prime handled in one stage
        stages.push_back(picked);
        rem /= picked;
    }
    return stages;
}

} // namespace

Decimator::Decimator(double input_rate, double output_rate, double stopband_atten_db) {
    if (input_rate <= 0.0 || output_rate <= 0.0 || output_rate > input_rate) {
        throw InvalidConfigError("Decimator: rates must satisfy 0 < output_rate <= input_rate");
    }
    const double ratio = input_rate / output_rate;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio) {
        throw InvalidConfigError("Decimator: input_rate / output_rate must be an integer");
    }
    factor_ = static_cast<std::uint64_t>(rounded);
    if (factor_ == 1) return; // pass-through

    const double passband = 0.4 * output_rate;  // final passband edge
    double rate = input_rate;
    for (std::uint64_t m : plan_stages(factor_)) {
        const double out_rate = rate / static_cast<double>(m);
        const double stop_edge = out_rate - 0.5 * output_rate; // protects [0, output_rate/2]
        dsp::FilterSpec spec;
        spec.kind = dsp::FilterSpec::Kind::low;
        spec.cutoff_lo = passband;
        spec.transition_width = stop_edge - passband;
        spec.stopband_atten_db = stopband_atten_db;
        auto taps = dsp::design_fir(spec, rate);
        settle_seconds_ += static_cast<double>((taps.size() - 1) / 2) / rate;
        stages_.emplace_back(std::move(taps), m);
        rate = out_rate;
    }
    scratch_.resize(stages_.size());
}

void Decimator::push(std::span<const double> in, std::vector<double>& out) {
    if (stages_.empty()) {
        out.insert(out.end(), in.begin(), in.end());
        return;
    }
    std::span<const double> cur = in;
    for (std::size_t s = 0; s + 1 < stages_.size(); ++s) {
        scratch_[s].clear();
        stages_[s].push(cur, scratch_[s]);
        cur = scratch_[s];
    }
    stages_.back().push(cur, out);
}

void Decimator::flush(std::vector<double>& out) {
    if (stages_.empty()) return;
    // Flush stage by stage, feeding each tail into the next stage.
    for (std::size_t s = 0; s + 1 < stages_.size(); ++s) {
        scratch_[s].clear();
        stages_[s].flush(scratch_[s]);
        std::span<const double> cur = scratch_[s];
        for (std::size_t t = s + 1; t + 1 < stages_.size(); ++t) {
            scratch_[t].clear();
            stages_[t].push(cur, scratch_[t]);
            cur = scratch_[t];
        }
        if (!stages_.empty()) stages_.back().push(cur, out);
    }
    stages_.back().flush(out);
}

// ---------------------------------------------------------------------------
// Config / simple operations

void validate(const DemodConfig& cfg) {
    if (cfg.carrier_hz <= 0.0) throw InvalidConfigError("demod: carrier must be > 0");
    if (cfg.input_rate <= 0.0) throw InvalidConfigError("demod: input rate must be > 0");
    if (cfg.output_rate <= 0.0 || cfg.output_rate > cfg.input_rate) {
        throw InvalidConfigError("demod: output rate must be in (0, input_rate]");
    }
    const double ratio = cfg.input_rate / cfg.output_rate;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw InvalidConfigError("demod: input_rate / output_rate must be an integer");
    }
    const double cutoff = cfg.lowpass_cutoff > 0.0 ? cfg.lowpass_cutoff : 0.7 * cfg.carrier_hz;
    if (cutoff >= cfg.carrier_hz) {
        throw InvalidConfigError("demod: low-pass cutoff must lie below the carrier");
    }
    if (cfg.carrier_hz >= cfg.input_rate / 2.0) {
        throw SamplingViolationError("demod: carrier at or above Nyquist");
    }
}

namespace {

std::vector<double> design_envelope_lowpass(const DemodConfig& cfg) {
    const double cutoff = cfg.lowpass_cutoff > 0.0 ? cfg.lowpass_cutoff : 0.7 * cfg.carrier_hz;
    // Stopband reaches full attenuation just below the carrier so the DC
    // image at -f_b and the 2 f_b image are both rejected.
    double stop = std::min(0.95 * cfg.carrier_hz, cutoff + 0.35 * cfg.carrier_hz);
    stop = std::min(stop, 0.49 * cfg.input_rate);
    if (stop <= cutoff) {
        throw InvalidConfigError("demod: no transition band between cutoff and carrier");
    }
    dsp::FilterSpec spec;
    spec.kind = dsp::FilterSpec::Kind::low;
    spec.cutoff_lo = cutoff;
    spec.transition_width = stop - cutoff;
    spec.stopband_atten_db = 80.0;
    return dsp::design_fir(spec, cfg.input_rate);
}

} // namespace

std::vector<std::complex<double>> iq_demodulate(const TimeSeries& signal, const DemodConfig& cfg) {
    validate(cfg);
    if (signal.sample_rate != cfg.input_rate) {
        throw InvalidInputError("iq_demodulate: series rate does not match config input rate");
    }
    auto taps = design_envelope_lowpass(cfg);
    StreamingFir fir_re(taps), fir_im(taps);

    const std::size_t n = signal.samples.size();
    std::vector<double> re(n), im(n);
    const double fs = cfg.input_rate;
    for (std::size_t i = 0; i < n; ++i) {
        const double cyc = std::fmod(cfg.carrier_hz * static_cast<double>(i), fs) / fs;
        const double c = std::cos(two_pi * cyc);
        const double s = -std::sin(two_pi * cyc);
        re[i] = signal.samples[i] * c;
        im[i] = signal.samples[i] * s;
    }
    std::vector<double> fre, fim;
    fre.reserve(n);
    fim.reserve(n);
    fir_re.push(re, fre);
    fir_re.flush(fre);
    fir_im.push(im, fim);
    fir_im.flush(fim);

    std::vector<std::complex<double>> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = {fre[i], fim[i]};
    return env;
}

std::vector<double> unwrap_phase(std::span<const double> wrapped) {
    std::vector<double> out(wrapped.size());
    if (wrapped.empty()) return out;
    out[0] = wrapped[0];
    double offset = 0.0;
    for (std::size_t i = 1; i < wrapped.size(); ++i) {
        const double d = wrapped[i] - wrapped[i - 1];
        if (std::abs(d) > pi) {
            offset -= two_pi * std::ceil(d / two_pi - 0.5);
        }
        out[i] = wrapped[i] + offset;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase-to-kinematics (shared by the op and the streaming demodulator)

namespace {

struct KinematicsBuilder {
    KinematicsBuilder(const DemodConfig& cfg)
        : decim(cfg.input_rate, cfg.output_rate), out_rate(cfg.output_rate) {}

    void push_displacement(std::span<const double> disp) {
        for (double v : disp) {
            sum += v;
            sum2 += v * v;
        }
        count += disp.size();
        decim.push(disp, decimated);
    }

    VibrationRecord finish(double wavelength) {
        decim.flush(decimated);

        const std::size_t m = decimated.size();
        VibrationRecord rec;
        rec.displacement.sample_rate = out_rate;
        rec.velocity.sample_rate = out_rate;

        // Reference the mean to the settled interior so edge transients do
        // not bias the reported displacement.
        std::uint64_t margin =
            static_cast<std::uint64_t>(std::ceil(decim.settle_seconds() * out_rate)) + 2;
        std::size_t lo = static_cast<std::size_t>(margin);
        std::size_t hi = m > lo ? m - lo : 0;
        if (lo >= hi) {
            lo = 0;
            hi = m;
        }
        double mean_int = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean_int += decimated[i];
        if (hi > lo) mean_int /= static_cast<double>(hi - lo);

        rec.displacement.samples.resize(m);
        for (std::size_t i = 0; i < m; ++i) rec.displacement.samples[i] = decimated[i] - mean_int;

        rec.velocity.samples.assign(m, 0.0);
        if (m >= 2) {
            const auto& x = rec.displacement.samples;
            rec.velocity.samples[0] = (x[1] - x[0]) * out_rate;
            rec.velocity.samples[m - 1] = (x[m - 1] - x[m - 2]) * out_rate;
            for (std::size_t i = 1; i + 1 < m; ++i) {
                rec.velocity.samples[i] = (x[i + 1] - x[i - 1]) * out_rate / 2.0;
            }
        }

        // High-frequency residue: variance lost between the full-rate series
        // and its band-limited decimated version, reported as phase RMS.
        double var_full = 0.0, var_dec = 0.0;
        if (count > 0) {
            const double mu = sum / static_cast<double>(count);
            var_full = sum2 / static_cast<double>(count) - mu * mu;
        }
        if (m > 0) {
            double s = 0.0, s2 = 0.0;
            for (double v : decimated) {
                s += v;
                s2 += v * v;
            }
            const double mu = s / static_cast<double>(m);
            var_dec = s2 / static_cast<double>(m) - mu * mu;
        }
        const double var_resid = std::max(0.0, var_full - var_dec);
        rec.residual_phase_rms = std::sqrt(var_resid) * 4.0 * pi / wavelength;
        return rec;
    }

    Decimator decim;
    std::vector<double> decimated;
    double out_rate = 0.0;
    double sum = 0.0, sum2 = 0.0;
    std::uint64_t count = 0;
};

} // namespace

VibrationRecord kinematics_from_phase(const TimeSeries& phase, double wavelength_m,
                                      const DemodConfig& cfg) {
    validate(cfg);
    if (wavelength_m <= 0.0) throw InvalidConfigError("kinematics_from_phase: wavelength must be > 0");
    if (phase.sample_rate != cfg.input_rate) {
        throw InvalidInputError("kinematics_from_phase: series rate does not match config");
    }
    KinematicsBuilder builder(cfg);
    const double scale = wavelength_m / (4.0 * pi);
    std::vector<double> disp(phase.samples.size());
    for (std::size_t i = 0; i < disp.size(); ++i) disp[i] = phase.samples[i] * scale;
    builder.push_displacement(disp);
    return builder.finish(wavelength_m);
}

// ---------------------------------------------------------------------------
// Demodulator

Demodulator::Demodulator(const DemodConfig& cfg, double wavelength_m)
    : cfg_(cfg),
      wavelength_(wavelength_m),
      lp_taps_((validate(cfg), design_envelope_lowpass(cfg))),
      fir_re_(lp_taps_),
      fir_im_(lp_taps_),
      decim_(cfg.input_rate, cfg.output_rate) {
    if (wavelength_ <= 0.0) throw InvalidConfigError("Demodulator: wavelength must be > 0");
    // When the carrier divides the sample rate the mixer phase is periodic;
    // auto-sized carriers use fs = 4 f_b.
    const double q = cfg_.input_rate / cfg_.carrier_hz;
    if (std::abs(q - std::round(q)) < 1e-12 && q >= 2.0 && q <= 64.0) {
        mixer_period_ = static_cast<int>(std::round(q));
        mix_cos_.resize(static_cast<std::size_t>(mixer_period_));
        mix_sin_.resize(static_cast<std::size_t>(mixer_period_));
        for (int k = 0; k < mixer_period_; ++k) {
            const double a = two_pi * static_cast<double>(k) / static_cast<double>(mixer_period_);
            mix_cos_[static_cast<std::size_t>(k)] = std::cos(a);
            mix_sin_[static_cast<std::size_t>(k)] = -std::sin(a);
        }
    }
}

double Demodulator::settle_seconds() const {
    return static_cast<double>(fir_re_.group_delay()) / cfg_.input_rate + decim_.settle_seconds();
}

std::uint64_t Demodulator::settle_output_samples() const {
    return static_cast<std::uint64_t>(std::ceil(settle_seconds() * cfg_.output_rate)) + 2;
}

void Demodulator::push(std::span<const double> photocurrent) {
    const std::size_t n = photocurrent.size();
    mix_re_.resize(n);
    mix_im_.resize(n);
    if (mixer_period_ > 0) {
        const std::uint64_t p = static_cast<std::uint64_t>(mixer_period_);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>((n_in_ + i) % p);
            mix_re_[i] = photocurrent[i] * mix_cos_[k];
            mix_im_[i] = photocurrent[i] * mix_sin_[k];
        }
    } else {
        const double fs = cfg_.input_rate;
        for (std::size_t i = 0; i < n; ++i) {
            const double cyc =
                std::fmod(cfg_.carrier_hz * static_cast<double>(n_in_ + i), fs) / fs;
            mix_re_[i] = photocurrent[i] * std::cos(two_pi * cyc);
            mix_im_[i] = photocurrent[i] * -std::sin(two_pi * cyc);
        }
    }
    n_in_ += n;

    flt_re_.clear();
    flt_im_.clear();
    fir_re_.push(mix_re_, flt_re_);
    fir_im_.push(mix_im_, flt_im_);
    consume_filtered(flt_re_.size());
}

void Demodulator::consume_filtered(std::size_t count) {
    disp_.resize(count);
    const double scale = -wavelength_ / (4.0 * pi); // envelope argument is -phi(t)
    for (std::size_t i = 0; i < count; ++i) {
        const double raw = std::atan2(flt_im_[i], flt_re_[i]);
        if (have_prev_) {
            const double d = raw - prev_raw_;
            if (std::abs(d) > pi) unwrap_offset_ -= two_pi * std::ceil(d / two_pi - 0.5);
        } else {
            have_prev_ = true;
        }
        prev_raw_ = raw;
        disp_[i] = (raw + unwrap_offset_) * scale;
    }
    n_flt_ += count;

    for (double v : disp_) {
        sum_full_ += v;
        sum2_full_ += v * v;
    }
    count_full_ += count;
    decim_.push(disp_, decimated_);
}

VibrationRecord Demodulator::finish() {
    flt_re_.clear();
    flt_im_.clear();
    fir_re_.flush(flt_re_);
    fir_im_.flush(flt_im_);
    consume_filtered(flt_re_.size());
    decim_.flush(decimated_);

    const std::size_t m = decimated_.size();
    VibrationRecord rec;
    rec.displacement.sample_rate = cfg_.output_rate;
    rec.velocity.sample_rate = cfg_.output_rate;

    std::size_t lo = static_cast<std::size_t>(settle_output_samples());
    std::size_t hi = m > lo ? m - lo : 0;
    if (lo >= hi) {
        lo = 0;
        hi = m;
    }
    double mean_int = 0.0;
    for (std::size_t i = lo; i < hi; ++i) mean_int += decimated_[i];
    if (hi > lo) mean_int /= static_cast<double>(hi - lo);

    rec.displacement.samples.resize(m);
    for (std::size_t i = 0; i < m; ++i) rec.displacement.samples[i] = decimated_[i] - mean_int;

    rec.velocity.samples.assign(m, 0.0);
    if (m >= 2) {
        const auto& x = rec.displacement.samples;
        rec.velocity.samples[0] = (x[1] - x[0]) * cfg_.output_rate;
        rec.velocity.samples[m - 1] = (x[m - 1] - x[m - 2]) * cfg_.output_rate;
        for (std::size_t i = 1; i + 1 < m; ++i) {
            rec.velocity.samples[i] = (x[i + 1] - x[i - 1]) * cfg_.output_rate / 2.0;
        }
    }

    double var_full = 0.0, var_dec = 0.0;
    if (count_full_ > 0) {
        const double mu = sum_full_ / static_cast<double>(count_full_);
        var_full = sum2_full_ / static_cast<double>(count_full_) - mu * mu;
    }
    if (m > 0) {
        double s = 0.0, s2 = 0.0;
        for (double v : decimated_) {
            s += v;
            s2 += v * v;
        }
        const double mu = s / static_cast<double>(m);
        var_dec = s2 / static_cast<double>(m) - mu * mu;
    }
    rec.residual_phase_rms =
        std::sqrt(std::max(0.0, var_full - var_dec)) * 4.0 * pi / wavelength_;
    return rec;
}

} // namespace ldv::demod
