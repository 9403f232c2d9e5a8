#include "ldv/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "ldv/errors.hpp"

namespace ldv::dsp {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double bessel_i0(double x) {
    // Series expansion; converges quickly for the beta range Kaiser uses.
    double sum = 1.0;
    double term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

std::vector<double> ideal_lowpass(double fc, double fs, int taps) {
    const int mid = (taps - 1) / 2;
    const double wc = constants::two_pi * fc / fs;
    std::vector<double> h(static_cast<std::size_t>(taps));
    for (int k = 0; k < taps; ++k) {
        const int m = k - mid;
        h[static_cast<std::size_t>(k)] =
            (m == 0) ? wc / constants::pi : std::sin(wc * m) / (constants::pi * m);
    }
    return h;
}

double gain_at(std::span<const double> h, double freq, double fs) {
    // Linear-phase taps: real response about the center tap.
    const int mid = (static_cast<int>(h.size()) - 1) / 2;
    double g = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        g += h[k] * std::cos(constants::two_pi * freq / fs * (static_cast<int>(k) - mid));
    }
    return g;
}

} // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<std::complex<double>> rfft(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> half_spectrum, std::size_t n) {
    if (half_spectrum.size() != n / 2 + 1) {
        throw InvalidInputError("irfft: spectrum length does not match output length");
    }
    std::vector<std::complex<double>> in(half_spectrum.begin(), half_spectrum.end());
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                    reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

Spectrum compute_spectrum(const TimeSeries& series, Window window) {
    const std::size_t n = series.samples.size();
    if (n < 2) throw InvalidInputError("compute_spectrum: need at least 2 samples");
    if (series.sample_rate <= 0.0) throw InvalidInputError("compute_spectrum: sample rate must be positive");

    std::vector<double> buf(n);
    double coherent_gain = 1.0;
    if (window == Window::hann) {
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w =
                0.5 * (1.0 - std::cos(constants::two_pi * static_cast<double>(i) / static_cast<double>(n)));
            buf[i] = series.samples[i] * w;
            wsum += w;
        }
        coherent_gain = wsum / static_cast<double>(n);
    } else {
        std::copy(series.samples.begin(), series.samples.end(), buf.begin());
    }

    const auto bins = rfft(buf);
    Spectrum spec;
    spec.sample_rate = series.sample_rate;
    spec.record_length = n;
    spec.window = window;
    spec.frequency_axis.resize(bins.size());
    spec.magnitude.resize(bins.size());
    spec.phase.resize(bins.size());

    const double df = series.sample_rate / static_cast<double>(n);
    const double interior_scale = 2.0 / (static_cast<double>(n) * coherent_gain);
    const double edge_scale = 1.0 / (static_cast<double>(n) * coherent_gain);
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const bool edge = (k == 0) || (n % 2 == 0 && k == bins.size() - 1);
        spec.frequency_axis[k] = df * static_cast<double>(k);
        spec.magnitude[k] = std::abs(bins[k]) * (edge ? edge_scale : interior_scale);
        spec.phase[k] = std::arg(bins[k]);
    }
    return spec;
}

std::vector<double> design_fir(const FilterSpec& spec, double fs) {
    if (fs <= 0.0) throw InvalidConfigError("design_fir: sample rate must be positive");
    const double nyq = fs / 2.0;
    const double tw = spec.transition_width;
    if (tw <= 0.0) throw InvalidConfigError("design_fir: transition width must be positive");
    if (spec.stopband_atten_db <= 0.0) throw InvalidConfigError("design_fir: attenuation must be positive");

    double fc_lo = 0.0;
    double fc_hi = 0.0;
    switch (spec.kind) {
    case FilterSpec::Kind::low:
        if (spec.cutoff_lo <= 0.0 || spec.cutoff_lo >= nyq)
            throw InvalidConfigError("design_fir: low-pass cutoff outside (0, fs/2)");
        fc_lo = spec.cutoff_lo + tw / 2.0;
        if (fc_lo >= nyq) throw InvalidConfigError("design_fir: transition band exceeds Nyquist");
        break;
    case FilterSpec::Kind::high:
        if (spec.cutoff_lo <= 0.0 || spec.cutoff_lo >= nyq)
            throw InvalidConfigError("design_fir: high-pass cutoff outside (0, fs/2)");
        fc_lo = spec.cutoff_lo - tw / 2.0;
        if (fc_lo <= 0.0) throw InvalidConfigError("design_fir: transition band extends below 0");
        break;
    case FilterSpec::Kind::band:
        if (spec.cutoff_lo <= 0.0 || spec.cutoff_hi >= nyq || spec.cutoff_lo >= spec.cutoff_hi)
            throw InvalidConfigError("design_fir: band edges must satisfy 0 < lo < hi < fs/2");
        fc_lo = spec.cutoff_lo - tw / 2.0;
        fc_hi = spec.cutoff_hi + tw / 2.0;
        if (fc_lo <= 0.0 || fc_hi >= nyq)
            throw InvalidConfigError("design_fir: transition bands exceed (0, fs/2)");
        break;
    }

    const double atten = spec.stopband_atten_db;
    const double delta_omega = constants::two_pi * tw / fs;
    int taps = static_cast<int>(std::ceil((atten - 7.95) / (2.285 * delta_omega))) + 1;
    taps = std::max(taps, 5);
    if (taps % 2 == 0) ++taps;
    if (taps > 8191) throw DesignFailureError("design_fir: spec needs more than 8191 taps");

    double beta = 0.0;
    if (atten > 50.0) {
        beta = 0.1102 * (atten - 8.7);
    } else if (atten >= 21.0) {
        beta = 0.5842 * std::pow(atten - 21.0, 0.4) + 0.07886 * (atten - 21.0);
    }

    std::vector<double> h;
    switch (spec.kind) {
    case FilterSpec::Kind::low:
        h = ideal_lowpass(fc_lo, fs, taps);
        break;
    case FilterSpec::Kind::high: {
        h = ideal_lowpass(fc_lo, fs, taps);
        for (double& v : h) v = -v;
        h[static_cast<std::size_t>((taps - 1) / 2)] += 1.0;
        break;
    }
    case FilterSpec::Kind::band: {
        h = ideal_lowpass(fc_hi, fs, taps);
        const auto lo = ideal_lowpass(fc_lo, fs, taps);
        for (int k = 0; k < taps; ++k) h[static_cast<std::size_t>(k)] -= lo[static_cast<std::size_t>(k)];
        break;
    }
    }

    const double denom = bessel_i0(beta);
    const int mid = (taps - 1) / 2;
    for (int k = 0; k < taps; ++k) {
        const double r = static_cast<double>(k - mid) / mid;
        h[static_cast<std::size_t>(k)] *= bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
    }

    // Pin unity gain at a reference point in the passband.
    double ref_gain = 1.0;
    switch (spec.kind) {
    case FilterSpec::Kind::low:
        ref_gain = gain_at(h, 0.0, fs);
        break;
    case FilterSpec::Kind::high:
        ref_gain = gain_at(h, nyq, fs);
        break;
    case FilterSpec::Kind::band:
        ref_gain = gain_at(h, (spec.cutoff_lo + spec.cutoff_hi) / 2.0, fs);
        break;
    }
    for (double& v : h) v /= ref_gain;
    return h;
}

std::vector<double> apply_fir(std::span<const double> x, std::span<const double> taps) {
    const std::size_t nh = taps.size();
    if (nh == 0 || nh % 2 == 0) throw InvalidInputError("apply_fir: tap count must be odd");
    const std::size_t n = x.size();
    const std::ptrdiff_t d = static_cast<std::ptrdiff_t>((nh - 1) / 2);
    std::vector<double> y(n, 0.0);

    const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
    const std::ptrdiff_t snh = static_cast<std::ptrdiff_t>(nh);
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        const std::ptrdiff_t base = i + d; // x index for tap 0
        double acc = 0.0;
        if (base - snh + 1 >= 0 && base < sn) {
            const double* xp = x.data() + base;
            for (std::ptrdiff_t k = 0; k < snh; ++k) acc += taps[static_cast<std::size_t>(k)] * xp[-k];
        } else {
            for (std::ptrdiff_t k = 0; k < snh; ++k) {
                const std::ptrdiff_t j = base - k;
                if (j >= 0 && j < sn) acc += taps[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(j)];
            }
        }
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

std::vector<double> filtfilt(std::span<const double> x, std::span<const double> taps) {
    auto y = apply_fir(x, taps);
    std::reverse(y.begin(), y.end());
    y = apply_fir(y, taps);
    std::reverse(y.begin(), y.end());
    return y;
}

std::vector<double> henderson_weights(int terms) {
    if (terms < 5 || terms % 2 == 0) {
        throw InvalidInputError("henderson_weights: term count must be odd and >= 5");
    }
    const int p = (terms - 1) / 2;
    const double n = static_cast<double>(p + 2);
    const double denom =
        8.0 * n * (n * n - 1.0) * (4.0 * n * n - 1.0) * (4.0 * n * n - 9.0) * (4.0 * n * n - 25.0);
    std::vector<double> w(static_cast<std::size_t>(terms));
    for (int j = -p; j <= p; ++j) {
        const double jj = static_cast<double>(j) * j;
        const double num = 315.0 * ((n - 1.0) * (n - 1.0) - jj) * (n * n - jj) *
                           ((n + 1.0) * (n + 1.0) - jj) * (3.0 * n * n - 16.0 - 11.0 * jj);
        w[static_cast<std::size_t>(j + p)] = num / denom;
    }
    return w;
}

TimeSeries henderson_smooth(const TimeSeries& series, int terms) {
    const std::size_t n = series.samples.size();
    if (terms < 5 || terms % 2 == 0) {
        throw InvalidInputError("henderson_smooth: term count must be odd and >= 5");
    }
    if (static_cast<std::size_t>(terms) > n) {
        throw InvalidInputError("henderson_smooth: term count exceeds series length");
    }
    const auto w = henderson_weights(terms);
    const int p = (terms - 1) / 2;

    TimeSeries out;
    out.sample_rate = series.sample_rate;
    out.samples.resize(n);
    const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        const std::ptrdiff_t j_lo = std::max<std::ptrdiff_t>(-p, -i);
        const std::ptrdiff_t j_hi = std::min<std::ptrdiff_t>(p, sn - 1 - i);
        double acc = 0.0;
        double wsum = 0.0;
        for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
            const double wj = w[static_cast<std::size_t>(j + p)];
            acc += wj * series.samples[static_cast<std::size_t>(i + j)];
            wsum += wj;
        }
        out.samples[static_cast<std::size_t>(i)] = acc / wsum;
    }
    return out;
}

namespace {

// Asymptotic Hann kernel magnitude at offset x bins is K / |x (x-1) (x+1)|,
// so the three-point log parabola lands at a predictable offset for every
// true delta. This is that map; peak_frequency inverts it.
double hann_parabola_map(double delta) {
    if (std::abs(delta) < 1e-9) return delta;
    const double p = std::log(((1.0 - delta) * (2.0 - delta)) / ((1.0 + delta) * (2.0 + delta)));
    const double q = std::log((1.0 - delta * delta) / (4.0 - delta * delta));
    return 0.5 * p / q;
}

double invert_hann_parabola(double delta_raw) {
    double x = std::clamp(delta_raw, -0.5, 0.5);
    for (int it = 0; it < 8; ++it) {
        const double h = 1e-6;
        const double f = hann_parabola_map(x) - delta_raw;
        const double fp = (hann_parabola_map(x + h) - hann_parabola_map(x - h)) / (2.0 * h);
        if (fp == 0.0) break;
        const double step = f / fp;
        x -= step;
        x = std::clamp(x, -0.5, 0.5);
        if (std::abs(step) < 1e-12) break;
    }
    return x;
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(constants::pi * x) / (constants::pi * x);
}

} // namespace

PeakEstimate peak_frequency(const Spectrum& spec, double f_lo, double f_hi) {
    if (spec.magnitude.empty()) throw InvalidInputError("peak_frequency: empty spectrum");
    if (f_lo > f_hi) throw InvalidInputError("peak_frequency: band limits reversed");
    const double df = spec.bin_spacing();
    const double axis_max = spec.frequency_axis.back();
    const std::size_t k_lo = static_cast<std::size_t>(std::ceil(std::max(0.0, f_lo) / df));
    const std::size_t k_hi_raw = static_cast<std::size_t>(std::floor(std::min(f_hi, axis_max) / df));
    if (k_lo >= spec.magnitude.size() || k_hi_raw < k_lo) {
        throw InvalidInputError("peak_frequency: band contains no bins");
    }
    const std::size_t k_hi = std::min(k_hi_raw, spec.magnitude.size() - 1);

    std::size_t k_peak = k_lo;
    for (std::size_t k = k_lo + 1; k <= k_hi; ++k) {
        if (spec.magnitude[k] > spec.magnitude[k_peak]) k_peak = k;
    }

    PeakEstimate est;
    est.bin_index = k_peak;
    est.frequency_hz = spec.frequency_axis[k_peak];
    est.amplitude = spec.magnitude[k_peak];
    est.interpolated = false;

    if (k_peak > 0 && k_peak + 1 < spec.magnitude.size()) {
        const double ml = spec.magnitude[k_peak - 1];
        const double mc = spec.magnitude[k_peak];
        const double mr = spec.magnitude[k_peak + 1];
        if (ml > 0.0 && mc > 0.0 && mr > 0.0) {
            const double a = std::log(ml);
            const double b = std::log(mc);
            const double c = std::log(mr);
            const double denom = a - 2.0 * b + c;
            if (denom < 0.0) { // proper maximum
                double delta = 0.5 * (a - c) / denom;
                delta = std::clamp(delta, -0.5, 0.5);
                if (spec.window == Window::hann) delta = invert_hann_parabola(delta);
                est.frequency_hz = (static_cast<double>(k_peak) + delta) * df;
                // Scalloping correction from the window kernel at the
                // refined offset.
                double kernel = 1.0;
                if (spec.window == Window::hann) {
                    kernel = sinc(delta) / (1.0 - delta * delta);
                } else {
                    kernel = std::abs(sinc(delta));
                }
                est.amplitude = kernel > 0.0 ? mc / kernel : std::exp(b - 0.25 * (a - c) * delta);
                est.interpolated = true;
            }
        }
    }
    return est;
}

ToneFit fit_tone(std::span<const double> x, double fs, double frequency_hz) {
    if (x.size() < 3) throw InvalidInputError("fit_tone: need at least 3 samples");
    if (fs <= 0.0 || frequency_hz <= 0.0) throw InvalidInputError("fit_tone: rate and frequency must be positive");

    double sss = 0.0, scc = 0.0, ssc = 0.0, ss = 0.0, sc = 0.0, sxs = 0.0, sxc = 0.0, sx = 0.0;
    const double w = constants::two_pi * frequency_hz / fs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = std::sin(w * static_cast<double>(i));
        const double c = std::cos(w * static_cast<double>(i));
        sss += s * s;
        scc += c * c;
        ssc += s * c;
        ss += s;
        sc += c;
        sxs += x[i] * s;
        sxc += x[i] * c;
        sx += x[i];
    }
    const double n = static_cast<double>(x.size());
    // Solve [sss ssc ss; ssc scc sc; ss sc n] [a b c]' = [sxs sxc sx]'
    const double d = sss * (scc * n - sc * sc) - ssc * (ssc * n - sc * ss) + ss * (ssc * sc - scc * ss);
    if (std::abs(d) < 1e-12 * n * n * n) throw InvalidInputError("fit_tone: degenerate system");
    const double a =
        (sxs * (scc * n - sc * sc) - ssc * (sxc * n - sc * sx) + ss * (sxc * sc - scc * sx)) / d;
    const double b =
        (sss * (sxc * n - sc * sx) - sxs * (ssc * n - sc * ss) + ss * (ssc * sx - sxc * ss)) / d;
    const double c =
        (sss * (scc * sx - sxc * sc) - ssc * (ssc * sx - sxc * ss) + sxs * (ssc * sc - scc * ss)) / d;

    ToneFit fit;
    fit.amplitude = std::hypot(a, b);
    fit.phase = std::atan2(b, a);
    fit.offset = c;
    return fit;
}

} // namespace ldv::dsp
