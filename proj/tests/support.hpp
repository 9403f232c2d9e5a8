#pragma once

// Shared test oracles, independent of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <vector>

#include "ldv/dsp.hpp"
#include "ldv/types.hpp"

namespace testsupport {

inline double mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double rms(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

inline double rel_rms_error(std::span<const double> got, std::span<const double> want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double d = got[i] - want[i];
        num += d * d;
        den += want[i] * want[i];
    }
    return std::sqrt(num / den);
}

/// Eighth-order central finite differences (interior points only), accurate
/// enough to resolve 1e-6 relative agreement at 50 samples per period.
inline std::vector<double> central_diff8(std::span<const double> x, double fs) {
    static constexpr double a1 = 4.0 / 5.0, a2 = -1.0 / 5.0, a3 = 4.0 / 105.0, a4 = -1.0 / 280.0;
    std::vector<double> d;
    if (x.size() < 9) return d;
    d.resize(x.size() - 8);
    for (std::size_t i = 4; i + 4 < x.size(); ++i) {
        d[i - 4] = (a1 * (x[i + 1] - x[i - 1]) + a2 * (x[i + 2] - x[i - 2]) +
                    a3 * (x[i + 3] - x[i - 3]) + a4 * (x[i + 4] - x[i - 4])) * fs;
    }
    return d;
}

/// Plain O(N^2) DFT, the independent oracle for transform identities.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = -ldv::constants::two_pi * static_cast<double>(k) *
                               static_cast<double>(m) / static_cast<double>(n);
            acc += x[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

/// Welch PSD with Hann segments and 50% overlap; one-sided, units^2/Hz.
/// (Uses the library FFT as a subroutine; it is an oracle for the noise
/// generators, not for the transform itself.)
struct WelchResult {
    std::vector<double> frequency;
    std::vector<double> psd;
};

inline WelchResult welch_psd(std::span<const double> x, double fs, std::size_t segment) {
    std::vector<double> window(segment);
    double wpow = 0.0;
    for (std::size_t i = 0; i < segment; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(ldv::constants::two_pi * static_cast<double>(i) /
                                          static_cast<double>(segment)));
        wpow += window[i] * window[i];
    }
    WelchResult res;
    res.frequency.resize(segment / 2 + 1);
    res.psd.assign(segment / 2 + 1, 0.0);
    for (std::size_t k = 0; k < res.frequency.size(); ++k) {
        res.frequency[k] = fs * static_cast<double>(k) / static_cast<double>(segment);
    }

    std::size_t count = 0;
    std::vector<double> seg(segment);
    for (std::size_t start = 0; start + segment <= x.size(); start += segment / 2) {
        for (std::size_t i = 0; i < segment; ++i) seg[i] = x[start + i] * window[i];
        const auto bins = ldv::dsp::rfft(seg);
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const double scale = (k == 0 || k == bins.size() - 1) ? 1.0 : 2.0;
            res.psd[k] += scale * std::norm(bins[k]) / (fs * wpow);
        }
        ++count;
    }
    for (double& v : res.psd) v /= static_cast<double>(count);
    return res;
}

/// Log-log straight-line fit; returns the slope.
inline double loglog_slope(std::span<const double> f, std::span<const double> p, double f_lo,
                           double f_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < f_lo || f[i] > f_hi || p[i] <= 0.0) continue;
        const double lx = std::log(f[i]);
        const double ly = std::log(p[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

/// Kolmogorov-Smirnov distance against the unit-mean exponential CDF.
inline double ks_distance_exp1(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = 1.0 - std::exp(-samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    return d;
}

} // namespace testsupport
