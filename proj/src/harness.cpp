#include "ldv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "ldv/errors.hpp"
#include "ldv/rng.hpp"

namespace ldv::harness {

namespace {

constexpr std::uint64_t kChunk = 1u << 20;

double min_frequency(const motion::MotionProfile& profile) {
    if (profile.kind == motion::ProfileKind::chirp) {
        return std::min(profile.chirp_f_start_hz, profile.chirp_f_end_hz);
    }
    double f = profile.components.front().frequency_hz;
    for (const auto& c : profile.components) f = std::min(f, c.frequency_hz);
    return f;
}

std::uint64_t next_smooth(std::uint64_t m) {
    for (std::uint64_t v = std::max<std::uint64_t>(m, 1);; ++v) {
        std::uint64_t r = v;
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return v;
    }
}

TimeSeries trim_edges(const TimeSeries& series, std::size_t margin) {
    TimeSeries out;
    out.sample_rate = series.sample_rate;
    if (series.samples.size() > 2 * margin + 16) {
        out.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(margin),
                           series.samples.end() - static_cast<std::ptrdiff_t>(margin));
    } else {
        out.samples = series.samples;
    }
    return out;
}

} // namespace

double truth_frequency(const motion::MotionProfile& profile) {
    if (profile.kind == motion::ProfileKind::chirp) {
        return 0.5 * (profile.chirp_f_start_hz + profile.chirp_f_end_hz);
    }
    const auto it = std::max_element(
        profile.components.begin(), profile.components.end(),
        [](const auto& a, const auto& b) { return a.amplitude_m < b.amplitude_m; });
    return it->frequency_hz;
}

void validate(const Scenario& s) {
    motion::validate(s.motion);
    if (s.duration <= 0.0) throw InvalidConfigError("scenario '" + s.name + "': duration must be > 0");
    const double fmin = min_frequency(s.motion);
    if (s.duration < 16.0 / fmin) {
        throw InvalidConfigError("scenario '" + s.name +
                                 "': duration under 16 cycles of the lowest tone");
    }
    if (s.output_rate <= 0.0) {
        throw InvalidConfigError("scenario '" + s.name + "': output rate must be > 0");
    }
    if (s.band_lo < 0.0 || s.band_hi < s.band_lo) {
        throw InvalidConfigError("scenario '" + s.name + "': invalid analysis band");
    }
    if (s.henderson_terms != 0 && (s.henderson_terms < 5 || s.henderson_terms % 2 == 0)) {
        throw InvalidConfigError("scenario '" + s.name + "': henderson_terms must be 0 or odd >= 5");
    }
}

ResolvedFrontend resolve_frontend(const Scenario& s) {
    ResolvedFrontend r;
    r.optical = s.optical;
    r.detector = s.detector;

    const double vmax = motion::peak_speed(s.motion);
    const double doppler_max = std::abs(optics::doppler_shift(vmax, r.optical.wavelength));

    if (r.optical.bragg_shift <= 0.0 || r.detector.sample_rate <= 0.0) {
        const double f_b0 = 1.5 * doppler_max + 100e3;
        const std::uint64_t factor = next_smooth(static_cast<std::uint64_t>(
            std::ceil(4.0 * f_b0 / s.output_rate)));
        r.detector.sample_rate = static_cast<double>(factor) * s.output_rate;
        r.optical.bragg_shift = r.detector.sample_rate / 4.0;
    }
    if (r.detector.bandwidth <= 0.0) r.detector.bandwidth = r.detector.sample_rate / 2.0;

    optics::validate(r.optical);
    optics::validate(r.detector);
    if (r.detector.sample_rate <= 2.0 * (r.optical.bragg_shift + doppler_max)) {
        throw SamplingViolationError("scenario '" + s.name +
                                     "': detector rate below 2x (carrier + max Doppler)");
    }

    r.demodulator.carrier_hz = r.optical.bragg_shift;
    r.demodulator.input_rate = r.detector.sample_rate;
    r.demodulator.lowpass_cutoff = s.lowpass_cutoff;
    r.demodulator.output_rate = s.output_rate;
    demod::validate(r.demodulator);
    return r;
}

ScenarioOutcome run_scenario_detailed(const Scenario& s) {
    try {
        validate(s);
        const ResolvedFrontend fe = resolve_frontend(s);
        noise::validate(s.noise);
        reference::validate(s.accelerometer);

        const double fs = fe.detector.sample_rate;
        const std::uint64_t factor =
            static_cast<std::uint64_t>(std::llround(fs / s.output_rate));
        const std::uint64_t out_samples =
            static_cast<std::uint64_t>(std::llround(s.duration * s.output_rate));
        const std::uint64_t total = out_samples * factor;

        // Vibrometer channel, streamed in chunks.
        const double dc = optics::dc_current(fe.optical, fe.detector);
        const noise::NoiseSynth synth(fe.optical, fe.detector, s.noise, dc, s.seed, total);
        demod::Demodulator dem(fe.demodulator, fe.optical.wavelength);

        std::vector<double> disp(kChunk), current(kChunk);
        for (std::uint64_t n0 = 0; n0 < total; n0 += kChunk) {
            const std::size_t nn = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, total - n0));
            std::span<double> dspan(disp.data(), nn);
            std::span<double> cspan(current.data(), nn);
            motion::synth_kinematics_range(s.motion, fs, s.duration, n0, n0 + nn, dspan, {}, {});
            optics::detector_signal_range(dspan, n0, fe.optical, fe.detector, cspan);
            synth.apply(cspan, n0);
            dem.push(cspan);
        }
        demod::VibrationRecord rec = dem.finish();

        TimeSeries analysis = s.henderson_terms > 0
                                  ? dsp::henderson_smooth(rec.displacement, s.henderson_terms)
                                  : rec.displacement;
        const std::size_t margin =
            static_cast<std::size_t>(dem.settle_output_samples()) +
            static_cast<std::size_t>(s.henderson_terms > 0 ? (s.henderson_terms - 1) / 2 : 0);
        const TimeSeries ldv_trimmed = trim_edges(analysis, margin);

        const double truth = truth_frequency(s.motion);
        double lo = s.band_lo, hi = s.band_hi;
        if (lo == 0.0 && hi == 0.0) {
            lo = std::max(0.5, 0.5 * truth);
            hi = std::min(1.5 * truth + 5.0, 0.45 * s.output_rate);
        }

        ScenarioOutcome out;
        out.ldv_spectrum = dsp::compute_spectrum(ldv_trimmed, dsp::Window::hann);
        const auto ldv_peak = dsp::peak_frequency(out.ldv_spectrum, lo, hi);
        const auto fit = dsp::fit_tone(ldv_trimmed.samples, s.output_rate, ldv_peak.frequency_hz);

        // Accelerometer channel at its own (much lower) rate.
        const auto kin_accel =
            motion::synth_kinematics(s.motion, s.accelerometer.sample_rate, s.duration);
        const TimeSeries accel_v = reference::simulate_accelerometer(kin_accel, s.accelerometer, s.seed);
        const std::size_t accel_margin = static_cast<std::size_t>(
            std::ceil(reference::settle_seconds(s.accelerometer) * s.accelerometer.sample_rate)) + 2;
        const TimeSeries accel_trimmed = trim_edges(accel_v, accel_margin);
        out.accel_spectrum = dsp::compute_spectrum(accel_trimmed, dsp::Window::hann);
        const auto accel_peak = dsp::peak_frequency(out.accel_spectrum, lo, hi);

        out.report.component = s.name;
        out.report.truth_frequency_hz = truth;
        out.report.ldv_frequency_hz = ldv_peak.frequency_hz;
        out.report.accel_frequency_hz = accel_peak.frequency_hz;
        out.report.ldv_error_hz = ldv_peak.frequency_hz - truth;
        out.report.accel_error_hz = accel_peak.frequency_hz - truth;
        out.report.displacement_amplitude_recovered_m = fit.amplitude;

        double truth_amp = 0.0;
        for (const auto& c : s.motion.components) truth_amp = std::max(truth_amp, c.amplitude_m);
        out.truth_amplitude_m = truth_amp;
        out.carrier_hz = fe.optical.bragg_shift;
        out.input_rate_hz = fs;
        out.residual_phase_rms = rec.residual_phase_rms;
        out.pass = std::abs(out.report.ldv_error_hz) <= s.tolerance.ldv_hz &&
                   std::abs(out.report.accel_error_hz) <= s.tolerance.accel_hz &&
                   std::abs(out.report.ldv_frequency_hz - out.report.accel_frequency_hz) <=
                       s.tolerance.cross_hz;
        return out;
    } catch (const Error& e) {
        throw Error("scenario '" + s.name + "': " + e.what());
    }
}

ComparisonReport run_scenario(const Scenario& s) {
    return run_scenario_detailed(s).report;
}

int default_thread_cap() {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap <= 0) cap = 1;
    if (const char* env = std::getenv("LDV_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) cap = std::min<long>(v, 256);
    }
    return cap;
}

std::vector<ScenarioOutcome> run_scenarios(std::span<const Scenario> scenarios, int threads) {
    if (threads <= 0) threads = default_thread_cap();
    threads = std::min<int>(threads, static_cast<int>(scenarios.size()));
    std::vector<ScenarioOutcome> results(scenarios.size());

    if (threads <= 1) {
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            results[i] = run_scenario_detailed(scenarios[i]);
        }
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= scenarios.size()) break;
                    results[i] = run_scenario_detailed(scenarios[i]);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

// ---------------------------------------------------------------------------
// Built-in suites

namespace {

struct CalibrationPoint {
    double frequency_hz;
    double displacement_m;
    double tolerance_hz;
};

constexpr CalibrationPoint kCalibrationPoints[] = {
    {10.0, 163e-6, 0.30}, {20.0, 4.15e-3, 0.20}, {30.0, 1.68e-3, 0.15},
    {40.0, 336e-6, 0.15}, {50.0, 184e-6, 0.15},  {60.0, 1.70e-3, 0.15},
    {70.0, 434e-6, 0.15}, {80.0, 1.16e-3, 0.15}, {90.0, 165e-6, 0.15},
    {100.0, 770e-6, 0.15}, {130.0, 401e-6, 0.15},
};

Scenario make_tone_scenario(const std::string& name, double amplitude_m, double frequency_hz,
                            double duration_s, RandomSeed seed) {
    Scenario s;
    s.name = name;
    s.motion.kind = motion::ProfileKind::sinusoid;
    s.motion.components = {{amplitude_m, frequency_hz, 0.0}};
    s.duration = duration_s;
    s.seed = seed;
    return s;
}

} // namespace

std::vector<Scenario> calibration_scenarios(RandomSeed seed) {
    std::vector<Scenario> out;
    out.reserve(std::size(kCalibrationPoints));
    for (std::size_t i = 0; i < std::size(kCalibrationPoints); ++i) {
        const auto& p = kCalibrationPoints[i];
        char name[32];
        std::snprintf(name, sizeof(name), "cal_%03.0fhz", p.frequency_hz);
        Scenario s = make_tone_scenario(name, p.displacement_m, p.frequency_hz, 2.0,
                                        derive_stream(seed, i));
        s.tolerance.ldv_hz = p.tolerance_hz;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Scenario> component_scenarios(RandomSeed seed) {
    // Displacement amplitudes keep peak Doppler shifts well below 1 MHz so
    // the suite runs at desk scale; frequency recovery is amplitude-
    // independent.
    std::vector<Scenario> out;
    out.push_back(make_tone_scenario("pad", 0.5e-3, 6.0, 3.0, derive_stream(seed, 0)));
    out.push_back(make_tone_scenario("air_filter", 0.2e-3, 32.0, 2.0, derive_stream(seed, 1)));
    out.push_back(make_tone_scenario("gear", 0.1e-3, 76.0, 2.0, derive_stream(seed, 2)));
    out.push_back(make_tone_scenario("gear_85", 0.1e-3, 85.0, 2.0, derive_stream(seed, 3)));
    return out;
}

Scenario air_filter_40_scenario(RandomSeed seed) {
    return make_tone_scenario("air_filter_40", 0.2e-3, 40.0, 2.0, derive_stream(seed, 4));
}

std::vector<CalibrationOutcome> run_calibration_detailed(RandomSeed seed, int threads) {
    const auto scenarios = calibration_scenarios(seed);
    const auto outcomes = run_scenarios(scenarios, threads);

    std::vector<CalibrationOutcome> rows(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& p = kCalibrationPoints[i];
        CalibrationOutcome& r = rows[i];
        r.row.applied_frequency_hz = p.frequency_hz;
        r.row.applied_displacement_m = p.displacement_m;
        r.row.indicated_frequency_hz = outcomes[i].report.ldv_frequency_hz;
        r.row.tolerance_hz = p.tolerance_hz;
        r.row.pass = std::abs(r.row.indicated_frequency_hz - r.row.applied_frequency_hz) <=
                     r.row.tolerance_hz;
        r.amplitude_m = outcomes[i].report.displacement_amplitude_recovered_m;
        r.truth_amplitude_m = p.displacement_m;
    }
    return rows;
}

std::vector<CalibrationRow> run_calibration_table(RandomSeed seed) {
    const auto detailed = run_calibration_detailed(seed, 0);
    std::vector<CalibrationRow> rows;
    rows.reserve(detailed.size());
    for (const auto& d : detailed) rows.push_back(d.row);
    return rows;
}

std::vector<ComparisonReport> run_component_suite(RandomSeed seed) {
    const auto outcomes = run_scenarios(component_scenarios(seed), 0);
    std::vector<ComparisonReport> reports;
    reports.reserve(outcomes.size());
    for (const auto& o : outcomes) reports.push_back(o.report);
    return reports;
}

} // namespace ldv::harness
