#pragma once

// Scenario orchestration: end-to-end vibrometer + accelerometer runs, the
// built-in calibration sweep and component-comparison suites, and report /
// spectrum file emission.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ldv/demod.hpp"
#include "ldv/dsp.hpp"
#include "ldv/motion.hpp"
#include "ldv/noise.hpp"
#include "ldv/optics.hpp"
#include "ldv/reference.hpp"
#include "ldv/types.hpp"

namespace ldv::harness {

struct ToleranceSpec {
    double ldv_hz = 0.15;
    double accel_hz = 0.5;
    double cross_hz = 1.0;
};

/// One complete simulation setup. A Bragg shift / detector rate of 0 asks
/// the runner to size the carrier from the profile's peak speed:
/// f_b = 1.5 * max Doppler + 100 kHz, fs = 4 f_b, rounded so fs is a
/// 5-smooth integer multiple of the output rate.
struct Scenario {
    std::string name;
    motion::MotionProfile motion;
    optics::OpticalConfig optical;
    optics::DetectorConfig detector;
    noise::NoiseConfig noise;
    reference::AccelerometerConfig accelerometer;
    double lowpass_cutoff = 0.0; // demod envelope filter; 0 = default
    double output_rate = 20e3;   // vibration-analysis rate
    double duration = 2.0;       // s; must give >= 16 cycles of the lowest tone
    RandomSeed seed;
    double band_lo = 0.0, band_hi = 0.0; // analysis band; 0,0 = auto around truth
    int henderson_terms = 13;            // 0 disables post-demodulation smoothing
    ToleranceSpec tolerance;
};

void validate(const Scenario& s);

/// Frequency reported as ground truth: the largest-amplitude component.
double truth_frequency(const motion::MotionProfile& profile);

struct ResolvedFrontend {
    optics::OpticalConfig optical;
    optics::DetectorConfig detector;
    demod::DemodConfig demodulator;
};

/// Applies the carrier-sizing rule / fills derived defaults.
ResolvedFrontend resolve_frontend(const Scenario& s);

struct CalibrationRow {
    double applied_frequency_hz = 0.0;
    double applied_displacement_m = 0.0;
    double indicated_frequency_hz = 0.0;
    double tolerance_hz = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    std::string component;
    double truth_frequency_hz = 0.0;
    double ldv_frequency_hz = 0.0;
    double accel_frequency_hz = 0.0;
    double ldv_error_hz = 0.0;
    double accel_error_hz = 0.0;
    double displacement_amplitude_recovered_m = 0.0;
};

struct ScenarioOutcome {
    ComparisonReport report;
    dsp::Spectrum ldv_spectrum;
    dsp::Spectrum accel_spectrum;
    double truth_amplitude_m = 0.0;
    double carrier_hz = 0.0;
    double input_rate_hz = 0.0;
    double residual_phase_rms = 0.0;
    bool pass = false;
};

ScenarioOutcome run_scenario_detailed(const Scenario& s);
ComparisonReport run_scenario(const Scenario& s);

/// Runs scenarios on up to `threads` workers (<= 0 selects the cap from
/// LDV_LAB_THREADS or the hardware). Output order matches input order and is
/// identical for serial and parallel execution.
std::vector<ScenarioOutcome> run_scenarios(std::span<const Scenario> scenarios, int threads);

/// Built-in scenario sets. Per-scenario seeds derive from (seed, index).
std::vector<Scenario> calibration_scenarios(RandomSeed seed);
std::vector<Scenario> component_scenarios(RandomSeed seed);
/// 40 Hz air-filter cross-check run.
Scenario air_filter_40_scenario(RandomSeed seed);

struct CalibrationOutcome {
    CalibrationRow row;
    double amplitude_m = 0.0;       // recovered displacement amplitude
    double truth_amplitude_m = 0.0; // applied amplitude
};

std::vector<CalibrationOutcome> run_calibration_detailed(RandomSeed seed, int threads);
std::vector<CalibrationRow> run_calibration_table(RandomSeed seed);
std::vector<ComparisonReport> run_component_suite(RandomSeed seed);

/// Thread cap from the LDV_LAB_THREADS environment variable (hardware
/// concurrency when unset or invalid).
int default_thread_cap();

// ---------------------------------------------------------------------------
// Report emission

enum class ReportFormat { csv, json };

/// CSV columns: component,truth_hz,ldv_hz,accel_hz,ldv_err_hz,accel_err_hz,
/// amplitude_m. JSON mirrors the column names. Numbers carry 12 significant
/// digits.
void emit_report(std::span<const ComparisonReport> reports, ReportFormat format,
                 const std::string& path);

/// CSV columns: applied_hz,applied_displacement_m,indicated_hz,tolerance_hz,
/// pass. JSON mirrors the column names.
void emit_calibration(std::span<const CalibrationRow> rows, ReportFormat format,
                      const std::string& path);

/// CSV columns: frequency_hz,magnitude,phase_rad.
void emit_spectrum_data(const dsp::Spectrum& spec, const std::string& path);

// ---------------------------------------------------------------------------
// Scenario config files (TOML, one [scenario.<name>] table per scenario)

/// Parses a scenario config file. Each scenario's stream derives from
/// (base_seed.seed, hash(name)); explicit CLI seeds override base_seed.seed.
std::map<std::string, Scenario> load_scenarios(const std::string& path, RandomSeed base_seed);

} // namespace ldv::harness
