#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ldv/errors.hpp"
#include "ldv/harness.hpp"
#include "support.hpp"

using namespace ldv;

namespace {

harness::Scenario fast_tone_scenario(const std::string& name, double amplitude, double frequency,
                                     double duration, RandomSeed seed) {
    harness::Scenario s;
    s.name = name;
    s.motion.kind = motion::ProfileKind::sinusoid;
    s.motion.components = {{amplitude, frequency, 0.0}};
    s.duration = duration;
    s.seed = seed;
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& stem) {
    return std::string("/tmp/ldv_test_") + stem;
}

} // namespace

TEST_CASE("carrier sizing: fs is a 5-smooth multiple of the output rate, f_b = fs/4") {
    auto s = fast_tone_scenario("sizing", 4.15e-3, 20.0, 2.0, RandomSeed{1, 0});
    const auto fe = harness::resolve_frontend(s);

    CHECK(fe.optical.bragg_shift == fe.detector.sample_rate / 4.0);
    const double factor = fe.detector.sample_rate / s.output_rate;
    CHECK(factor == std::round(factor));

    std::uint64_t rem = static_cast<std::uint64_t>(factor);
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        while (rem % p == 0) rem /= p;
    }
    CHECK(rem == 1);

    // the 4.15 mm / 20 Hz point needs a carrier above its peak Doppler shift
    const double vmax = motion::peak_speed(s.motion);
    const double doppler = optics::doppler_shift(vmax, fe.optical.wavelength);
    CHECK(doppler == doctest::Approx(1.648e6).epsilon(1e-3));
    CHECK(fe.optical.bragg_shift > doppler);
    CHECK(fe.detector.sample_rate > 2.0 * (fe.optical.bragg_shift + doppler));

    // explicit overrides are respected
    s.optical.bragg_shift = 2e6;
    s.detector.sample_rate = 8e6;
    const auto fe2 = harness::resolve_frontend(s);
    CHECK(fe2.optical.bragg_shift == 2e6);
    CHECK(fe2.detector.sample_rate == 8e6);
}

TEST_CASE("scenario validation") {
    auto s = fast_tone_scenario("short", 1e-4, 10.0, 1.0, RandomSeed{1, 1});
    CHECK_THROWS_AS(harness::validate(s), InvalidConfigError); // under 16 cycles

    auto ok = fast_tone_scenario("ok", 1e-4, 50.0, 0.5, RandomSeed{1, 2});
    CHECK_NOTHROW(harness::validate(ok));

    ok.henderson_terms = 4;
    CHECK_THROWS_AS(harness::validate(ok), InvalidConfigError);
}

TEST_CASE("noiseless scenario recovers the tone almost exactly") {
    auto s = fast_tone_scenario("noiseless", 163e-6, 50.0, 1.0, RandomSeed{2, 0});
    s.noise.enabled = {false, false, false, false};
    s.accelerometer.noise_floor_density = 1e-12;
    const auto outcome = harness::run_scenario_detailed(s);

    CHECK(std::abs(outcome.report.ldv_error_hz) < 0.01);
    CHECK(std::abs(outcome.report.accel_error_hz) < 0.01);
    CHECK(outcome.report.displacement_amplitude_recovered_m ==
          doctest::Approx(163e-6).epsilon(0.01));
    CHECK(outcome.pass);
    CHECK(outcome.report.component == "noiseless");
}

TEST_CASE("default-noise scenario stays inside its tolerance band") {
    auto s = fast_tone_scenario("noisy", 163e-6, 50.0, 2.0, RandomSeed{3, 0});
    const auto outcome = harness::run_scenario_detailed(s);
    CHECK(std::abs(outcome.report.ldv_error_hz) < 0.15);
    CHECK(std::abs(outcome.report.accel_error_hz) < 0.5);
    CHECK(outcome.pass);
    CHECK(outcome.residual_phase_rms >= 0.0);
}

TEST_CASE("speckle-enabled scenario still recovers the frequency") {
    auto s = fast_tone_scenario("speckled", 163e-6, 50.0, 1.0, RandomSeed{4, 0});
    s.noise.enabled.speckle = true;
    const auto outcome = harness::run_scenario_detailed(s);
    CHECK(std::abs(outcome.report.ldv_error_hz) < 0.15);
}

TEST_CASE("errors carry the scenario name") {
    auto s = fast_tone_scenario("broken", 1e-4, 50.0, 0.5, RandomSeed{5, 0});
    s.optical.mixing_efficiency = 2.0;
    try {
        harness::run_scenario(s);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("broken") != std::string::npos);
    }
}

TEST_CASE("parallel and serial suite execution agree byte for byte") {
    std::vector<harness::Scenario> suite;
    for (int i = 0; i < 4; ++i) {
        suite.push_back(fast_tone_scenario("s" + std::to_string(i), 1e-4, 40.0 + 10.0 * i, 0.5,
                                           derive_stream(RandomSeed{6, 0}, i)));
    }
    const auto serial = harness::run_scenarios(suite, 1);
    const auto parallel = harness::run_scenarios(suite, 4);
    REQUIRE(serial.size() == parallel.size());

    std::vector<harness::ComparisonReport> sr, pr;
    for (const auto& o : serial) sr.push_back(o.report);
    for (const auto& o : parallel) pr.push_back(o.report);
    const auto p1 = temp_path("serial.csv");
    const auto p2 = temp_path("parallel.csv");
    harness::emit_report(sr, harness::ReportFormat::csv, p1);
    harness::emit_report(pr, harness::ReportFormat::csv, p2);
    CHECK(read_file(p1) == read_file(p2));

    // repeat run is byte-identical too
    const auto again = harness::run_scenarios(suite, 4);
    std::vector<harness::ComparisonReport> ar;
    for (const auto& o : again) ar.push_back(o.report);
    const auto p3 = temp_path("again.csv");
    harness::emit_report(ar, harness::ReportFormat::csv, p3);
    CHECK(read_file(p1) == read_file(p3));
}

TEST_CASE("seed sensitivity: indicated frequency stable across seeds") {
    int within = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        auto s = fast_tone_scenario("seed_trial", 163e-6, 50.0, 1.0,
                                    RandomSeed{static_cast<std::uint64_t>(1000 + t), 0});
        const auto r = harness::run_scenario(s);
        if (std::abs(r.ldv_frequency_hz - 50.0) < 0.15) ++within;
    }
    CHECK(within >= 19);
}

TEST_CASE("report emission: exact CSV schema and JSON mirror") {
    harness::ComparisonReport r;
    r.component = "pad";
    r.truth_frequency_hz = 6.0;
    r.ldv_frequency_hz = 6.123456789012;
    r.accel_frequency_hz = 5.93;
    r.ldv_error_hz = 999.0; // stale on purpose: emission must recompute
    r.accel_error_hz = -999.0;
    r.displacement_amplitude_recovered_m = 4.97e-4;
    const std::vector<harness::ComparisonReport> reports{r};

    const auto csv_path = temp_path("report.csv");
    harness::emit_report(reports, harness::ReportFormat::csv, csv_path);
    const auto text = read_file(csv_path);
    CHECK(text.rfind("component,truth_hz,ldv_hz,accel_hz,ldv_err_hz,accel_err_hz,amplitude_m\n",
                     0) == 0);
    // error columns are recomputed from the frequency fields
    std::stringstream ss(text);
    std::string header, line;
    std::getline(ss, header);
    std::getline(ss, line);
    CHECK(line.rfind("pad,6,", 0) == 0);
    CHECK(line.find("0.123456789012") != std::string::npos); // 12 significant digits
    CHECK(line.find("999") == std::string::npos);            // stale error fields ignored

    const auto json_path = temp_path("report.json");
    harness::emit_report(reports, harness::ReportFormat::json, json_path);
    const auto jtext = read_file(json_path);
    for (const char* key : {"component", "truth_hz", "ldv_hz", "accel_hz", "ldv_err_hz",
                            "accel_err_hz", "amplitude_m"}) {
        CHECK(jtext.find(key) != std::string::npos);
    }

    // empty list -> header-only CSV
    harness::emit_report({}, harness::ReportFormat::csv, csv_path);
    CHECK(read_file(csv_path) ==
          "component,truth_hz,ldv_hz,accel_hz,ldv_err_hz,accel_err_hz,amplitude_m\n");
}

TEST_CASE("spectrum export round trip") {
    dsp::Spectrum spec;
    spec.sample_rate = 100.0;
    spec.record_length = 8;
    spec.window = dsp::Window::rectangular;
    spec.frequency_axis = {0.0, 12.5, 25.0, 37.5, 50.0};
    spec.magnitude = {0.0, 1.25e-6, 3.5, 0.125, 0.0};
    spec.phase = {0.0, -1.5707963267948966, 0.25, 3.0, 0.0};

    const auto path = temp_path("spectrum.csv");
    harness::emit_spectrum_data(spec, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "frequency_hz,magnitude,phase_rad");
    for (std::size_t k = 0; k < spec.frequency_axis.size(); ++k) {
        std::string line;
        REQUIRE(std::getline(in, line));
        double f = 0, m = 0, p = 0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &f, &m, &p) == 3);
        CHECK(f == doctest::Approx(spec.frequency_axis[k]).epsilon(1e-9));
        CHECK(m == doctest::Approx(spec.magnitude[k]).epsilon(1e-9));
        CHECK(p == doctest::Approx(spec.phase[k]).epsilon(1e-9));
    }

    CHECK_THROWS_AS(harness::emit_spectrum_data(spec, "/nonexistent_dir_xyz/s.csv"), IoError);
}

TEST_CASE("calibration emission") {
    harness::CalibrationRow row;
    row.applied_frequency_hz = 10.0;
    row.applied_displacement_m = 163e-6;
    row.indicated_frequency_hz = 10.002;
    row.tolerance_hz = 0.30;
    row.pass = true;
    const std::vector<harness::CalibrationRow> rows{row};
    const auto path = temp_path("cal.csv");
    harness::emit_calibration(rows, harness::ReportFormat::csv, path);
    const auto text = read_file(path);
    CHECK(text.rfind("applied_hz,applied_displacement_m,indicated_hz,tolerance_hz,pass\n", 0) == 0);
    CHECK(text.find("10,0.000163,10.002,0.3,true") != std::string::npos);
}

TEST_CASE("scenario config loading") {
    const auto path = temp_path("scenarios.toml");
    {
        std::ofstream out(path);
        out << R"(# test config
[scenario.bench]
duration = 0.5
analysis_band = [30.0, 70.0]
henderson_terms = 0

[scenario.bench.motion]
kind = "sinusoid"
components = [ { amplitude = 1.0e-4, frequency = 50.0 } ]

[scenario.bench.optical]
wavelength = 1.55e-6

[scenario.bench.noise]
temperature = 300.0
enabled = ["shot", "thermal"]

[scenario.bench.demod]
output_rate = 10000.0

[scenario.bench.accelerometer]
sensitivity = 0.25

[scenario.two_tone]
duration = 2.0

[scenario.two_tone.motion]
kind = "multi_tone"
components = [
  { amplitude = 2.0e-4, frequency = 10.0 },
  { amplitude = 1.0e-4, frequency = 45.0, phase = 0.5 },
]
)";
    }
    const auto scenarios = harness::load_scenarios(path, RandomSeed{42, 0});
    REQUIRE(scenarios.size() == 2);

    const auto& bench = scenarios.at("bench");
    CHECK(bench.duration == 0.5);
    CHECK(bench.band_lo == 30.0);
    CHECK(bench.band_hi == 70.0);
    CHECK(bench.henderson_terms == 0);
    CHECK(bench.motion.components.size() == 1);
    CHECK(bench.motion.components[0].amplitude_m == 1.0e-4);
    CHECK(bench.optical.wavelength == 1.55e-6);
    CHECK(bench.noise.temperature == 300.0);
    CHECK(bench.noise.enabled.shot);
    CHECK(bench.noise.enabled.thermal);
    CHECK_FALSE(bench.noise.enabled.flicker);
    CHECK(bench.output_rate == 10000.0);
    CHECK(bench.accelerometer.sensitivity == 0.25);
    CHECK(bench.seed.seed == 42);

    const auto& two = scenarios.at("two_tone");
    CHECK(two.motion.kind == motion::ProfileKind::multi_tone);
    REQUIRE(two.motion.components.size() == 2);
    CHECK(two.motion.components[1].phase_rad == 0.5);
    CHECK(two.seed.stream_id != bench.seed.stream_id);

    // a loaded scenario actually runs
    auto runnable = bench;
    const auto outcome = harness::run_scenario_detailed(runnable);
    CHECK(std::abs(outcome.report.ldv_error_hz) < 0.15);

    CHECK_THROWS_AS(harness::load_scenarios("/nonexistent/none.toml", RandomSeed{1, 0}), IoError);

    const auto bad = temp_path("bad.toml");
    {
        std::ofstream out(bad);
        out << "[scenario.x]\nduration = oops\n";
    }
    CHECK_THROWS_AS(harness::load_scenarios(bad, RandomSeed{1, 0}), InvalidConfigError);
}

TEST_CASE("built-in suites have the expected layout") {
    const auto cal = harness::calibration_scenarios(RandomSeed{7, 0});
    REQUIRE(cal.size() == 11);
    CHECK(cal[0].motion.components[0].frequency_hz == 10.0);
    CHECK(cal[0].motion.components[0].amplitude_m == 163e-6);
    CHECK(cal[0].tolerance.ldv_hz == 0.30);
    CHECK(cal[1].tolerance.ldv_hz == 0.20);
    for (std::size_t i = 2; i < cal.size(); ++i) CHECK(cal[i].tolerance.ldv_hz == 0.15);
    CHECK(cal[10].motion.components[0].frequency_hz == 130.0);
    CHECK(cal[10].motion.components[0].amplitude_m == 401e-6);

    const auto comp = harness::component_scenarios(RandomSeed{7, 0});
    REQUIRE(comp.size() == 4);
    CHECK(comp[0].name == "pad");
    CHECK(comp[0].motion.components[0].frequency_hz == 6.0);
    CHECK(comp[1].name == "air_filter");
    CHECK(comp[1].motion.components[0].frequency_hz == 32.0);
    CHECK(comp[2].motion.components[0].frequency_hz == 76.0);
    CHECK(comp[3].motion.components[0].frequency_hz == 85.0);

    CHECK(harness::air_filter_40_scenario(RandomSeed{7, 0}).motion.components[0].frequency_hz ==
          40.0);
}
