// Command-line front end: scenario simulation, the calibration sweep, the
// component comparison suite, and spectrum export.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ldv/errors.hpp"
#include "ldv/harness.hpp"

namespace {

using namespace ldv;

harness::ReportFormat parse_format(const std::string& f) {
    if (f == "csv") return harness::ReportFormat::csv;
    if (f == "json") return harness::ReportFormat::json;
    throw InvalidConfigError("unknown format '" + f + "' (expected csv or json)");
}

std::string extension(harness::ReportFormat f) {
    return f == harness::ReportFormat::csv ? ".csv" : ".json";
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
}

void print_report(const harness::ComparisonReport& r) {
    std::printf("%-16s truth %9.3f Hz   ldv %9.3f Hz (err %+7.3f)   accel %9.3f Hz (err %+7.3f)   amp %.6g m\n",
                r.component.c_str(), r.truth_frequency_hz, r.ldv_frequency_hz, r.ldv_error_hz,
                r.accel_frequency_hz, r.accel_error_hz, r.displacement_amplitude_recovered_m);
}

int cmd_simulate(const std::string& config, const std::string& scenario_name, std::uint64_t seed,
                 const std::string& out_dir, const std::string& format) {
    const auto fmt = parse_format(format);
    auto scenarios = harness::load_scenarios(config, RandomSeed{seed, 0});
    const auto it = scenarios.find(scenario_name);
    if (it == scenarios.end()) {
        throw InvalidConfigError("scenario '" + scenario_name + "' not found in " + config);
    }
    const auto outcome = harness::run_scenario_detailed(it->second);
    print_report(outcome.report);

    ensure_dir(out_dir);
    const std::string path = out_dir + "/" + scenario_name + "_report" + extension(fmt);
    const harness::ComparisonReport reports[] = {outcome.report};
    harness::emit_report(reports, fmt, path);
    std::printf("report written to %s\n", path.c_str());
    return outcome.pass ? 0 : 1;
}

int cmd_calibrate(std::uint64_t seed, const std::string& out_dir, const std::string& format) {
    const auto fmt = parse_format(format);
    const auto detailed = harness::run_calibration_detailed(RandomSeed{seed, 0}, 0);

    bool all_pass = true;
    std::vector<harness::CalibrationRow> rows;
    for (const auto& d : detailed) {
        rows.push_back(d.row);
        all_pass = all_pass && d.row.pass;
        std::printf("applied %7.3f Hz  %9.6g m   indicated %8.3f Hz   tol %.2f Hz   %s\n",
                    d.row.applied_frequency_hz, d.row.applied_displacement_m,
                    d.row.indicated_frequency_hz, d.row.tolerance_hz,
                    d.row.pass ? "pass" : "FAIL");
    }
    ensure_dir(out_dir);
    const std::string path = out_dir + "/calibration" + extension(fmt);
    harness::emit_calibration(rows, fmt, path);
    std::printf("calibration table written to %s\n", path.c_str());
    return all_pass ? 0 : 1;
}

int cmd_compare(std::uint64_t seed, const std::string& out_dir, const std::string& format) {
    const auto fmt = parse_format(format);
    const auto outcomes =
        harness::run_scenarios(harness::component_scenarios(RandomSeed{seed, 0}), 0);

    bool all_pass = true;
    std::vector<harness::ComparisonReport> reports;
    for (const auto& o : outcomes) {
        reports.push_back(o.report);
        all_pass = all_pass && o.pass;
        print_report(o.report);
    }
    ensure_dir(out_dir);
    const std::string path = out_dir + "/comparison" + extension(fmt);
    harness::emit_report(reports, fmt, path);
    std::printf("comparison table written to %s\n", path.c_str());
    return all_pass ? 0 : 1;
}

int cmd_spectrum(const std::string& config, const std::string& scenario_name,
                 const std::string& channel, std::uint64_t seed, const std::string& out_file) {
    auto scenarios = harness::load_scenarios(config, RandomSeed{seed, 0});
    const auto it = scenarios.find(scenario_name);
    if (it == scenarios.end()) {
        throw InvalidConfigError("scenario '" + scenario_name + "' not found in " + config);
    }
    if (channel != "ldv" && channel != "accel") {
        throw InvalidConfigError("channel must be 'ldv' or 'accel'");
    }
    const auto outcome = harness::run_scenario_detailed(it->second);
    harness::emit_spectrum_data(channel == "ldv" ? outcome.ldv_spectrum : outcome.accel_spectrum,
                                out_file);
    print_report(outcome.report);
    std::printf("%s spectrum written to %s\n", channel.c_str(), out_file.c_str());
    return outcome.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterodyne laser Doppler vibrometer simulation lab"};
    app.require_subcommand(1);

    std::string config, scenario_name, channel = "ldv";
    std::string out_dir = ".";
    std::string out_file = "spectrum.csv";
    std::string format = "csv";
    std::uint64_t seed = 1;

    auto* sim = app.add_subcommand("simulate", "Run one scenario from a config file");
    sim->add_option("--config", config, "Scenario config file (TOML)")->required();
    sim->add_option("--scenario", scenario_name, "Scenario name")->required();
    sim->add_option("--seed", seed, "Random seed");
    sim->add_option("--out", out_dir, "Output directory");
    sim->add_option("--format", format, "csv or json");

    auto* cal = app.add_subcommand("calibrate", "Run the built-in calibration sweep");
    cal->add_option("--seed", seed, "Random seed");
    cal->add_option("--out", out_dir, "Output directory");
    cal->add_option("--format", format, "csv or json");

    auto* cmp = app.add_subcommand("compare", "Run the built-in component comparison suite");
    cmp->add_option("--seed", seed, "Random seed");
    cmp->add_option("--out", out_dir, "Output directory");
    cmp->add_option("--format", format, "csv or json");

    auto* spc = app.add_subcommand("spectrum", "Export a scenario spectrum as CSV");
    spc->add_option("--config", config, "Scenario config file (TOML)")->required();
    spc->add_option("--scenario", scenario_name, "Scenario name")->required();
    spc->add_option("--channel", channel, "ldv or accel");
    spc->add_option("--seed", seed, "Random seed");
    spc->add_option("--out", out_file, "Output CSV file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config, scenario_name, seed, out_dir, format);
        if (cal->parsed()) return cmd_calibrate(seed, out_dir, format);
        if (cmp->parsed()) return cmd_compare(seed, out_dir, format);
        if (spc->parsed()) return cmd_spectrum(config, scenario_name, channel, seed, out_file);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
