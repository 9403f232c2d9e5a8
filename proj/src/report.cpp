#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "ldv/errors.hpp"
#include "ldv/harness.hpp"

namespace ldv::harness {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

} // namespace

void emit_report(std::span<const ComparisonReport> reports, ReportFormat format,
                 const std::string& path) {
    auto out = open_out(path);
    if (format == ReportFormat::csv) {
        out << "component,truth_hz,ldv_hz,accel_hz,ldv_err_hz,accel_err_hz,amplitude_m\n";
        for (const auto& r : reports) {
            out << r.component << ',' << fmt(r.truth_frequency_hz) << ','
                << fmt(r.ldv_frequency_hz) << ',' << fmt(r.accel_frequency_hz) << ','
                << fmt(r.ldv_frequency_hz - r.truth_frequency_hz) << ','
                << fmt(r.accel_frequency_hz - r.truth_frequency_hz) << ','
                << fmt(r.displacement_amplitude_recovered_m) << '\n';
        }
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) {
            arr.push_back({{"component", r.component},
                           {"truth_hz", r.truth_frequency_hz},
                           {"ldv_hz", r.ldv_frequency_hz},
                           {"accel_hz", r.accel_frequency_hz},
                           {"ldv_err_hz", r.ldv_frequency_hz - r.truth_frequency_hz},
                           {"accel_err_hz", r.accel_frequency_hz - r.truth_frequency_hz},
                           {"amplitude_m", r.displacement_amplitude_recovered_m}});
        }
        out << arr.dump(2) << '\n';
    }
    finish_out(out, path);
}

void emit_calibration(std::span<const CalibrationRow> rows, ReportFormat format,
                      const std::string& path) {
    auto out = open_out(path);
    if (format == ReportFormat::csv) {
        out << "applied_hz,applied_displacement_m,indicated_hz,tolerance_hz,pass\n";
        for (const auto& r : rows) {
            out << fmt(r.applied_frequency_hz) << ',' << fmt(r.applied_displacement_m) << ','
                << fmt(r.indicated_frequency_hz) << ',' << fmt(r.tolerance_hz) << ','
                << (r.pass ? "true" : "false") << '\n';
        }
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            arr.push_back({{"applied_hz", r.applied_frequency_hz},
                           {"applied_displacement_m", r.applied_displacement_m},
                           {"indicated_hz", r.indicated_frequency_hz},
                           {"tolerance_hz", r.tolerance_hz},
                           {"pass", r.pass}});
        }
        out << arr.dump(2) << '\n';
    }
    finish_out(out, path);
}

void emit_spectrum_data(const dsp::Spectrum& spec, const std::string& path) {
    auto out = open_out(path);
    out << "frequency_hz,magnitude,phase_rad\n";
    for (std::size_t k = 0; k < spec.frequency_axis.size(); ++k) {
        out << fmt(spec.frequency_axis[k]) << ',' << fmt(spec.magnitude[k]) << ','
            << fmt(spec.phase[k]) << '\n';
    }
    finish_out(out, path);
}

} // namespace ldv::harness
