// Scenario config loading: a small TOML-subset reader covering what scenario
// files need (dotted table headers, numbers, booleans, strings, arrays and
// inline tables), plus the mapping onto Scenario structs.

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ldv/errors.hpp"
#include "ldv/harness.hpp"
#include "ldv/rng.hpp"

namespace ldv::harness {

namespace {

struct TomlValue {
    enum class Type { number, boolean, string, array, table };
    Type type = Type::number;
    double num = 0.0;
    bool boolean = false;
    std::string str;
    std::vector<TomlValue> array;
    std::map<std::string, TomlValue> table;
};

class Parser {
public:
    explicit Parser(std::string text) : text_(std::move(text)) {}

    TomlValue parse_document() {
        TomlValue root;
        root.type = TomlValue::Type::table;
        TomlValue* current = &root;
        while (!eof()) {
            skip_ws_and_comments();
            if (eof()) break;
            if (peek() == '[') {
                current = enter_table(root);
            } else {
                parse_key_value(*current);
            }
        }
        return root;
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char take() { return text_[pos_++]; }

    void fail(const std::string& what) const {
        std::size_t line = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') ++line;
        }
        throw InvalidConfigError("config parse error at line " + std::to_string(line) + ": " + what);
    }

    void skip_ws_and_comments() {
        while (!eof()) {
            const char c = peek();
            if (c == '#') {
                while (!eof() && take() != '\n') {
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string parse_key() {
        skip_ws_and_comments();
        std::string key;
        while (!eof()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                key.push_back(take());
            } else {
                break;
            }
        }
        if (key.empty()) fail("expected a key");
        return key;
    }

    TomlValue* enter_table(TomlValue& root) {
        ++pos_; // '['
        TomlValue* node = &root;
        while (true) {
            const std::string part = parse_key();
            auto& child = node->table[part];
            child.type = TomlValue::Type::table;
            node = &child;
            skip_ws_and_comments();
            if (eof()) fail("unterminated table header");
            const char c = take();
            if (c == ']') break;
            if (c != '.') fail("expected '.' or ']' in table header");
        }
        return node;
    }

    void parse_key_value(TomlValue& table) {
        const std::string key = parse_key();
        skip_ws_and_comments();
        if (eof() || take() != '=') fail("expected '=' after key '" + key + "'");
        skip_ws_and_comments();
        table.table[key] = parse_value();
    }

    TomlValue parse_value() {
        skip_ws_and_comments();
        if (eof()) fail("expected a value");
        const char c = peek();
        if (c == '"') return parse_string();
        if (c == '[') return parse_array();
        if (c == '{') return parse_inline_table();
        return parse_scalar();
    }

    TomlValue parse_string() {
        ++pos_; // opening quote
        TomlValue v;
        v.type = TomlValue::Type::string;
        while (!eof()) {
            const char c = take();
            if (c == '"') return v;
            if (c == '\\') {
                if (eof()) break;
                const char e = take();
                v.str.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
            } else {
                v.str.push_back(c);
            }
        }
        fail("unterminated string");
        return v;
    }

    TomlValue parse_array() {
        ++pos_; // '['
        TomlValue v;
        v.type = TomlValue::Type::array;
        while (true) {
            skip_ws_and_comments();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                ++pos_;
                break;
            }
            v.array.push_back(parse_value());
            skip_ws_and_comments();
            if (!eof() && peek() == ',') ++pos_;
        }
        return v;
    }

    TomlValue parse_inline_table() {
        ++pos_; // '{'
        TomlValue v;
        v.type = TomlValue::Type::table;
        while (true) {
            skip_ws_and_comments();
            if (eof()) fail("unterminated inline table");
            if (peek() == '}') {
                ++pos_;
                break;
            }
            parse_key_value(v);
            skip_ws_and_comments();
            if (!eof() && peek() == ',') ++pos_;
        }
        return v;
    }

    TomlValue parse_scalar() {
        std::string token;
        while (!eof()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ']' || c == '}' ||
                c == '#') {
                break;
            }
            token.push_back(take());
        }
        TomlValue v;
        if (token == "true" || token == "false") {
            v.type = TomlValue::Type::boolean;
            v.boolean = (token == "true");
            return v;
        }
        try {
            std::size_t used = 0;
            v.num = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            fail("cannot parse value '" + token + "'");
        }
        v.type = TomlValue::Type::number;
        return v;
    }

    std::string text_;
    std::size_t pos_ = 0;
};

const TomlValue* find(const TomlValue& table, const std::string& key) {
    const auto it = table.table.find(key);
    return it == table.table.end() ? nullptr : &it->second;
}

double get_num(const TomlValue& table, const std::string& key, double fallback) {
    const TomlValue* v = find(table, key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::number) {
        throw InvalidConfigError("config: '" + key + "' must be a number");
    }
    return v->num;
}

std::string get_str(const TomlValue& table, const std::string& key, const std::string& fallback) {
    const TomlValue* v = find(table, key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::string) {
        throw InvalidConfigError("config: '" + key + "' must be a string");
    }
    return v->str;
}

void load_motion(const TomlValue& node, motion::MotionProfile& profile) {
    const std::string kind = get_str(node, "kind", "sinusoid");
    if (kind == "sinusoid") {
        profile.kind = motion::ProfileKind::sinusoid;
    } else if (kind == "multi_tone") {
        profile.kind = motion::ProfileKind::multi_tone;
    } else if (kind == "chirp") {
        profile.kind = motion::ProfileKind::chirp;
    } else {
        throw InvalidConfigError("config: unknown motion kind '" + kind + "'");
    }
    profile.chirp_f_start_hz = get_num(node, "f_start", 0.0);
    profile.chirp_f_end_hz = get_num(node, "f_end", 0.0);

    const TomlValue* comps = find(node, "components");
    if (!comps || comps->type != TomlValue::Type::array) {
        throw InvalidConfigError("config: motion.components must be an array of tables");
    }
    profile.components.clear();
    for (const auto& c : comps->array) {
        if (c.type != TomlValue::Type::table) {
            throw InvalidConfigError("config: each motion component must be an inline table");
        }
        motion::ToneComponent tc;
        tc.amplitude_m = get_num(c, "amplitude", 0.0);
        tc.frequency_hz = get_num(c, "frequency", 0.0);
        tc.phase_rad = get_num(c, "phase", 0.0);
        profile.components.push_back(tc);
    }
}

void load_noise(const TomlValue& node, noise::NoiseConfig& cfg) {
    cfg.temperature = get_num(node, "temperature", cfg.temperature);
    cfg.amp_input_resistance = get_num(node, "amp_input_resistance", cfg.amp_input_resistance);
    cfg.detector_resistance = get_num(node, "detector_resistance", cfg.detector_resistance);
    cfg.flicker_k = get_num(node, "flicker_k", cfg.flicker_k);
    cfg.flicker_alpha = get_num(node, "flicker_alpha", cfg.flicker_alpha);
    cfg.flicker_beta = get_num(node, "flicker_beta", cfg.flicker_beta);
    cfg.speckle_mean = get_num(node, "speckle_mean", cfg.speckle_mean);
    cfg.speckle_correlation_time =
        get_num(node, "speckle_correlation_time", cfg.speckle_correlation_time);
    if (const TomlValue* enabled = find(node, "enabled")) {
        if (enabled->type != TomlValue::Type::array) {
            throw InvalidConfigError("config: noise.enabled must be an array of strings");
        }
        cfg.enabled = {false, false, false, false};
        for (const auto& e : enabled->array) {
            if (e.type != TomlValue::Type::string) {
                throw InvalidConfigError("config: noise.enabled entries must be strings");
            }
            if (e.str == "shot") cfg.enabled.shot = true;
            else if (e.str == "thermal") cfg.enabled.thermal = true;
            else if (e.str == "flicker") cfg.enabled.flicker = true;
            else if (e.str == "speckle") cfg.enabled.speckle = true;
            else throw InvalidConfigError("config: unknown noise source '" + e.str + "'");
        }
    }
}

Scenario build_scenario(const std::string& name, const TomlValue& node, RandomSeed base_seed) {
    Scenario s;
    s.name = name;
    s.seed = derive_stream(base_seed, mix64(std::hash<std::string>{}(name)));

    s.duration = get_num(node, "duration", s.duration);
    s.henderson_terms = static_cast<int>(get_num(node, "henderson_terms", s.henderson_terms));
    if (const TomlValue* band = find(node, "analysis_band")) {
        if (band->type != TomlValue::Type::array || band->array.size() != 2 ||
            band->array[0].type != TomlValue::Type::number ||
            band->array[1].type != TomlValue::Type::number) {
            throw InvalidConfigError("config: analysis_band must be [lo_hz, hi_hz]");
        }
        s.band_lo = band->array[0].num;
        s.band_hi = band->array[1].num;
    }
    s.tolerance.ldv_hz = get_num(node, "tolerance_ldv_hz", s.tolerance.ldv_hz);
    s.tolerance.accel_hz = get_num(node, "tolerance_accel_hz", s.tolerance.accel_hz);
    s.tolerance.cross_hz = get_num(node, "tolerance_cross_hz", s.tolerance.cross_hz);

    const TomlValue* m = find(node, "motion");
    if (!m) throw InvalidConfigError("config: scenario '" + name + "' needs a motion table");
    load_motion(*m, s.motion);

    if (const TomlValue* o = find(node, "optical")) {
        s.optical.wavelength = get_num(*o, "wavelength", s.optical.wavelength);
        s.optical.bragg_shift = get_num(*o, "bragg_shift", s.optical.bragg_shift);
        s.optical.mixing_efficiency = get_num(*o, "mixing_efficiency", s.optical.mixing_efficiency);
        s.optical.reflectivity = get_num(*o, "reflectivity", s.optical.reflectivity);
        s.optical.intensity_measurement =
            get_num(*o, "intensity_measurement", s.optical.intensity_measurement);
        s.optical.intensity_reference =
            get_num(*o, "intensity_reference", s.optical.intensity_reference);
        s.optical.loss_reference = get_num(*o, "loss_reference", s.optical.loss_reference);
        s.optical.loss_measurement = get_num(*o, "loss_measurement", s.optical.loss_measurement);
    }
    if (const TomlValue* d = find(node, "detector")) {
        s.detector.responsivity = get_num(*d, "responsivity", s.detector.responsivity);
        s.detector.bandwidth = get_num(*d, "bandwidth", s.detector.bandwidth);
        s.detector.sample_rate = get_num(*d, "sample_rate", s.detector.sample_rate);
    }
    if (const TomlValue* n = find(node, "noise")) load_noise(*n, s.noise);
    if (const TomlValue* dm = find(node, "demod")) {
        s.lowpass_cutoff = get_num(*dm, "lowpass_cutoff", s.lowpass_cutoff);
        s.output_rate = get_num(*dm, "output_rate", s.output_rate);
    }
    if (const TomlValue* a = find(node, "accelerometer")) {
        s.accelerometer.sensitivity = get_num(*a, "sensitivity", s.accelerometer.sensitivity);
        s.accelerometer.noise_floor_density =
            get_num(*a, "noise_floor_density", s.accelerometer.noise_floor_density);
        s.accelerometer.bandwidth = get_num(*a, "bandwidth", s.accelerometer.bandwidth);
        s.accelerometer.sample_rate = get_num(*a, "sample_rate", s.accelerometer.sample_rate);
    }
    return s;
}

} // namespace

std::map<std::string, Scenario> load_scenarios(const std::string& path, RandomSeed base_seed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    Parser parser(buffer.str());
    const TomlValue root = parser.parse_document();
    const TomlValue* scenarios = find(root, "scenario");
    if (!scenarios || scenarios->type != TomlValue::Type::table || scenarios->table.empty()) {
        throw InvalidConfigError("config: no [scenario.<name>] tables in " + path);
    }

    std::map<std::string, Scenario> out;
    for (const auto& [name, node] : scenarios->table) {
        if (node.type != TomlValue::Type::table) {
            throw InvalidConfigError("config: scenario '" + name + "' must be a table");
        }
        out.emplace(name, build_scenario(name, node, base_seed));
    }
    return out;
}

} // namespace ldv::harness
