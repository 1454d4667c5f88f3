// Copyright 2026 The mixgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mixgate/cli.hpp"
#include "mixgate/error.hpp"

namespace mixgate::cli {

namespace {

struct KeySpec {
    const char *section;
    const char *key;
    Kind kind;
    // nullptr: required.
    const char *fallback;
    std::vector<std::string> choices;
};

const std::vector<KeySpec> &schema() {
    static const std::vector<KeySpec> keys = {
        {"run", "seed", Kind::Integer, "0", {}},

        {"crystal", "ip_frequency", Kind::Frequency, "1.49 MHz", {}},
        {"crystal", "wavelength", Kind::Length, "402 nm", {}},
        {"crystal", "heating_ip", Kind::Rate, "93 /s", {}},
        {"crystal", "heating_oop", Kind::Rate, "27 /s", {}},
        {"crystal", "ca_qubit", Kind::Choice, "stretch", {"stretch", "clock"}},
        {"crystal", "ideal_mode_vectors", Kind::Boolean, "false", {}},
        {"crystal", "rabi", Kind::Frequency, "0 Hz", {}},
        {"crystal", "rabi_1", Kind::Frequency, "0 Hz", {}},
        {"crystal", "rabi_2", Kind::Frequency, "0 Hz", {}},
        {"crystal", "shift", Kind::Frequency, "0 Hz", {}},
        {"crystal", "shift_up_1", Kind::Frequency, "0 Hz", {}},
        {"crystal", "shift_down_1", Kind::Frequency, "0 Hz", {}},
        {"crystal", "shift_up_2", Kind::Frequency, "0 Hz", {}},
        {"crystal", "shift_down_2", Kind::Frequency, "0 Hz", {}},

        {"gate", "mechanism", Kind::Choice, nullptr, {"ls", "ms"}},
        {"gate", "mode", Kind::Choice, "oop", {"ip", "oop"}},
        {"gate", "detuning", Kind::Frequency, nullptr, {}},
        {"gate", "loops", Kind::Integer, "1", {}},
        {"gate", "phi0", Kind::Angle, "0 rad", {}},
        {"gate", "phi_z", Kind::Angle, "0 rad", {}},
        {"gate", "phi_s_1", Kind::Angle, "0 rad", {}},
        {"gate", "phi_s_2", Kind::Angle, "0 rad", {}},
        {"gate", "phi_d_1", Kind::Angle, "0 rad", {}},
        {"gate", "phi_d_2", Kind::Angle, "0 rad", {}},
        {"gate", "amplitude_1", Kind::Number, "1", {}},
        {"gate", "amplitude_2", Kind::Number, "1", {}},
        {"gate", "tone_plus", Kind::Number, "1", {}},
        {"gate", "tone_minus", Kind::Number, "1", {}},
        {"gate", "qubit_offset_1", Kind::Frequency, "0 Hz", {}},
        {"gate", "qubit_offset_2", Kind::Frequency, "0 Hz", {}},
        {"gate", "beam_shift_1", Kind::Frequency, "0 Hz", {}},
        {"gate", "beam_shift_2", Kind::Frequency, "0 Hz", {}},
        {"gate", "raman_detuning_ca", Kind::Frequency, "-9 THz", {}},
        {"gate", "calibrate", Kind::Boolean, "true", {}},
        {"gate", "balance_ions", Kind::Boolean, "false", {}},

        {"sequence", "type", Kind::Choice, "single", {"single", "ramsey", "walsh2", "wrapped_single", "wrapped_walsh2"}},
        {"sequence", "t_delay", Kind::Time, "0 s", {}},
        {"sequence", "phi_mw", Kind::Angle, "0 rad", {}},
        {"sequence", "phi_rf", Kind::Angle, "0 rad", {}},
        {"sequence", "amplitude", Kind::Number, "1", {}},

        {"noise", "heating", Kind::Boolean, "false", {}},
        {"noise", "qubit_offset_1", Kind::Frequency, "0 Hz", {}},
        {"noise", "qubit_offset_2", Kind::Frequency, "0 Hz", {}},
        {"noise", "mode_offset", Kind::Frequency, "0 Hz", {}},
        {"noise", "randomize_phi0", Kind::Boolean, "false", {}},
        {"noise", "phi0_samples", Kind::Integer, "16", {}},

        {"propagation", "step", Kind::Time, "0 s", {}},
        {"propagation", "fock_dim", Kind::Integer, "15", {}},
        {"propagation", "master_equation", Kind::Boolean, "false", {}},
        {"propagation", "ramp", Kind::Time, "0 s", {}},
        {"propagation", "level", Kind::Choice, "rwa", {"rwa", "full"}},
        {"propagation", "initial", Kind::Choice, "dd", {"dd", "du", "ud", "uu"}},
        {"propagation", "thermal_nbar", Kind::Number, "0", {}},

        {"scan", "t_start", Kind::Time, "0 s", {}},
        {"scan", "t_stop", Kind::Time, "0 s", {}},
        {"scan", "points", Kind::Integer, "41", {}},
        {"scan", "phi_points", Kind::Integer, "24", {}},
        {"scan", "shots", Kind::Integer, "0", {}},
        {"scan", "offset_min", Kind::Frequency, "-1 kHz", {}},
        {"scan", "offset_max", Kind::Frequency, "1 kHz", {}},
        {"scan", "offset_points", Kind::Integer, "11", {}},
        {"scan", "offset_weight_1", Kind::Number, "1", {}},
        {"scan", "offset_weight_2", Kind::Number, "0", {}},
        {"scan", "tone_asym", Kind::Number, "0", {}},
        {"scan", "species_asym", Kind::Number, "0", {}},
        {"scan", "noise_sigma", Kind::Number, "0", {}},

        {"budget", "delta_min", Kind::Frequency, "-19.5 THz", {}},
        {"budget", "delta_max", Kind::Frequency, "-0.5 THz", {}},
        {"budget", "points", Kind::Integer, "39", {}},
        {"budget", "mode", Kind::Choice, "gate", {"gate", "ip", "oop"}},
        {"budget", "power", Kind::Power, "70 mW", {}},
        {"budget", "beam_radius", Kind::Length, "25 um", {}},
        {"budget", "rabi_coefficient", Kind::Number, "0.2", {}},
        {"budget", "scatter_coefficient", Kind::Number, "1", {}},
        {"budget", "closure_coefficient", Kind::Number, "1e-4", {}},
        {"budget", "loops", Kind::Integer, "2", {}},
        {"budget", "heating_nodes", Kind::Integer, "12", {}},
        {"budget", "heating_every_point", Kind::Boolean, "false", {}},
        {"budget", "heating_fock_dim", Kind::Integer, "8", {}},
    };
    return keys;
}

const std::vector<std::string> kRequiredSections = {"crystal", "gate"};

struct Unit {
    const char *name;
    Kind kind;
    double scale;
};

const Unit kUnits[] = {
    {"Hz", Kind::Frequency, 1.0},   {"kHz", Kind::Frequency, 1e3}, {"MHz", Kind::Frequency, 1e6},
    {"GHz", Kind::Frequency, 1e9},  {"THz", Kind::Frequency, 1e12}, {"s", Kind::Time, 1.0},
    {"ms", Kind::Time, 1e-3},       {"us", Kind::Time, 1e-6},      {"ns", Kind::Time, 1e-9},
    {"W", Kind::Power, 1.0},        {"mW", Kind::Power, 1e-3},     {"G", Kind::Field, 1.0},
    {"mG", Kind::Field, 1e-3},      {"rad", Kind::Angle, 1.0},     {"pi", Kind::Angle, kPi},
    {"m", Kind::Length, 1.0},       {"um", Kind::Length, 1e-6},    {"nm", Kind::Length, 1e-9},
    {"/s", Kind::Rate, 1.0},
};

const char *kind_name(Kind k) {
    switch (k) {
        case Kind::Frequency:
            return "frequency (Hz, kHz, MHz, GHz, THz)";
        case Kind::Time:
            return "time (s, ms, us, ns)";
        case Kind::Power:
            return "power (W, mW)";
        case Kind::Field:
            return "magnetic field (G, mG)";
        case Kind::Angle:
            return "angle (rad, pi)";
        case Kind::Length:
            return "length (m, um, nm)";
        case Kind::Rate:
            return "rate (/s)";
        case Kind::Number:
            return "dimensionless number";
        case Kind::Integer:
            return "integer";
        case Kind::Boolean:
            return "true or false";
        case Kind::Choice:
            return "choice";
    }
    return "value";
}

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return "";
    }
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string &source, int line, const std::string &key, const std::string &msg) {
    std::ostringstream out;
    out << "config " << source;
    if (line > 0) {
        out << " line " << line;
    }
    if (!key.empty()) {
        out << ": key '" << key << "'";
    }
    out << ": " << msg;
    throw Error(ErrorCode::Parse, out.str());
}

const KeySpec *find_spec(const std::string &section, const std::string &key) {
    for (const auto &s : schema()) {
        if (section == s.section && key == s.key) {
            return &s;
        }
    }
    return nullptr;
}

bool known_section(const std::string &section) {
    for (const auto &s : schema()) {
        if (section == s.section) {
            return true;
        }
    }
    return false;
}

Value parse_value(const KeySpec &spec, const std::string &raw, const std::string &source, int line) {
    Value v;
    v.kind = spec.kind;
    v.line = line;
    v.text = raw;
    const std::string full_key = std::string(spec.section) + "." + spec.key;
    if (spec.kind == Kind::Boolean) {
        if (raw == "true") {
            v.number = 1;
        } else if (raw == "false") {
            v.number = 0;
        } else {
            fail(source, line, full_key, "expected true or false, got '" + raw + "'");
        }
        return v;
    }
    if (spec.kind == Kind::Choice) {
        for (const auto &c : spec.choices) {
            if (raw == c) {
                return v;
            }
        }
        std::string all;
        for (const auto &c : spec.choices) {
            all += (all.empty() ? "" : ", ") + c;
        }
        fail(source, line, full_key, "expected one of {" + all + "}, got '" + raw + "'");
    }
    const char *begin = raw.data();
    const char *end = raw.data() + raw.size();
    double x = 0;
    auto res = std::from_chars(begin, end, x);
    if (res.ec != std::errc() || !std::isfinite(x)) {
        fail(source, line, full_key, "expected a number, got '" + raw + "'");
    }
    std::string unit = trim(std::string(res.ptr, end));
    if (spec.kind == Kind::Integer) {
        if (!unit.empty() || x != std::floor(x)) {
            fail(source, line, full_key, "expected an integer, got '" + raw + "'");
        }
        v.number = x;
        v.text = trim(std::string(begin, res.ptr));
        return v;
    }
    if (spec.kind == Kind::Number) {
        if (!unit.empty()) {
            fail(source, line, full_key, "dimensionless value must not carry a unit ('" + unit + "')");
        }
        v.number = x;
        return v;
    }
    if (unit.empty()) {
        fail(source, line, full_key, std::string("missing unit; expected ") + kind_name(spec.kind));
    }
    for (const auto &u : kUnits) {
        if (unit == u.name) {
            if (u.kind != spec.kind) {
                fail(source, line, full_key,
                     "unit '" + unit + "' has the wrong dimension; expected " + kind_name(spec.kind));
            }
            v.number = x * u.scale;
            return v;
        }
    }
    fail(source, line, full_key, "unknown unit '" + unit + "'");
}

}  // namespace

const Value &RunConfig::get(const std::string &section, const std::string &key) const {
    auto s = sections.find(section);
    if (s != sections.end()) {
        auto k = s->second.find(key);
        if (k != s->second.end()) {
            return k->second;
        }
    }
    throw Error(ErrorCode::Parse, "config has no key " + section + "." + key);
}

double RunConfig::number(const std::string &section, const std::string &key) const {
    return get(section, key).number;
}

int RunConfig::integer(const std::string &section, const std::string &key) const {
    double x = get(section, key).number;
    if (std::abs(x) > 2e9) {
        throw Error(ErrorCode::Parse, "config key " + section + "." + key + " is out of range");
    }
    return static_cast<int>(x);
}

bool RunConfig::flag(const std::string &section, const std::string &key) const {
    return get(section, key).number != 0.0;
}

const std::string &RunConfig::text(const std::string &section, const std::string &key) const {
    return get(section, key).text;
}

bool RunConfig::explicitly_set(const std::string &section, const std::string &key) const {
    return get(section, key).line > 0;
}

RunConfig parse_config_text(const std::string &text, const std::string &source) {
    RunConfig cfg;
    cfg.source = source;
    std::istringstream in(text);
    std::string raw_line;
    std::string section;
    std::map<std::string, bool> seen_sections;
    int line_no = 0;
    while (std::getline(in, raw_line)) {
        line_no++;
        std::string line = raw_line;
        size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(source, line_no, "", "malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section)) {
                fail(source, line_no, "", "unknown section [" + section + "]");
            }
            if (seen_sections[section]) {
                fail(source, line_no, "", "duplicate section [" + section + "]");
            }
            seen_sections[section] = true;
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail(source, line_no, "", "expected 'key = value', got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            fail(source, line_no, key, "key outside of any section");
        }
        const KeySpec *spec = find_spec(section, key);
        if (spec == nullptr) {
            fail(source, line_no, section + "." + key, "unknown key");
        }
        if (cfg.sections[section].count(key)) {
            fail(source, line_no, section + "." + key, "duplicate key");
        }
        if (value.empty()) {
            fail(source, line_no, section + "." + key, "empty value");
        }
        cfg.sections[section][key] = parse_value(*spec, value, source, line_no);
    }
    for (const auto &req : kRequiredSections) {
        if (!seen_sections[req]) {
            fail(source, 0, "", "missing required section [" + req + "]");
        }
    }
    for (const auto &spec : schema()) {
        auto &sec = cfg.sections[spec.section];
        if (sec.count(spec.key)) {
            continue;
        }
        if (spec.fallback == nullptr) {
            fail(source, 0, std::string(spec.section) + "." + spec.key, "missing required key");
        }
        sec[spec.key] = parse_value(spec, spec.fallback, source, 0);
        sec[spec.key].line = 0;
    }
    return cfg;
}

RunConfig parse_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string canonical_form(const RunConfig &config) {
    std::string out;
    for (const auto &[section, keys] : config.sections) {
        for (const auto &[key, v] : keys) {
            out += section + "." + key + "=";
            bool numeric = v.kind != Kind::Boolean && v.kind != Kind::Choice && v.kind != Kind::Integer;
            out += numeric ? format_double(v.number) : v.text;
            out += "\n";
        }
    }
    return out;
}

std::string config_hash(const RunConfig &config) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_form(config)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Setup build_setup(const RunConfig &cfg, const Overrides &ov) {
    Setup s;
    CrystalOptions co;
    co.ip_frequency_hz = cfg.number("crystal", "ip_frequency");
    double lambda = cfg.number("crystal", "wavelength");
    if (!(lambda > 0) || !(co.ip_frequency_hz > 0)) {
        throw Error(ErrorCode::InvalidArgument, "crystal wavelength and ip_frequency must be positive");
    }
    co.delta_k = default_delta_k(lambda);
    co.heating_ip = cfg.number("crystal", "heating_ip");
    co.heating_oop = cfg.number("crystal", "heating_oop");
    co.ca_clock_qubit = cfg.text("crystal", "ca_qubit") == "clock";
    co.ideal_mode_vectors = cfg.flag("crystal", "ideal_mode_vectors");
    s.crystal = ca_sr_crystal(co);
    set_uniform_drive(s.crystal, kTwoPi * cfg.number("crystal", "rabi"), kTwoPi * cfg.number("crystal", "shift"));
    for (int j = 0; j < 2; j++) {
        std::string n = std::to_string(j + 1);
        IonSpec &ion = s.crystal.ions[j];
        if (cfg.explicitly_set("crystal", "rabi_" + n)) {
            ion.rabi = kTwoPi * cfg.number("crystal", "rabi_" + n);
        }
        if (cfg.explicitly_set("crystal", "shift_up_" + n)) {
            ion.shift_up = kTwoPi * cfg.number("crystal", "shift_up_" + n);
        }
        if (cfg.explicitly_set("crystal", "shift_down_" + n)) {
            ion.shift_down = kTwoPi * cfg.number("crystal", "shift_down_" + n);
        }
    }

    GateConfig &g = s.gate;
    g.mechanism = cfg.text("gate", "mechanism") == "ms" ? Mechanism::MolmerSorensen : Mechanism::LightShift;
    g.mode = cfg.text("gate", "mode") == "ip" ? ModeLabel::InPhase : ModeLabel::OutOfPhase;
    g.detuning = kTwoPi * cfg.number("gate", "detuning");
    g.loops = cfg.integer("gate", "loops");
    if (g.mechanism == Mechanism::LightShift) {
        g.phi0 = cfg.number("gate", "phi0");
        g.phi_z = cfg.number("gate", "phi_z");
    } else {
        for (const char *k : {"phi0", "phi_z"}) {
            if (cfg.explicitly_set("gate", k)) {
                throw Error(ErrorCode::MechanismMismatch, std::string("gate.") + k + " applies to LS gates only");
            }
        }
    }
    if (g.mechanism == Mechanism::MolmerSorensen) {
        g.phi_s = {cfg.number("gate", "phi_s_1"), cfg.number("gate", "phi_s_2")};
        g.phi_d = {cfg.number("gate", "phi_d_1"), cfg.number("gate", "phi_d_2")};
        g.tone_scale = {cfg.number("gate", "tone_plus"), cfg.number("gate", "tone_minus")};
    } else {
        for (const char *k : {"phi_s_1", "phi_s_2", "phi_d_1", "phi_d_2", "tone_plus", "tone_minus"}) {
            if (cfg.explicitly_set("gate", k)) {
                throw Error(ErrorCode::MechanismMismatch, std::string("gate.") + k + " applies to MS gates only");
            }
        }
    }
    g.amplitude_scale = {cfg.number("gate", "amplitude_1"), cfg.number("gate", "amplitude_2")};
    g.qubit_offset_hz = {cfg.number("gate", "qubit_offset_1"), cfg.number("gate", "qubit_offset_2")};
    g.beam_shift_hz = {cfg.number("gate", "beam_shift_1"), cfg.number("gate", "beam_shift_2")};
    g.raman_detuning_ca_hz = cfg.number("gate", "raman_detuning_ca");
    g.raman_detuning_sr_hz = g.raman_detuning_ca_hz + kSpeciesOffsetHz;
    g.validate();
    s.calibrate = cfg.flag("gate", "calibrate");

    PropagationOptions &p = s.propagation;
    p.step = cfg.number("propagation", "step");
    p.fock_dim = ov.fock_dim > 0 ? ov.fock_dim : cfg.integer("propagation", "fock_dim");
    p.master_equation = cfg.flag("propagation", "master_equation");
    p.ramp = cfg.number("propagation", "ramp");
    std::string level = ov.level.empty() ? cfg.text("propagation", "level") : ov.level;
    if (level != "rwa" && level != "full") {
        throw Error(ErrorCode::InvalidArgument, "level must be rwa or full");
    }
    p.level = level == "full" ? Level::Full : Level::Rwa;
    if (p.step < 0 || p.ramp < 0) {
        throw Error(ErrorCode::InvalidArgument, "propagation step and ramp must be non-negative");
    }
    FockSpace check(p.fock_dim);
    (void)check;

    NoiseModel &n = s.noise;
    if (cfg.flag("noise", "heating")) {
        n = heating_from(s.crystal);
    }
    n.qubit_offset_hz = {cfg.number("noise", "qubit_offset_1"), cfg.number("noise", "qubit_offset_2")};
    n.mode_offset_hz = cfg.number("noise", "mode_offset");
    n.randomize_phi0 = cfg.flag("noise", "randomize_phi0");
    n.phi0_samples = cfg.integer("noise", "phi0_samples");
    n.seed = ov.seed;
    if (n.phi0_samples < 1) {
        throw Error(ErrorCode::InvalidArgument, "noise.phi0_samples must be >= 1");
    }

    const std::string &init = cfg.text("propagation", "initial");
    s.initial = spin_product_state(init[0] == 'u' ? 0 : 1, init[1] == 'u' ? 0 : 1);
    s.initial.thermal_nbar = cfg.number("propagation", "thermal_nbar");
    if (s.initial.thermal_nbar < 0) {
        throw Error(ErrorCode::InvalidArgument, "propagation.thermal_nbar must be >= 0");
    }

    if (cfg.flag("gate", "balance_ions")) {
        g = balanced_ms_config(g, s.crystal);
    }

    const std::string &type = cfg.text("sequence", "type");
    GateConfig one_loop = g;
    one_loop.loops = 1;
    double t_delay = cfg.number("sequence", "t_delay");
    if (type == "walsh2" || type == "wrapped_walsh2") {
        if (t_delay == 0.0) {
            t_delay = default_t_delay(one_loop);
        }
        s.sequence = g.mechanism == Mechanism::LightShift ? build_ls_walsh2(one_loop, t_delay)
                                                          : build_ms_walsh2(one_loop, t_delay);
    } else if (type == "ramsey") {
        s.sequence = ls_ramsey(g);
    } else {
        s.sequence = single_pulse(g);
    }
    if (type.rfind("wrapped", 0) == 0) {
        s.sequence = wrap_phase_insensitive(s.sequence, cfg.number("sequence", "phi_mw"),
                                            cfg.number("sequence", "phi_rf"));
    } else {
        s.sequence.mw_phase = {cfg.number("sequence", "phi_mw"), cfg.number("sequence", "phi_rf")};
    }
    if (s.calibrate) {
        g = calibrate_sequence(g, s.crystal, s.sequence, p);
    }
    double amp = cfg.number("sequence", "amplitude");
    if (amp < 0) {
        throw Error(ErrorCode::InvalidArgument, "sequence.amplitude must be >= 0");
    }
    for (auto &el : s.sequence.elements) {
        if (el.kind == ElementKind::GatePulse) {
            el.amplitude *= amp;
        }
    }
    return s;
}

}  // namespace mixgate::cli
