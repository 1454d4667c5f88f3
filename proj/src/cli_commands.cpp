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
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixgate/analytic.hpp"
#include "mixgate/cli.hpp"
#include "mixgate/error.hpp"
#include "mixgate/tomography.hpp"

#ifndef MIXGATE_VERSION
#define MIXGATE_VERSION "0.0.0"
#endif

namespace mixgate::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Context {
    std::string command;
    std::optional<RunConfig> config;
    std::string hash = "none";
    std::uint64_t seed = 0;
    fs::path out;
    Overrides overrides;
    bool timestamp = false;
};

Json config_json(const RunConfig &cfg) {
    Json j = Json::object();
    for (const auto &[section, keys] : cfg.sections) {
        Json s = Json::object();
        for (const auto &[key, v] : keys) {
            switch (v.kind) {
                case Kind::Boolean:
                    s[key] = v.number != 0.0;
                    break;
                case Kind::Choice:
                    s[key] = v.text;
                    break;
                case Kind::Integer:
                    s[key] = static_cast<long long>(v.number);
                    break;
                default:
                    s[key] = v.number;
            }
        }
        j[section] = s;
    }
    return j;
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
    f << text;
}

void write_csv(const Context &ctx, const std::string &name, const std::string &columns,
               const std::vector<std::vector<double>> &rows) {
    std::string s;
    s += std::string("# tool: mixgate ") + MIXGATE_VERSION + "\n";
    s += "# config_hash: " + ctx.hash + "\n";
    s += "# seed: " + std::to_string(ctx.seed) + "\n";
    s += columns + "\n";
    for (const auto &r : rows) {
        for (size_t i = 0; i < r.size(); i++) {
            s += (i ? "," : "") + format_double(r[i]);
        }
        s += "\n";
    }
    write_text(ctx.out / name, s);
}

void write_summary(const Context &ctx, const Json &results) {
    Json env;
    env["tool"] = "mixgate";
    env["version"] = MIXGATE_VERSION;
    env["command"] = ctx.command;
    env["config_hash"] = ctx.hash;
    env["seed"] = ctx.seed;
    if (ctx.timestamp) {
        std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        env["timestamp"] = buf;
    }
    env["config"] = ctx.config ? config_json(*ctx.config) : Json(nullptr);
    env["results"] = results;
    write_text(ctx.out / "summary.json", env.dump(2) + "\n");
}

void warn(const std::string &message) {
    Json w;
    w["warning"] = message;
    std::cerr << w.dump() << "\n";
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "scan needs at least one point");
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; i++) {
        out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    }
    return out;
}

Json pops_json(const std::array<double, 4> &p) {
    return Json{{"p00", p[0]}, {"p01", p[1]}, {"p10", p[2]}, {"p11", p[3]}};
}

const RunConfig &need_config(const Context &ctx) {
    if (!ctx.config) {
        throw Error(ErrorCode::Parse, "command '" + ctx.command + "' needs --config");
    }
    return *ctx.config;
}

struct CsvTable {
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string &path, const std::vector<std::string> &columns) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read input '" + path + "'");
    }
    CsvTable t;
    std::string line;
    int no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        no++;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            size_t a = cell.find_first_not_of(' ');
            size_t b = cell.find_last_not_of(' ');
            cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
        }
        if (!header) {
            if (cells != columns) {
                std::string want;
                for (const auto &c : columns) {
                    want += (want.empty() ? "" : ",") + c;
                }
                throw Error(ErrorCode::Parse, path + " line " + std::to_string(no) + ": expected columns " + want);
            }
            header = true;
            continue;
        }
        if (cells.size() != columns.size()) {
            throw Error(ErrorCode::Parse, path + " line " + std::to_string(no) + ": wrong number of fields");
        }
        std::vector<double> row;
        for (const auto &c : cells) {
            double x = 0;
            auto r = std::from_chars(c.data(), c.data() + c.size(), x);
            if (r.ec != std::errc() || r.ptr != c.data() + c.size()) {
                throw Error(ErrorCode::Parse, path + " line " + std::to_string(no) + ": bad number '" + c + "'");
            }
            row.push_back(x);
        }
        t.rows.push_back(row);
    }
    if (!header || t.rows.empty()) {
        throw Error(ErrorCode::Parse, path + ": no data rows");
    }
    return t;
}

Json fit_json(const ParityFit &fit) {
    return Json{{"offset", fit.offset},
                {"contrast", fit.contrast},
                {"phi_p_rad", fit.phase},
                {"rms_residual", fit.rms_residual}};
}

ComplexMatrix spin_density(const InitialState &s) {
    return s.spin * s.spin.adjoint();
}

void cmd_simulate(const Context &ctx) {
    const RunConfig &cfg = need_config(ctx);
    Setup s = build_setup(cfg, ctx.overrides);
    double total = s.sequence.total_duration;
    int points = std::max(2, cfg.integer("scan", "points"));
    for (double t : linspace(0, total, points)) {
        if (t > 0) {
            s.propagation.sample_times.push_back(t);
        }
    }
    SimOutcome out = simulate_gate(s.gate, s.crystal, s.sequence, s.initial, s.propagation, s.noise);

    std::vector<std::vector<double>> rows;
    auto p0 = level_populations(spin_density(s.initial));
    rows.push_back({0.0, p0[0], p0[1], p0[2], p0[3]});
    for (size_t i = 0; i < out.times.size(); i++) {
        const auto &p = out.populations[i];
        rows.push_back({out.times[i] * 1e6, p[0], p[1], p[2], p[3]});
    }
    write_csv(ctx, "populations.csv", "t_us,p00,p01,p10,p11", rows);
    write_text(ctx.out / "sequence.json", sequence_to_json(s.sequence) + "\n");

    Json r;
    r["gate_duration_s"] = total;
    r["final_populations"] = pops_json(level_populations(out.rho));
    r["initial_populations"] = pops_json(p0);
    r["final_mean_phonons"] = out.final_mean_phonons;
    ComplexMatrix u = numeric_sequence_unitary(s.gate, s.crystal, s.sequence, s.propagation);
    ComplexVector target = u * s.initial.spin;
    r["fidelity"] = fidelity_with_pure(out.rho, target);
    try {
        BranchPhases ph = sequence_branch_phases(s.gate, s.crystal, s.sequence, s.propagation);
        r["psi_rad"] = phase_decomposition(ph).psi;
        r["zeta"] = gate_efficiency(ph);
    } catch (const Error &e) {
        r["psi_rad"] = nullptr;
        r["zeta"] = nullptr;
    }
    r["bell_phase_rad"] = bell_phase(out.rho);
    auto phases = linspace(0, kPi, cfg.integer("scan", "phi_points") + 1);
    phases.pop_back();
    try {
        r["parity_fit"] = fit_json(fit_parity(parity_scan(out.rho, phases)));
    } catch (const Error &e) {
        r["parity_fit"] = nullptr;
    }
    write_summary(ctx, r);
}

void cmd_pulse_length(const Context &ctx) {
    const RunConfig &cfg = need_config(ctx);
    Setup s = build_setup(cfg, ctx.overrides);
    double t1 = cfg.number("scan", "t_stop");
    if (t1 == 0.0) {
        t1 = s.gate.gate_duration();
    }
    auto times = linspace(cfg.number("scan", "t_start"), t1, cfg.integer("scan", "points"));
    double tone = cfg.number("scan", "tone_asym");
    double species = cfg.number("scan", "species_asym");
    PopulationTraces tr = asymmetry_scan(s.gate, s.crystal, tone, species, times, s.propagation);
    double sigma = cfg.number("scan", "noise_sigma");
    if (sigma > 0) {
        tr = add_noise(tr, sigma, ctx.seed);
    }
    std::vector<std::vector<double>> rows;
    double max_split = 0;
    for (size_t i = 0; i < tr.times.size(); i++) {
        const auto &p = tr.populations[i];
        rows.push_back({tr.times[i] * 1e6, p[0], p[1], p[2], p[3]});
        max_split = std::max(max_split, std::abs(p[1] - p[2]));
    }
    write_csv(ctx, "populations.csv", "t_us,p00,p01,p10,p11", rows);
    Json r;
    r["tone_asym"] = tone;
    r["species_asym"] = species;
    r["noise_sigma"] = sigma;
    r["points"] = tr.times.size();
    r["max_abs_p01_minus_p10"] = max_split;
    r["final_populations"] = pops_json(tr.populations.back());
    write_summary(ctx, r);
}

void cmd_parity(const Context &ctx) {
    const RunConfig &cfg = need_config(ctx);
    Setup s = build_setup(cfg, ctx.overrides);
    SimOutcome out = simulate_gate(s.gate, s.crystal, s.sequence, s.initial, s.propagation, s.noise);
    int n = cfg.integer("scan", "phi_points");
    auto phases = linspace(0, kPi, n + 1);
    phases.pop_back();
    int shots = cfg.integer("scan", "shots");
    if (shots < 0) {
        throw Error(ErrorCode::InvalidArgument, "scan.shots must be >= 0");
    }
    ParityScan scan = parity_scan(out.rho, phases, shots, ctx.seed);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < scan.phases.size(); i++) {
        rows.push_back({scan.phases[i], scan.parity[i]});
    }
    write_csv(ctx, "parity_scan.csv", "phi_rad,parity", rows);
    Json r;
    r["shots"] = shots;
    r["fit"] = fit_json(fit_parity(scan));
    double chi = bell_phase(out.rho);
    r["bell_phase_rad"] = chi;
    r["two_point_fidelity"] = bell_fidelity_two_point(out.rho, matched_analysis_phase(chi));
    r["final_populations"] = pops_json(level_populations(out.rho));
    write_summary(ctx, r);
}

void cmd_qubit_offset(const Context &ctx) {
    const RunConfig &cfg = need_config(ctx);
    Setup s = build_setup(cfg, ctx.overrides);
    auto offsets = linspace(cfg.number("scan", "offset_min"), cfg.number("scan", "offset_max"),
                            cfg.integer("scan", "offset_points"));
    std::array<double, 2> w{cfg.number("scan", "offset_weight_1"), cfg.number("scan", "offset_weight_2")};
    OffsetScan scan = parity_phase_vs_offset(s.gate, s.crystal, s.sequence, offsets, w, s.propagation,
                                             cfg.integer("scan", "phi_points"), ctx.overrides.threads);
    std::vector<std::vector<double>> rows;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &p : scan.points) {
        rows.push_back({p.offset_hz, p.phase, p.contrast});
        sx += p.offset_hz;
        sy += p.phase;
        sxx += p.offset_hz * p.offset_hz;
        sxy += p.offset_hz * p.phase;
    }
    write_csv(ctx, "qubit_offset_scan.csv", "delta0_hz,phi_p_rad,contrast", rows);
    double n = static_cast<double>(scan.points.size());
    double den = n * sxx - sx * sx;
    Json r;
    r["weights"] = w;
    r["reference_phase_rad"] = scan.reference_phase;
    r["total_duration_s"] = scan.total_duration;
    if (den > 0) {
        double slope = (n * sxy - sx * sy) / den;
        r["slope_rad_per_hz"] = slope;
        r["slope_over_2pi_t_total"] = slope / (kTwoPi * scan.total_duration);
    } else {
        r["slope_rad_per_hz"] = nullptr;
        r["slope_over_2pi_t_total"] = nullptr;
    }
    r["wrapped"] = scan.wrapped;
    if (scan.wrapped) {
        warn("qubit-offset scan: |delta0| * t_total reaches pi/2; parity phases may have wrapped");
    }
    write_summary(ctx, r);
}

void cmd_budget(const Context &ctx) {
    RunConfig cfg = need_config(ctx);
    // Shifts come from the scattering model, so the gate config needs no calibration.
    cfg.sections["gate"]["calibrate"].number = 0.0;
    Setup s = build_setup(cfg, ctx.overrides);
    ScatteringModel m;
    m.power_w = cfg.number("budget", "power");
    m.beam_radius_m = cfg.number("budget", "beam_radius");
    m.loops = cfg.integer("budget", "loops");
    m.closure_coefficient = cfg.number("budget", "closure_coefficient");
    for (auto &sp : m.species) {
        sp.rabi_coefficient = cfg.number("budget", "rabi_coefficient");
        sp.scatter_coefficient = cfg.number("budget", "scatter_coefficient");
    }
    const std::string &mode_text = cfg.text("budget", "mode");
    ModeLabel mode = mode_text == "gate" ? s.gate.mode : mode_text == "ip" ? ModeLabel::InPhase : ModeLabel::OutOfPhase;
    BudgetOptions bo;
    bo.heating_nodes = cfg.integer("budget", "heating_nodes");
    bo.heating_every_point = cfg.flag("budget", "heating_every_point");
    bo.heating.fock_dim = cfg.integer("budget", "heating_fock_dim");
    bo.threads = ctx.overrides.threads;
    auto grid = detuning_grid(cfg.number("budget", "delta_min"), cfg.number("budget", "delta_max"),
                              cfg.integer("budget", "points"));
    BudgetCurve c = total_error_vs_detuning(grid, mode, s.crystal, m, bo);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < c.delta_hz.size(); i++) {
        rows.push_back({c.delta_hz[i] * 1e-12, c.eps_scatter_1[i], c.eps_scatter_2[i], c.eps_heating[i],
                        c.eps_closure[i], c.total[i]});
    }
    write_csv(ctx, "detuning_budget.csv",
              "delta_ca_thz,eps_scatter_ca,eps_scatter_sr,eps_heating,eps_closure,eps_total", rows);
    Json r;
    r["mode"] = mode == ModeLabel::InPhase ? "ip" : "oop";
    r["grid_argmin_thz"] = c.delta_hz[c.grid_argmin] * 1e-12;
    r["argmin_thz"] = c.argmin_hz * 1e-12;
    r["min_total"] = c.min_total;
    r["gate_time_at_argmin_s"] = c.gate_time[c.grid_argmin];
    write_summary(ctx, r);
}

void cmd_fit_parity(const Context &ctx, const std::string &input) {
    CsvTable t = read_csv(input, {"phi_rad", "parity"});
    ParityScan scan;
    for (const auto &row : t.rows) {
        scan.phases.push_back(row[0]);
        scan.parity.push_back(row[1]);
    }
    Json r;
    r["input"] = input;
    r["points"] = scan.phases.size();
    r["fit"] = fit_json(fit_parity(scan));
    write_summary(ctx, r);
}

void cmd_classify(const Context &ctx, const std::string &input) {
    const RunConfig &cfg = need_config(ctx);
    Setup s = build_setup(cfg, ctx.overrides);
    CsvTable t = read_csv(input, {"t_us", "p00", "p01", "p10", "p11"});
    PopulationTraces tr;
    for (const auto &row : t.rows) {
        tr.times.push_back(row[0] * 1e-6);
        tr.populations.push_back({row[1], row[2], row[3], row[4]});
    }
    AsymmetryEstimate est = classify_asymmetry(tr, s.gate, s.crystal, s.propagation);
    Json r;
    r["input"] = input;
    r["tone_asym"] = est.tone;
    r["species_asym"] = est.species;
    r["residual"] = est.residual;
    r["evaluations"] = est.evaluations;
    r["dominant"] = std::abs(est.tone) >= std::abs(est.species) ? "tone" : "species";
    write_summary(ctx, r);
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::StepSize:
        case ErrorCode::NonConvergence:
        case ErrorCode::FitFailed:
        case ErrorCode::Uncalibratable:
        case ErrorCode::UndefinedEfficiency:
        case ErrorCode::NonClosing:
            return 3;
        case ErrorCode::Parse:
        case ErrorCode::Io:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidDimension:
        case ErrorCode::ResonantDrive:
        case ErrorCode::Resonance:
        case ErrorCode::MechanismMismatch:
        case ErrorCode::SequenceOverlap:
        case ErrorCode::RampTooLong:
            return 2;
    }
    return 1;
}

int report(const std::string &code, const std::string &message, int exit_code) {
    Json e;
    e["error"] = code;
    e["message"] = message;
    e["exit_code"] = exit_code;
    std::cerr << e.dump() << "\n";
    return exit_code;
}

}  // namespace

int run(int argc, char **argv) {
    CLI::App app{"Two-species trapped-ion gate simulator", "mixgate"};
    app.set_version_flag("--version", std::string("mixgate ") + MIXGATE_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::string input;
    Overrides ov;
    bool timestamp = false;
    app.add_option("--config", config_path, "run configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "random seed (overrides [run] seed)");
    app.add_option("--fock-dim", ov.fock_dim, "Fock cutoff per mode")->check(CLI::PositiveNumber);
    app.add_option("--level", ov.level, "model level")->check(CLI::IsMember({"rwa", "full"}));
    app.add_option("--threads", ov.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--timestamp", timestamp, "add a UTC timestamp to summary.json");

    auto *simulate = app.add_subcommand("simulate", "propagate the configured sequence");
    auto *scan = app.add_subcommand("scan", "parameter scans");
    scan->require_subcommand(1);
    auto *pulse_length = scan->add_subcommand("pulse-length", "populations vs pulse length");
    auto *parity = scan->add_subcommand("parity", "parity vs analysis phase");
    auto *qubit_offset = scan->add_subcommand("qubit-offset", "parity phase vs qubit frequency offset");
    auto *budget = scan->add_subcommand("detuning-budget", "error budget vs Raman detuning");
    auto *fit = app.add_subcommand("fit", "fits of measured data");
    fit->require_subcommand(1);
    auto *fit_parity_cmd = fit->add_subcommand("parity", "fit a parity scan");
    fit_parity_cmd->add_option("--input", input, "parity CSV (phi_rad,parity)")->required()->check(CLI::ExistingFile);
    auto *classify = app.add_subcommand("classify", "classifiers");
    classify->require_subcommand(1);
    auto *asym = classify->add_subcommand("asymmetry", "tone vs species amplitude asymmetry");
    asym->add_option("--input", input, "populations CSV")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return report("usage", e.what(), 2);
    }

    try {
        Context ctx;
        ctx.timestamp = timestamp;
        if (!config_path.empty()) {
            ctx.config = parse_config(config_path);
            ctx.hash = config_hash(*ctx.config);
            const std::string &s = ctx.config->text("run", "seed");
            ctx.seed = std::stoull(s);
        }
        if (seed) {
            ctx.seed = *seed;
        }
        if (ov.threads == 0) {
            ov.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        }
        ov.seed = ctx.seed;
        ctx.overrides = ov;
        ctx.out = out_dir;
        std::error_code ec;
        fs::create_directories(ctx.out, ec);
        if (ec) {
            throw Error(ErrorCode::Io, "cannot create output directory '" + out_dir + "': " + ec.message());
        }
        if (*simulate) {
            ctx.command = "simulate";
            cmd_simulate(ctx);
        } else if (*pulse_length) {
            ctx.command = "scan pulse-length";
            cmd_pulse_length(ctx);
        } else if (*parity) {
            ctx.command = "scan parity";
            cmd_parity(ctx);
        } else if (*qubit_offset) {
            ctx.command = "scan qubit-offset";
            cmd_qubit_offset(ctx);
        } else if (*budget) {
            ctx.command = "scan detuning-budget";
            cmd_budget(ctx);
        } else if (*fit_parity_cmd) {
            ctx.command = "fit parity";
            cmd_fit_parity(ctx, input);
        } else if (*asym) {
            ctx.command = "classify asymmetry";
            cmd_classify(ctx, input);
        }
    } catch (const Error &e) {
        return report(error_code_name(e.code()), e.what(), exit_code_for(e.code()));
    } catch (const std::out_of_range &e) {
        return report("parse", std::string("seed out of range: ") + e.what(), 2);
    } catch (const std::exception &e) {
        return report("internal", e.what(), 1);
    }
    return 0;
}

}  // namespace mixgate::cli
