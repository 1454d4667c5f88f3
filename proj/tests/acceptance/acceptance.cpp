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

// Acceptance gate: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mixgate/analytic.hpp"
#include "mixgate/budget.hpp"
#include "mixgate/dynamics.hpp"
#include "mixgate/error.hpp"
#include "mixgate/sequence.hpp"
#include "mixgate/tomography.hpp"

using namespace mixgate;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Crystal drive_crystal() {
    Crystal cr = ca_sr_crystal();
    set_uniform_drive(cr, kTwoPi * 100e3, kTwoPi * 100e3);
    return cr;
}

GateConfig ls_gate() {
    GateConfig g;
    g.mechanism = Mechanism::LightShift;
    g.mode = ModeLabel::OutOfPhase;
    g.detuning = kTwoPi * 40e3;
    g.phi_z = kPi;
    return g;
}

GateConfig ms_gate() {
    GateConfig g;
    g.mechanism = Mechanism::MolmerSorensen;
    g.mode = ModeLabel::OutOfPhase;
    g.detuning = kTwoPi * 40e3;
    return g;
}

PropagationOptions rwa(int fock = 15) {
    PropagationOptions o;
    o.fock_dim = fock;
    return o;
}

PulseSequence walsh2(const GateConfig &g) {
    return g.mechanism == Mechanism::LightShift ? build_ls_walsh2(g, default_t_delay(g))
                                                : build_ms_walsh2(g, default_t_delay(g));
}

InitialState down_down() {
    return spin_product_state(1, 1);
}

// Fidelity of the simulated state against the sequence unitary applied to the input.
double sequence_fidelity(const GateConfig &g, const Crystal &cr, const PulseSequence &seq,
                         const PropagationOptions &o, const ComplexMatrix &u, const NoiseModel &noise = {}) {
    InitialState in = down_down();
    SimOutcome out = simulate_gate(g, cr, seq, in, o, noise);
    ComplexVector target = u * in.spin;
    return fidelity_with_pure(out.rho, target);
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double wrap_pi(double x) {
    return std::remainder(x, kTwoPi);
}

Verdict criterion1() {
    Crystal cr = drive_crystal();
    Verdict v{true, ""};
    for (GateConfig g : {ls_gate(), ms_gate()}) {
        PulseSequence seq = walsh2(g);
        auto t0 = std::chrono::steady_clock::now();
        GateConfig cal = calibrate_sequence(g, cr, seq, rwa());
        double f = sequence_fidelity(cal, cr, seq, rwa(), ideal_sequence_unitary(cal, cr, seq));
        double dt = seconds_since(t0);
        v.pass = v.pass && f >= 0.99999 && dt < 5.0;
        v.detail += std::string(mechanism_name(g.mechanism)) + " F=" + fmt("%.9f", f) + " t=" + fmt("%.2fs ", dt);
    }
    return v;
}

Verdict criterion2() {
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst_closure = 0, worst_area = 0;
    for (int i = 0; i < 100; i++) {
        Complex f(kTwoPi * 20e3 * u(rng), kTwoPi * 20e3 * u(rng));
        double mag = kTwoPi * (5e3 + 95e3 * std::abs(u(rng)));
        double delta = u(rng) < 0 ? -mag : mag;
        double t_loop = kTwoPi / std::abs(delta);
        worst_closure = std::max(worst_closure, std::abs(displacement_at(f, delta, t_loop)));
        // Quadrature of Im(alpha* dalpha/dt) with alpha from its closed form, composite Simpson.
        const int n = 4000;
        double h = t_loop / n, sum = 0;
        for (int k = 0; k <= n; k++) {
            double t = k * h;
            Complex a = displacement_at(f, delta, t);
            Complex da = std::conj(f) * Complex(0, -1) * std::polar(1.0, -delta * t) / 2.0;
            double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
            sum += w * std::imag(std::conj(a) * da);
        }
        double quad = std::abs(sum * h / 3);
        double law = kPi * std::norm(f) / (2 * delta * delta);
        worst_area = std::max(worst_area, std::max(std::abs(quad - law), std::abs(std::abs(loop_phase(f, delta)) - law)));
    }
    return {worst_closure < 1e-12 && worst_area < 1e-9,
            "max|alpha(T)|=" + fmt("%.2e", worst_closure) + " max area err=" + fmt("%.2e rad", worst_area)};
}

Verdict criterion3() {
    Crystal cr = drive_crystal();
    GateConfig g = ls_gate();
    PulseSequence seq = walsh2(g);
    GateConfig cal = calibrate_sequence(g, cr, seq, rwa());
    double f_rwa = sequence_fidelity(cal, cr, seq, rwa(), numeric_sequence_unitary(cal, cr, seq, rwa()));
    PropagationOptions full = rwa();
    full.level = Level::Full;
    full.ramp = 2e-6;
    GateConfig cal_full = calibrate_sequence(g, cr, seq, full);
    double f_full =
        sequence_fidelity(cal_full, cr, seq, full, numeric_sequence_unitary(cal_full, cr, seq, full));
    return {f_rwa > 0.9999 && f_full > 0.999,
            "rwa F=" + fmt("%.9f", f_rwa) + " full+2us ramp F=" + fmt("%.9f", f_full)};
}

Verdict criterion4() {
    Crystal cr = drive_crystal();
    const std::vector<double> eps = {50, 100, 200, 500};
    Verdict v{true, ""};
    for (GateConfig g : {ls_gate(), ms_gate()}) {
        for (int loops : {1, 2}) {
            PulseSequence seq;
            if (loops == 2) {
                seq = walsh2(g);
            } else if (g.mechanism == Mechanism::LightShift) {
                seq = ls_ramsey(g);
            } else {
                seq = single_pulse(g);
            }
            GateConfig ref = calibrate_sequence(g, cr, seq, rwa());
            ComplexMatrix u = numeric_sequence_unitary(ref, cr, seq, rwa());
            std::vector<double> infid;
            for (double e : eps) {
                NoiseModel noise;
                noise.mode_offset_hz = e;
                // Same total entangling phase as the reference.
                GateConfig cal = calibrate_sequence(g, cr, seq, rwa(), noise);
                infid.push_back(1 - sequence_fidelity(cal, cr, seq, rwa(), u, noise));
            }
            double s = loglog_slope(eps, infid);
            bool ok = loops == 1 ? std::abs(s - 2.0) <= 0.2 : std::abs(s - 4.0) <= 0.3;
            v.pass = v.pass && ok;
            v.detail += std::string(mechanism_name(g.mechanism)) + " K=" + std::to_string(loops) +
                        " slope=" + fmt("%.3f ", s);
        }
    }
    return v;
}

Verdict criterion5() {
    Crystal cr = drive_crystal();
    GateConfig ls = ls_gate();
    PulseSequence ls_seq = walsh2(ls);
    GateConfig ls_cal = calibrate_sequence(ls, cr, ls_seq, rwa());
    double d_ls = 0.3 / (kTwoPi * ls_seq.total_duration);
    OffsetScan a = parity_phase_vs_offset(ls_cal, cr, ls_seq, {-d_ls, 0.0, d_ls}, {1, 1}, rwa());
    double ls_shift = std::max(std::abs(a.points[0].phase), std::abs(a.points[2].phase));

    // Equal |eta| * rabi on both ions, as run in the lab.
    GateConfig ms = balanced_ms_config(ms_gate(), cr);
    PulseSequence ms_seq = walsh2(ms);
    GateConfig ms_cal = calibrate_sequence(ms, cr, ms_seq, rwa());
    const double d = 200.0;
    OffsetScan b = parity_phase_vs_offset(ms_cal, cr, ms_seq, {0.0, d}, {1, 1}, rwa());
    double expected = kTwoPi * 2 * d * ms_seq.total_duration;
    double ratio = b.points[1].phase / expected;

    OffsetScan c = parity_phase_vs_offset(ms_cal, cr, ms_seq, {-1000.0, 0.0, 1000.0}, {-1, 1}, rwa());
    double opposite = std::max(std::abs(c.points[0].phase), std::abs(c.points[2].phase));

    bool ok = ls_shift < 1e-3 && std::abs(ratio - 1) <= 0.05 && opposite < 1e-3;
    return {ok, "LS common |dphi_p|=" + fmt("%.2e", ls_shift) + " MS sum ratio=" + fmt("%.4f", ratio) +
                    " MS opposite |phi_p|=" + fmt("%.2e", opposite)};
}

Verdict criterion6() {
    Crystal cr = drive_crystal();
    const std::vector<double> phis = {0.0, kPi / 3, 1.1, 2.9};
    std::vector<double> fid, chi;
    ComplexMatrix target_wrapped;
    for (double p : phis) {
        GateConfig g = ms_gate();
        g.phi_s = {p, 0.0};
        PulseSequence inner = walsh2(g);
        GateConfig cal = calibrate_sequence(g, cr, inner, rwa());
        PulseSequence wrapped = wrap_phase_insensitive(inner, 0.0, 0.0);
        if (p == 0.0) {
            target_wrapped = numeric_sequence_unitary(cal, cr, wrapped, rwa());
        }
        fid.push_back(sequence_fidelity(cal, cr, wrapped, rwa(), target_wrapped));
        SimOutcome bare = simulate_gate(cal, cr, inner, down_down(), rwa(), {});
        chi.push_back(bell_phase(bare.rho));
    }
    double spread = *std::max_element(fid.begin(), fid.end()) - *std::min_element(fid.begin(), fid.end());
    double worst_plus = 0, worst_minus = 0;
    for (size_t i = 1; i < phis.size(); i++) {
        double dchi = chi[i] - chi[0];
        worst_plus = std::max(worst_plus, std::abs(wrap_pi(dchi - phis[i])));
        worst_minus = std::max(worst_minus, std::abs(wrap_pi(dchi + phis[i])));
    }
    double track = std::min(worst_plus, worst_minus);
    return {spread < 1e-9 && track < 1e-6, "wrapped F in [" + fmt("%.12f", fid[0]) + "], spread=" +
                                               fmt("%.2e", spread) + " bare phase tracking err=" + fmt("%.2e", track)};
}

Verdict criterion7() {
    Crystal cr = drive_crystal();
    GateConfig g = balanced_ms_config(ms_gate(), cr);
    PropagationOptions o = rwa(10);
    o.step = 0.1e-6;
    std::vector<double> times;
    for (int i = 0; i <= 40; i++) {
        times.push_back(g.gate_duration() * i / 40.0);
    }
    auto split = [](const PopulationTraces &tr) {
        double m = 0;
        for (const auto &p : tr.populations) {
            m = std::max(m, std::abs(p[1] - p[2]));
        }
        return m;
    };
    double ideal = split(asymmetry_scan(g, cr, 0, 0, times, o));
    PopulationTraces tone = asymmetry_scan(g, cr, 0.1, 0, times, o);
    PopulationTraces species = asymmetry_scan(g, cr, 0, 0.1, times, o);
    bool distinct = split(tone) < 1e-10 && split(species) > 1e-3;

    double err_clean = 0, err_noisy = 0;
    for (auto [t, s] : {std::pair{0.1, 0.0}, std::pair{0.0, 0.1}}) {
        PopulationTraces tr = t != 0 ? tone : species;
        AsymmetryEstimate e = classify_asymmetry(tr, g, cr, o);
        err_clean = std::max(err_clean, std::max(std::abs(e.tone - t), std::abs(e.species - s)));
        AsymmetryEstimate n = classify_asymmetry(add_noise(tr, 0.01, 11), g, cr, o);
        err_noisy = std::max(err_noisy, std::max(std::abs(n.tone - t), std::abs(n.species - s)));
    }
    return {ideal < 1e-10 && distinct && err_clean < 0.01 && err_noisy < 0.02,
            "ideal max|p01-p10|=" + fmt("%.1e", ideal) + " tone split=" + fmt("%.1e", split(tone)) +
                " species split=" + fmt("%.1e", split(species)) + " classify err clean=" + fmt("%.1e", err_clean) +
                " noisy=" + fmt("%.1e", err_noisy)};
}

Verdict criterion8() {
    Crystal cr = drive_crystal();
    GateConfig g = balanced_ms_config(ms_gate(), cr);
    PulseSequence seq = walsh2(g);
    auto t0 = std::chrono::steady_clock::now();
    GateConfig cal = calibrate_sequence(g, cr, seq, rwa());
    std::vector<double> offsets;
    for (int i = 0; i <= 10; i++) {
        offsets.push_back(-1000.0 + 200.0 * i);
    }
    OffsetScan s = parity_phase_vs_offset(cal, cr, seq, offsets, {1, 0}, rwa());
    double dt = seconds_since(t0);
    double odd = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, n = 11;
    for (int i = 0; i <= 10; i++) {
        odd = std::max(odd, std::abs(s.points[i].phase + s.points[10 - i].phase));
        double x = s.points[i].offset_hz, y = s.points[i].phase;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (const auto &p : s.points) {
        ss_res += std::pow(p.phase - slope * p.offset_hz - icpt, 2);
        ss_tot += std::pow(p.phase - sy / n, 2);
    }
    double r2 = 1 - ss_res / ss_tot;
    double scale = std::abs(s.points[10].phase);
    double ratio = slope / (kTwoPi * s.total_duration);
    bool ok = odd <= 0.02 * scale && r2 > 0.999 && std::abs(ratio - 1) <= 0.05 && dt < 120;
    return {ok, "odd residual=" + fmt("%.1e", odd) + " R2=" + fmt("%.6f", r2) + " slope/(2pi t_total)=" +
                    fmt("%.4f", ratio) + " t=" + fmt("%.1fs", dt)};
}

Verdict criterion9() {
    Crystal cr = ca_sr_crystal();
    ScatteringModel m;
    auto grid = detuning_grid(-19.5e12, -0.5e12, 39);
    BudgetCurve ip = total_error_vs_detuning(grid, ModeLabel::InPhase, cr, m);
    BudgetCurve oop = total_error_vs_detuning(grid, ModeLabel::OutOfPhase, cr, m);
    bool diverge = true, interior = true, ordered = true;
    int violations = 0;
    for (const BudgetCurve *c : {&ip, &oop}) {
        size_t n = c->total.size();
        diverge = diverge && c->total[0] > c->total[1] && c->total[n - 1] > c->total[n - 2] &&
                  c->total[0] > 10 * c->min_total && c->total[n - 1] > 10 * c->min_total;
        interior = interior && c->grid_argmin > 0 && c->grid_argmin + 1 < n && c->argmin_hz > grid.front() &&
                   c->argmin_hz < grid.back();
    }
    double first_violation = 0;
    for (size_t i = 0; i < grid.size(); i++) {
        if (!(ip.eps_heating[i] > oop.eps_heating[i])) {
            if (violations++ == 0) {
                first_violation = grid[i];
            }
            ordered = false;
        }
    }
    std::string d = "argmin ip=" + fmt("%.2f", ip.argmin_hz * 1e-12) + " oop=" + fmt("%.2f THz", oop.argmin_hz * 1e-12) +
                    " diverge=" + (diverge ? "yes" : "no") + " interior=" + (interior ? "yes" : "no") +
                    " heating ip>oop violated at " + std::to_string(violations) + "/" + std::to_string(grid.size()) +
                    " points";
    if (violations) {
        d += " (first at " + fmt("%.2f THz)", first_violation * 1e-12);
    }
    return {diverge && interior && ordered, d};
}

Verdict criterion10() {
    Crystal cr = ca_sr_crystal();
    const double f_ref[2] = {1.49e6, 2.91e6};
    const double eta_ref[4] = {0.090, 0.124, 0.127, -0.045};
    double worst = 0;
    for (int m = 0; m < 2; m++) {
        worst = std::max(worst, std::abs(cr.modes[m].frequency_hz / f_ref[m] - 1));
        for (int j = 0; j < 2; j++) {
            worst = std::max(worst, std::abs(cr.modes[m].eta[j] / eta_ref[2 * m + j] - 1));
        }
    }
    return {worst <= 0.05, "max relative deviation=" + fmt("%.4f", worst)};
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

Verdict criterion11() {
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / "mixgate_acceptance_det";
    fs::remove_all(base);
    const std::string cli = MIXGATE_CLI;
    const std::string cfg = std::string(MIXGATE_SOURCE_DIR) + "/configs/";
    struct Run {
        std::string args;
        std::string tag;
    };
    std::vector<Run> runs = {
        {"simulate --config " + cfg + "ls_walsh2.cfg", "sim"},
        {"scan parity --config " + cfg + "ls_walsh2.cfg --seed 99", "par"},
        {"scan qubit-offset --config " + cfg + "ms_walsh2.cfg", "off"},
        {"scan pulse-length --config " + cfg + "ms_asymmetry.cfg", "pl"},
    };
    int compared = 0;
    for (const auto &r : runs) {
        for (int rep = 0; rep < 2; rep++) {
            fs::path out = base / (r.tag + std::to_string(rep));
            std::string extra = rep == 1 ? " --threads 2" : "";
            std::string cmd = cli + " " + r.args + extra + " --out " + out.string() + " 2>/dev/null";
            if (std::system(cmd.c_str()) != 0) {
                return {false, "command failed: " + cmd};
            }
        }
        for (const auto &e : fs::directory_iterator(base / (r.tag + "0"))) {
            fs::path other = base / (r.tag + "1") / e.path().filename();
            if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
                return {false, "mismatch in " + r.tag + "/" + e.path().filename().string()};
            }
            compared++;
        }
    }
    fs::remove_all(base);
    return {compared >= 8, std::to_string(compared) + " output files byte-identical across repeated runs"};
}

}  // namespace

int main(int argc, char **argv) {
    std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10, criterion11};
    // Optional list of criterion numbers to run.
    std::vector<int> only;
    for (int i = 1; i < argc; i++) {
        only.push_back(std::atoi(argv[i]));
    }
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); i++) {
        int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) {
            continue;
        }
        Verdict v;
        auto t0 = std::chrono::steady_clock::now();
        try {
            v = criteria[i]();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("CRITERION %2d: %s  %s [%.1fs]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
