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

#include "mixgate/budget.hpp"

#include <math.h>  // pchip in boost 1.74 calls isnan unqualified

#include <algorithm>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include "mixgate/analytic.hpp"
#include "mixgate/error.hpp"
#include "mixgate/parallel.hpp"
#include "mixgate/sequence.hpp"
#include "mixgate/tomography.hpp"

namespace mixgate {

SpeciesOptics ca_optics() {
    return {"Ca43", kTwoPi * 22.4e6, 396.96e-9};
}

SpeciesOptics sr_optics() {
    return {"Sr88", kTwoPi * 21.7e6, 407.89e-9};
}

double saturation_parameter(const SpeciesOptics &optics, double power_w, double radius_m) {
    if (!(optics.linewidth > 0) || !(optics.wavelength_m > 0)) {
        throw Error(ErrorCode::InvalidArgument, "species linewidth and wavelength must be positive");
    }
    if (!(power_w >= 0) || !(radius_m > 0)) {
        throw Error(ErrorCode::InvalidArgument, "beam power must be >= 0 and radius > 0");
    }
    double intensity = 2 * power_w / (kPi * radius_m * radius_m);
    double lambda3 = std::pow(optics.wavelength_m, 3);
    double i_sat = kPi * kPlanck * kSpeedOfLight * optics.linewidth / (3 * lambda3);
    return intensity / i_sat;
}

static void require_off_resonance(double delta_hz) {
    if (delta_hz == 0.0 || !std::isfinite(delta_hz)) {
        throw Error(ErrorCode::Resonance, "Raman detuning on resonance");
    }
}

double rabi_vs_detuning(double delta_hz, double power_w, double radius_m, const SpeciesOptics &optics) {
    require_off_resonance(delta_hz);
    double s = saturation_parameter(optics, power_w, radius_m);
    double g = optics.linewidth;
    return optics.rabi_coefficient * g * g * s / (4 * std::abs(kTwoPi * delta_hz));
}

double scattering_rate(double delta_hz, double power_w, double radius_m, const SpeciesOptics &optics) {
    require_off_resonance(delta_hz);
    double s = saturation_parameter(optics, power_w, radius_m);
    double g = optics.linewidth;
    double d = kTwoPi * delta_hz;
    return optics.scatter_coefficient * g * g * g * s / (4 * d * d);
}

std::array<double, 2> scattering_error(double delta_1_hz, double gate_time, const ScatteringModel &model) {
    if (!(gate_time > 0)) {
        throw Error(ErrorCode::InvalidArgument, "gate time must be positive");
    }
    std::array<double, 2> out;
    double deltas[2] = {delta_1_hz, delta_1_hz + model.species_offset_hz};
    for (int j = 0; j < 2; j++) {
        out[j] = scattering_rate(deltas[j], model.power_w, model.beam_radius_m, model.species[j]) * gate_time;
    }
    return out;
}

BudgetGate budget_gate(double delta_1_hz, ModeLabel mode, const Crystal &crystal, const ScatteringModel &model) {
    if (model.loops < 1) {
        throw Error(ErrorCode::InvalidArgument, "budget gate needs at least one loop");
    }
    BudgetGate g;
    g.delta_1_hz = delta_1_hz;
    g.crystal = crystal;
    double deltas[2] = {delta_1_hz, delta_1_hz + model.species_offset_hz};
    for (int j = 0; j < 2; j++) {
        g.shift[j] = rabi_vs_detuning(deltas[j], model.power_w, model.beam_radius_m, model.species[j]);
        g.crystal.ions[j].shift_up = g.shift[j] / 2;
        g.crystal.ions[j].shift_down = -g.shift[j] / 2;
    }
    GateConfig c;
    c.mechanism = Mechanism::LightShift;
    c.mode = mode;
    c.phi_z = kPi;
    c.loops = model.loops;
    c.raman_detuning_ca_hz = deltas[0];
    c.raman_detuning_sr_hz = deltas[1];
    // psi scales as 1 / delta^2 at fixed drive.
    double probe = kTwoPi * 40e3;
    c.detuning = probe;
    auto phases = branch_phases(c, g.crystal);
    double psi = std::abs(phase_decomposition(phases).psi);
    if (psi == 0.0) {
        throw Error(ErrorCode::Uncalibratable, "budget gate has no entangling phase at this detuning");
    }
    c.detuning = probe * std::sqrt(psi / (kPi / 2));
    g.detuning = c.detuning;
    g.gate_time = model.loops * c.loop_duration();
    g.zeta = gate_efficiency(phases);
    g.config = c;
    return g;
}

double heating_error(const BudgetGate &gate, const HeatingOptions &options) {
    GateConfig c = gate.config;
    PulseSequence seq;
    if (c.loops == 2) {
        c.loops = 1;
        seq = build_ls_walsh2(c, default_t_delay(c));
    } else {
        seq = ls_ramsey(c);
    }
    // Widest loop |alpha| = |f| / |delta| sets the truncation and the step.
    double f_max = 0.0;
    for (const auto &bf : branch_forces(c, gate.crystal)) {
        f_max = std::max(f_max, std::abs(bf.force));
    }
    double alpha_max = f_max / std::abs(c.detuning);
    PropagationOptions o;
    o.fock_dim = std::max(options.fock_dim,
                          static_cast<int>(std::ceil(alpha_max * alpha_max + 6 * alpha_max + 6)));
    o.step = std::min(c.loop_duration() / options.steps_per_loop, 0.02 / (f_max * std::sqrt(o.fock_dim)));
    c = calibrate_sequence(c, gate.crystal, seq, o);
    ComplexVector start = ComplexVector::Zero(4);
    start(3) = 1.0;
    ComplexVector target = numeric_sequence_unitary(c, gate.crystal, seq, o) * start;
    auto initial = spin_product_state(1, 1);
    double f_clean = fidelity_with_pure(simulate_gate(c, gate.crystal, seq, initial, o, {}).rho, target);
    NoiseModel heat = heating_from(gate.crystal);
    double f_heat = fidelity_with_pure(simulate_gate(c, gate.crystal, seq, initial, o, heat).rho, target);
    return std::max(0.0, f_clean - f_heat);
}

std::vector<double> detuning_grid(double lo_hz, double hi_hz, int points) {
    if (points < 2 || !(hi_hz > lo_hz)) {
        throw Error(ErrorCode::InvalidArgument, "detuning grid needs >= 2 points and lo < hi");
    }
    std::vector<double> g(points);
    for (int i = 0; i < points; i++) {
        g[i] = lo_hz + (hi_hz - lo_hz) * i / (points - 1);
    }
    return g;
}

namespace {

struct PointErrors {
    double scatter_1, scatter_2, closure, gate_time, zeta;
};

PointErrors point_errors(double delta, ModeLabel mode, const Crystal &crystal, const ScatteringModel &model) {
    BudgetGate g = budget_gate(delta, mode, crystal, model);
    auto s = scattering_error(delta, g.gate_time, model);
    return {s[0], s[1], model.closure_coefficient / std::abs(g.zeta), g.gate_time, g.zeta};
}

}  // namespace

BudgetCurve total_error_vs_detuning(const std::vector<double> &grid, ModeLabel mode, const Crystal &crystal,
                                    const ScatteringModel &model, const BudgetOptions &options) {
    if (grid.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "budget grid needs at least 3 points");
    }
    for (size_t i = 0; i < grid.size(); i++) {
        if (!(grid[i] < 0.0 && grid[i] > -model.species_offset_hz)) {
            throw Error(ErrorCode::Resonance, "budget grid must lie strictly between the two resonances");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "budget grid must be strictly increasing");
        }
    }
    BudgetCurve curve;
    curve.mode = mode;
    curve.delta_hz = grid;
    size_t n = grid.size();

    std::vector<double> nodes;
    if (options.heating_every_point || static_cast<int>(n) <= options.heating_nodes || options.heating_nodes < 4) {
        nodes = grid;
    } else {
        nodes = detuning_grid(grid.front(), grid.back(), options.heating_nodes);
    }
    std::vector<double> node_heat(nodes.size());
    parallel_for(nodes.size(), options.threads, [&](size_t i) {
        node_heat[i] = heating_error(budget_gate(nodes[i], mode, crystal, model), options.heating);
    });
    std::vector<double> log_heat(nodes.size());
    for (size_t i = 0; i < nodes.size(); i++) {
        log_heat[i] = std::log(std::max(node_heat[i], 1e-300));
    }
    auto heat_at = [&, nodes, log_heat]() mutable {
        std::vector<double> x = nodes;
        std::vector<double> y = log_heat;
        double lo = nodes.front(), hi = nodes.back();
        if (nodes.size() < 4) {
            // pchip needs four nodes; piecewise linear in log is still monotone.
            return std::function<double(double)>([x, y, lo, hi](double d) {
                d = std::clamp(d, lo, hi);
                size_t i = 1;
                while (i + 1 < x.size() && x[i] < d) {
                    i++;
                }
                double w = (d - x[i - 1]) / (x[i] - x[i - 1]);
                return std::exp((1 - w) * y[i - 1] + w * y[i]);
            });
        }
        auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
            std::move(x), std::move(y));
        return std::function<double(double)>(
            [spline, lo, hi](double d) { return std::exp((*spline)(std::clamp(d, lo, hi))); });
    }();

    curve.eps_scatter_1.resize(n);
    curve.eps_scatter_2.resize(n);
    curve.eps_heating.resize(n);
    curve.eps_closure.resize(n);
    curve.total.resize(n);
    curve.gate_time.resize(n);
    curve.zeta.resize(n);
    for (size_t i = 0; i < n; i++) {
        PointErrors e = point_errors(grid[i], mode, crystal, model);
        curve.eps_scatter_1[i] = e.scatter_1;
        curve.eps_scatter_2[i] = e.scatter_2;
        curve.eps_closure[i] = e.closure;
        curve.gate_time[i] = e.gate_time;
        curve.zeta[i] = e.zeta;
        bool exact = nodes.size() == n;
        curve.eps_heating[i] = exact ? node_heat[i] : heat_at(grid[i]);
        curve.total[i] = curve.eps_scatter_1[i] + curve.eps_scatter_2[i] + curve.eps_heating[i] + curve.eps_closure[i];
    }
    curve.grid_argmin = static_cast<size_t>(std::min_element(curve.total.begin(), curve.total.end()) -
                                            curve.total.begin());

    auto total_at = [&](double d) {
        PointErrors e = point_errors(d, mode, crystal, model);
        return e.scatter_1 + e.scatter_2 + e.closure + heat_at(d);
    };
    size_t k = curve.grid_argmin;
    double a = grid[k == 0 ? 0 : k - 1];
    double b = grid[std::min(k + 1, n - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = total_at(x1);
    double f2 = total_at(x2);
    while (b - a > options.refine_tolerance_hz) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = total_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = total_at(x2);
        }
    }
    double mid = (a + b) / 2;
    double f_mid = total_at(mid);
    if (f_mid <= curve.total[k]) {
        curve.argmin_hz = mid;
        curve.min_total = f_mid;
    } else {
        curve.argmin_hz = grid[k];
        curve.min_total = curve.total[k];
    }
    return curve;
}

GateConfig balanced_ms_config(const GateConfig &config, const Crystal &crystal) {
    if (config.mechanism != Mechanism::MolmerSorensen) {
        throw Error(ErrorCode::MechanismMismatch, "balanced_ms_config needs an MS config");
    }
    const MotionalMode &m = crystal.mode(config.mode);
    double force[2];
    for (int j = 0; j < 2; j++) {
        force[j] = std::abs(m.eta[j]) * crystal.ions[j].rabi;
        if (force[j] == 0.0) {
            throw Error(ErrorCode::Uncalibratable, "ion has no MS coupling to the gate mode");
        }
    }
    GateConfig c = config;
    c.amplitude_scale = {1.0, force[0] / force[1]};
    return scaled(c, calibrate_amplitude(c, crystal));
}

static void check_asymmetry(double a) {
    if (!(a > -0.5 && a < 0.5)) {
        throw Error(ErrorCode::InvalidArgument, "asymmetry must lie in (-0.5, 0.5)");
    }
}

PopulationTraces asymmetry_scan(const GateConfig &config, const Crystal &crystal, double tone_asym,
                                double species_asym, const std::vector<double> &times,
                                const PropagationOptions &options) {
    check_asymmetry(tone_asym);
    check_asymmetry(species_asym);
    if (times.empty()) {
        throw Error(ErrorCode::InvalidArgument, "asymmetry scan needs a time grid");
    }
    GateConfig c = config;
    c.tone_scale = {config.tone_scale[0] * (1 + tone_asym), config.tone_scale[1] * (1 - tone_asym)};
    c.amplitude_scale = {config.amplitude_scale[0] * (1 + species_asym),
                         config.amplitude_scale[1] * (1 - species_asym)};
    double t_max = *std::max_element(times.begin(), times.end());
    PulseSequence seq;
    seq.mechanism = config.mechanism;
    if (t_max > 0) {
        seq.elements.push_back(gate_pulse(0.0, t_max));
    }
    seq.total_duration = std::max(t_max, 0.0);
    PropagationOptions o = options;
    o.sample_times = times;
    SimOutcome out = simulate_gate(c, crystal, seq, spin_product_state(1, 1), o, {});
    PopulationTraces tr;
    tr.times = out.times;
    tr.populations = out.populations;
    // simulate_gate reports in sorted time order; restore the caller's order.
    if (!std::is_sorted(times.begin(), times.end())) {
        tr.times = times;
        for (size_t i = 0; i < times.size(); i++) {
            auto it = std::lower_bound(out.times.begin(), out.times.end(), times[i]);
            tr.populations[i] = out.populations[static_cast<size_t>(it - out.times.begin())];
        }
    }
    return tr;
}

PopulationTraces add_noise(const PopulationTraces &traces, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    PopulationTraces out = traces;
    for (auto &row : out.populations) {
        for (auto &p : row) {
            p += gauss(rng);
        }
    }
    return out;
}

namespace {

struct AsymmetryResidual {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    using QRSolver = Eigen::ColPivHouseholderQR<JacobianType>;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const PopulationTraces *data;
    const GateConfig *config;
    const Crystal *crystal;
    const PropagationOptions *options;
    int *evaluations;

    int inputs() const {
        return 2;
    }
    int values() const {
        return static_cast<int>(4 * data->times.size());
    }
    int operator()(const Eigen::VectorXd &x, Eigen::VectorXd &r) const {
        double t = std::clamp(x(0), -0.49, 0.49);
        double s = std::clamp(x(1), -0.49, 0.49);
        auto model = asymmetry_scan(*config, *crystal, t, s, data->times, *options);
        ++*evaluations;
        for (size_t i = 0; i < data->times.size(); i++) {
            for (int k = 0; k < 4; k++) {
                r(static_cast<Eigen::Index>(4 * i + k)) = model.populations[i][k] - data->populations[i][k];
            }
        }
        return 0;
    }
};

}  // namespace

AsymmetryEstimate classify_asymmetry(const PopulationTraces &traces, const GateConfig &config,
                                     const Crystal &crystal, const PropagationOptions &options) {
    if (traces.times.size() != traces.populations.size() || traces.times.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "asymmetry traces need >= 2 samples on a common time grid");
    }
    int evaluations = 0;
    AsymmetryResidual f{&traces, &config, &crystal, &options, &evaluations};
    Eigen::NumericalDiff<AsymmetryResidual, Eigen::Central> diff(f, 1e-4);
    AsymmetryEstimate best;
    best.residual = std::numeric_limits<double>::infinity();
    // Extra starts guard against the shallow valley along the tone axis near zero.
    const double starts[][2] = {{0.0, 0.0}, {0.1, 0.0}, {-0.1, 0.0}, {0.0, 0.1}, {0.0, -0.1}};
    for (const auto &st : starts) {
        Eigen::VectorXd x(2);
        x << st[0], st[1];
        Eigen::LevenbergMarquardt<decltype(diff)> lm(diff);
        lm.setMaxfev(200);
        lm.setXtol(1e-10);
        lm.setFtol(1e-12);
        auto status = lm.minimize(x);
        (void)status;
        Eigen::VectorXd r(f.values());
        f(x, r);
        double rms = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
        if (rms < best.residual) {
            best.tone = std::clamp(x(0), -0.49, 0.49);
            best.species = std::clamp(x(1), -0.49, 0.49);
            best.residual = rms;
        }
        // Noiseless fits land at machine precision; noisy ones at the noise floor.
        if (best.residual < 1e-6) {
            break;
        }
    }
    best.evaluations = evaluations;
    if (!std::isfinite(best.residual)) {
        throw Error(ErrorCode::NonConvergence, "asymmetry fit did not converge");
    }
    return best;
}

static double principal(double phase) {
    double p = std::remainder(phase, kPi);
    if (p <= -kPi / 2) {
        p += kPi;
    }
    return p;
}

OffsetScan parity_phase_vs_offset(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                                  const std::vector<double> &offsets_hz, std::array<double, 2> weights,
                                  const PropagationOptions &options, int analysis_points, int threads) {
    if (analysis_points < 3) {
        throw Error(ErrorCode::InvalidArgument, "parity fit needs at least 3 analysis phases");
    }
    std::vector<double> phases(analysis_points);
    for (int i = 0; i < analysis_points; i++) {
        phases[i] = kPi * i / analysis_points;
    }
    auto fit_for = [&](double offset) {
        NoiseModel noise;
        noise.qubit_offset_hz = {weights[0] * offset, weights[1] * offset};
        SimOutcome out = simulate_gate(config, crystal, seq, spin_product_state(1, 1), options, noise);
        return fit_parity(parity_scan(out.rho, phases));
    };
    OffsetScan scan;
    scan.total_duration = seq.total_duration;
    scan.reference_phase = fit_for(0.0).phase;
    scan.points.resize(offsets_hz.size());
    double wmax = std::max(std::abs(weights[0]), std::abs(weights[1]));
    parallel_for(offsets_hz.size(), threads, [&](size_t i) {
        ParityFit fit = fit_for(offsets_hz[i]);
        scan.points[i] = {offsets_hz[i], principal(fit.phase - scan.reference_phase), fit.contrast};
    });
    for (double d : offsets_hz) {
        if (kTwoPi * std::abs(d) * wmax * seq.total_duration >= kPi / 2) {
            scan.wrapped = true;
        }
    }
    return scan;
}

}  // namespace mixgate
