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

#include "mixgate/sequence.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"

#include "mixgate/dynamics.hpp"
#include "mixgate/error.hpp"

namespace mixgate {

void PulseSequence::validate() const {
    double prev_end = 0.0;
    double prev_start = 0.0;
    for (const auto &el : elements) {
        if (!(el.duration >= 0) || !(el.start >= 0)) {
            throw Error(ErrorCode::InvalidArgument, "sequence element with negative start or duration");
        }
        double tol = 1e-12 * std::max(1.0, std::abs(prev_end)) * 1e-6;
        if (el.start < prev_start || el.start < prev_end - tol) {
            throw Error(ErrorCode::SequenceOverlap, "sequence elements overlap or are out of order");
        }
        prev_start = el.start;
        prev_end = std::max(prev_end, el.end());
    }
    if (total_duration < prev_end * (1 - 1e-12)) {
        throw Error(ErrorCode::SequenceOverlap, "sequence total duration shorter than its elements");
    }
}

SequenceElement rotation(double angle, double phase, Target target, Driver driver, double start, double duration) {
    if (!(angle > -kTwoPi && angle <= kTwoPi)) {
        throw Error(ErrorCode::InvalidArgument, "rotation angle must lie in (-2 pi, 2 pi]");
    }
    SequenceElement el;
    el.kind = ElementKind::Rotation;
    el.angle = angle;
    el.phase = phase;
    el.target = target;
    el.driver = driver;
    el.start = start;
    el.duration = duration;
    return el;
}

SequenceElement gate_pulse(double start, double duration, double amplitude) {
    if (amplitude < 0) {
        throw Error(ErrorCode::InvalidArgument, "gate pulse amplitude must be non-negative");
    }
    SequenceElement el;
    el.kind = ElementKind::GatePulse;
    el.start = start;
    el.duration = duration;
    el.amplitude = amplitude;
    return el;
}

SequenceElement delay(double start, double duration) {
    if (!(duration >= 0)) {
        throw Error(ErrorCode::InvalidArgument, "delay duration must be non-negative");
    }
    SequenceElement el;
    el.kind = ElementKind::Delay;
    el.start = start;
    el.duration = duration;
    return el;
}

static bool targets(Target t, int j) {
    return t == Target::Both || (t == Target::Ion1 && j == 0) || (t == Target::Ion2 && j == 1);
}

static double rotation_axis(const SequenceElement &el, const PulseSequence &seq, const GateConfig &config, int j) {
    return el.driver == Driver::MicrowaveRf ? el.phase + seq.mw_phase[j] : el.phase - config.phi_s[j];
}

ComplexMatrix rotation_unitary(const SequenceElement &el, const PulseSequence &seq, const GateConfig &config) {
    std::vector<ComplexMatrix> f;
    for (int j = 0; j < 2; j++) {
        f.push_back(targets(el.target, j) ? rotation_matrix(el.angle, rotation_axis(el, seq, config, j)) : identity(2));
    }
    return tensor(f);
}

ComplexMatrix rotation_generator(const SequenceElement &el, const PulseSequence &seq, const GateConfig &config) {
    ComplexMatrix g = ComplexMatrix::Zero(4, 4);
    for (int j = 0; j < 2; j++) {
        if (!targets(el.target, j)) {
            continue;
        }
        ComplexMatrix s = 0.5 * el.angle * pauli_phi(rotation_axis(el, seq, config, j));
        g += j == 0 ? tensor({s, identity(2)}) : tensor({identity(2), s});
    }
    return g;
}

ComplexMatrix frame_rotation(std::array<double, 2> phases) {
    std::vector<ComplexMatrix> f;
    for (double p : phases) {
        ComplexMatrix r = ComplexMatrix::Zero(2, 2);
        r(0, 0) = std::polar(1.0, -p / 2);
        r(1, 1) = std::polar(1.0, p / 2);
        f.push_back(r);
    }
    return tensor(f);
}

double default_t_delay(const GateConfig &config) {
    return config.loop_duration() + 1e-6;
}

PulseSequence single_pulse(const GateConfig &config) {
    config.validate();
    PulseSequence seq;
    seq.mechanism = config.mechanism;
    seq.elements.push_back(gate_pulse(0.0, config.gate_duration()));
    seq.total_duration = config.gate_duration();
    return seq;
}

PulseSequence ls_ramsey(const GateConfig &config) {
    PulseSequence seq = single_pulse(config);
    if (config.mechanism != Mechanism::LightShift) {
        throw Error(ErrorCode::MechanismMismatch, "Ramsey wrapper is for the light-shift gate");
    }
    double t = seq.total_duration;
    seq.elements.insert(seq.elements.begin(), rotation(kPi / 2, 0.0, Target::Both, Driver::MicrowaveRf, 0.0));
    seq.elements.push_back(rotation(kPi / 2, 0.0, Target::Both, Driver::MicrowaveRf, t));
    return seq;
}

static void check_delay(const GateConfig &config, double t_delay) {
    config.validate();
    if (t_delay < config.loop_duration() * (1 - 1e-12)) {
        throw Error(ErrorCode::SequenceOverlap, "t_delay shorter than one loop: gate pulses would overlap");
    }
}

PulseSequence build_ls_walsh2(const GateConfig &config, double t_delay) {
    if (config.mechanism != Mechanism::LightShift) {
        throw Error(ErrorCode::MechanismMismatch, "build_ls_walsh2 needs a light-shift config");
    }
    check_delay(config, t_delay);
    double t_loop = config.loop_duration();
    PulseSequence seq;
    seq.mechanism = Mechanism::LightShift;
    seq.elements.push_back(rotation(kPi / 2, 0.0, Target::Both, Driver::MicrowaveRf, 0.0));
    seq.elements.push_back(gate_pulse(0.0, t_loop));
    seq.elements.push_back(rotation(kPi, 0.0, Target::Both, Driver::MicrowaveRf, (t_loop + t_delay) / 2));
    SequenceElement second = gate_pulse(t_delay, t_loop);
    // Laser phase shifted by -delta t_delay; phi0 enters with a minus sign.
    second.phase_shift = config.detuning * t_delay;
    seq.elements.push_back(second);
    seq.elements.push_back(rotation(kPi / 2, 0.0, Target::Both, Driver::MicrowaveRf, t_delay + t_loop));
    seq.total_duration = t_delay + t_loop;
    return seq;
}

PulseSequence build_ms_walsh2(const GateConfig &config, double t_delay) {
    if (config.mechanism != Mechanism::MolmerSorensen) {
        throw Error(ErrorCode::MechanismMismatch, "build_ms_walsh2 needs an MS config");
    }
    check_delay(config, t_delay);
    double t_loop = config.loop_duration();
    PulseSequence seq;
    seq.mechanism = Mechanism::MolmerSorensen;
    seq.elements.push_back(gate_pulse(0.0, t_loop));
    SequenceElement second = gate_pulse(t_delay, t_loop);
    second.tone_phase_shift = {kPi + config.detuning * t_delay, kPi - config.detuning * t_delay};
    seq.elements.push_back(second);
    seq.total_duration = t_delay + t_loop;
    return seq;
}

PulseSequence wrap_phase_insensitive(const PulseSequence &gate, double phi_mw, double phi_rf) {
    if (gate.mechanism != Mechanism::MolmerSorensen) {
        throw Error(ErrorCode::MechanismMismatch, "phase-insensitive wrapper applies to MS gates only");
    }
    gate.validate();
    PulseSequence seq;
    seq.mechanism = gate.mechanism;
    seq.mw_phase = {phi_mw, phi_rf};
    double end = gate.total_duration;
    seq.elements.push_back(rotation(kPi / 2, 0.0, Target::Both, Driver::MicrowaveRf, 0.0));
    seq.elements.push_back(rotation(kPi / 2, 0.0, Target::Both, Driver::Laser, 0.0));
    for (const auto &el : gate.elements) {
        seq.elements.push_back(el);
    }
    seq.elements.push_back(rotation(kPi / 2, kPi, Target::Both, Driver::Laser, end));
    seq.elements.push_back(rotation(kPi / 2, 0.0, Target::Both, Driver::MicrowaveRf, end));
    seq.total_duration = end;
    return seq;
}

GateConfig pulse_config(const GateConfig &config, const SequenceElement &pulse) {
    GateConfig c = config;
    for (int j = 0; j < 2; j++) {
        c.amplitude_scale[j] *= pulse.amplitude;
    }
    if (config.mechanism == Mechanism::LightShift) {
        if (pulse.tone_phase_shift[0] != 0.0 || pulse.tone_phase_shift[1] != 0.0) {
            throw Error(ErrorCode::MechanismMismatch, "tone phase offsets on a light-shift pulse");
        }
        c.phi0 += pulse.phase_shift;
    } else {
        if (pulse.phase_shift != 0.0) {
            throw Error(ErrorCode::MechanismMismatch, "laser phase offset on an MS pulse; use tone offsets");
        }
        double sum = (pulse.tone_phase_shift[0] + pulse.tone_phase_shift[1]) / 2;
        double diff = (pulse.tone_phase_shift[0] - pulse.tone_phase_shift[1]) / 2;
        for (int j = 0; j < 2; j++) {
            c.phi_s[j] += sum;
            c.phi_d[j] += diff;
        }
    }
    return c;
}

namespace {

struct BranchState {
    std::vector<Complex> alpha;
    double phase = 0.0;
};

// Column index and phase of a rotation acting on one gate-basis vector.
std::pair<int, Complex> permuted(const ComplexMatrix &m, int col) {
    Eigen::Index row;
    m.col(col).cwiseAbs().maxCoeff(&row);
    Complex c = m(row, col);
    if (std::abs(std::abs(c) - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "rotation between gate pulses does not permute the gate basis");
    }
    return {static_cast<int>(row), c};
}

}  // namespace

namespace {

struct SequencePhases {
    BranchPhases phases{};
    // Gate-basis column each original branch ends in.
    std::array<int, 4> slot{0, 1, 2, 3};
    int first = -1;
    int last = -1;
};

SequencePhases integrate_sequence(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                                  const PropagationOptions &options, const NoiseModel &noise) {
    config.validate();
    seq.validate();
    if (seq.mechanism != config.mechanism) {
        throw Error(ErrorCode::MechanismMismatch, "sequence and config use different gate mechanisms");
    }
    GateConfig quiet = config;
    quiet.qubit_offset_hz = {0.0, 0.0};
    quiet.beam_shift_hz = {0.0, 0.0};
    NoiseModel drift;
    drift.mode_offset_hz = noise.mode_offset_hz;
    PropagationOptions opts = options;
    opts.step = options.resolved_step(crystal);
    if (config.mechanism == Mechanism::MolmerSorensen) {
        // Carrier terms do not factor into spin branches.
        opts.level = Level::Rwa;
    }
    auto modes = simulated_modes(config, opts.level);
    size_t n_modes = modes.size();
    ComplexMatrix basis = gate_basis(config);
    ComplexMatrix basis_adj = basis.adjoint();

    int first = -1;
    int last = -1;
    for (int i = 0; i < static_cast<int>(seq.elements.size()); i++) {
        if (seq.elements[i].kind == ElementKind::GatePulse) {
            if (first < 0) {
                first = i;
            }
            last = i;
        }
    }
    std::array<BranchState, 4> branches;
    std::array<int, 4> slot{0, 1, 2, 3};
    for (auto &b : branches) {
        b.alpha.assign(n_modes, Complex(0.0));
    }
    SequencePhases result;
    if (first < 0) {
        return result;
    }
    result.first = first;
    result.last = last;

    for (int i = first; i <= last; i++) {
        const SequenceElement &el = seq.elements[i];
        if (el.kind == ElementKind::Rotation) {
            ComplexMatrix m = basis_adj * rotation_unitary(el, seq, config) * basis;
            for (int b = 0; b < 4; b++) {
                auto [row, c] = permuted(m, slot[b]);
                slot[b] = row;
                branches[b].phase += std::arg(c);
            }
            continue;
        }
        if (el.kind != ElementKind::GatePulse || el.duration == 0.0) {
            continue;
        }
        TimeDependentHamiltonian h = config.mechanism == Mechanism::LightShift
                                         ? build_ls_hamiltonian(quiet, crystal, el, opts, drift)
                                         : build_ms_hamiltonian(quiet, crystal, el, opts, drift);
        std::vector<SpinMatrix> a;
        SpinMatrix bmat;
        // d/dt of (alpha_m, Phi) for every branch; y packs n_modes alphas and the phase.
        size_t width = n_modes + 1;
        auto rhs = [&](double t, const std::vector<Complex> &y, std::vector<Complex> &dy) {
            h.spin_coefficients(t, a, bmat);
            std::vector<ComplexMatrix> pa(n_modes);
            double scale = 0.0;
            for (size_t m = 0; m < n_modes; m++) {
                pa[m] = basis_adj * ComplexMatrix(a[m]) * basis;
                scale = std::max(scale, pa[m].cwiseAbs().maxCoeff());
            }
            ComplexMatrix pb = basis_adj * ComplexMatrix(bmat) * basis;
            double bscale = pb.cwiseAbs().maxCoeff();
            for (int r = 0; r < 4; r++) {
                for (int c = 0; c < 4; c++) {
                    if (r == c) {
                        continue;
                    }
                    bool bad = std::abs(pb(r, c)) > 1e-9 * std::max(bscale, 1e-300);
                    for (size_t m = 0; m < n_modes; m++) {
                        bad = bad || std::abs(pa[m](r, c)) > 1e-9 * std::max(scale, 1e-300);
                    }
                    if (bad) {
                        throw Error(ErrorCode::InvalidArgument,
                                    "gate Hamiltonian is not diagonal in the gate basis; branch phases undefined");
                    }
                }
            }
            for (int b = 0; b < 4; b++) {
                int s = slot[b];
                size_t o = b * width;
                double dphi = -std::real(pb(s, s));
                for (size_t m = 0; m < n_modes; m++) {
                    Complex g = 2.0 * pa[m](s, s);
                    Complex da = -0.5 * kI * std::conj(g);
                    dy[o + m] = da;
                    dphi += std::imag(std::conj(y[o + m]) * da);
                }
                dy[o + n_modes] = dphi;
            }
        };
        std::vector<Complex> y(4 * width);
        for (int b = 0; b < 4; b++) {
            for (size_t m = 0; m < n_modes; m++) {
                y[b * width + m] = branches[b].alpha[m];
            }
            y[b * width + n_modes] = branches[b].phase;
        }
        long n = std::max(1L, static_cast<long>(std::ceil(el.duration / opts.step - 1e-9)));
        double dt = el.duration / static_cast<double>(n);
        std::vector<Complex> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
        for (long s = 0; s < n; s++) {
            double t = el.start + static_cast<double>(s) * dt;
            rhs(t, y, k1);
            for (size_t q = 0; q < y.size(); q++) tmp[q] = y[q] + 0.5 * dt * k1[q];
            rhs(t + dt / 2, tmp, k2);
            for (size_t q = 0; q < y.size(); q++) tmp[q] = y[q] + 0.5 * dt * k2[q];
            rhs(t + dt / 2, tmp, k3);
            for (size_t q = 0; q < y.size(); q++) tmp[q] = y[q] + dt * k3[q];
            rhs(t + dt, tmp, k4);
            for (size_t q = 0; q < y.size(); q++) {
                y[q] += dt / 6 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
            }
        }
        for (int b = 0; b < 4; b++) {
            for (size_t m = 0; m < n_modes; m++) {
                branches[b].alpha[m] = y[b * width + m];
            }
            branches[b].phase = std::real(y[b * width + n_modes]);
        }
    }
    for (int b = 0; b < 4; b++) {
        result.phases[b] = branches[b].phase;
    }
    result.slot = slot;
    return result;
}

}  // namespace

BranchPhases sequence_branch_phases(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                                    const PropagationOptions &options, const NoiseModel &noise) {
    return integrate_sequence(config, crystal, seq, options, noise).phases;
}

ComplexMatrix numeric_sequence_unitary(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                                       const PropagationOptions &options, const NoiseModel &noise) {
    SequencePhases sp = integrate_sequence(config, crystal, seq, options, noise);
    ComplexMatrix basis = gate_basis(config);
    ComplexMatrix inner = ComplexMatrix::Zero(4, 4);
    for (int b = 0; b < 4; b++) {
        inner += std::polar(1.0, sp.phases[b]) * basis.col(sp.slot[b]) * basis.col(b).adjoint();
    }
    if (sp.first < 0) {
        inner = identity(4);
    }
    ComplexMatrix u = identity(4);
    for (int i = 0; i < static_cast<int>(seq.elements.size()); i++) {
        const SequenceElement &el = seq.elements[i];
        if (i == sp.first) {
            u = inner * u;
        }
        bool outside = sp.first < 0 || i < sp.first || i > sp.last;
        if (outside && el.kind == ElementKind::Rotation) {
            u = rotation_unitary(el, seq, config) * u;
        }
    }
    return u;
}

GateConfig calibrate_sequence(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                              const PropagationOptions &options, const NoiseModel &noise, double target) {
    GateConfig c = config;
    for (int it = 0; it < 30; it++) {
        auto phases = sequence_branch_phases(c, crystal, seq, options, noise);
        double psi = std::abs(phase_decomposition(phases).psi);
        double scale = 0.0;
        for (double p : phases) {
            scale = std::max(scale, std::abs(p));
        }
        if (psi == 0.0 || psi <= 1e-12 * scale) {
            throw Error(ErrorCode::Uncalibratable, "cannot calibrate: the sequence has no entangling phase");
        }
        double ratio = std::abs(target) / psi;
        double s = std::sqrt(ratio);
        for (auto &a : c.amplitude_scale) {
            a *= s;
        }
        if (std::abs(ratio - 1.0) < 1e-12) {
            return c;
        }
    }
    throw Error(ErrorCode::NonConvergence, "sequence amplitude calibration did not converge");
}

ComplexMatrix ideal_sequence_unitary(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq) {
    seq.validate();
    ComplexMatrix u = identity(4);
    for (const auto &el : seq.elements) {
        if (el.kind == ElementKind::Rotation) {
            u = rotation_unitary(el, seq, config) * u;
        } else if (el.kind == ElementKind::GatePulse) {
            GateConfig c = pulse_config(config, el);
            u = ideal_gate_unitary(c, crystal, el.duration) * u;
        }
    }
    return u;
}

static const char *kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::GatePulse:
            return "gate_pulse";
        case ElementKind::Rotation:
            return "rotation";
        default:
            return "delay";
    }
}

static const char *target_name(Target t) {
    switch (t) {
        case Target::Ion1:
            return "ion1";
        case Target::Ion2:
            return "ion2";
        default:
            return "both";
    }
}

std::string sequence_to_json(const PulseSequence &seq) {
    nlohmann::ordered_json j;
    j["mechanism"] = mechanism_name(seq.mechanism);
    j["total_duration_s"] = seq.total_duration;
    j["mw_phase"] = {seq.mw_phase[0], seq.mw_phase[1]};
    j["elements"] = nlohmann::ordered_json::array();
    for (const auto &el : seq.elements) {
        nlohmann::ordered_json e;
        e["kind"] = kind_name(el.kind);
        e["start_s"] = el.start;
        e["duration_s"] = el.duration;
        if (el.kind == ElementKind::Rotation) {
            e["angle"] = el.angle;
            e["phase"] = el.phase;
            e["target"] = target_name(el.target);
            e["driver"] = el.driver == Driver::Laser ? "laser" : "mw_rf";
        } else if (el.kind == ElementKind::GatePulse) {
            e["amplitude"] = el.amplitude;
            e["phase_shift"] = el.phase_shift;
            e["tone_phase_shift"] = {el.tone_phase_shift[0], el.tone_phase_shift[1]};
        }
        j["elements"].push_back(e);
    }
    return j.dump(2);
}

}  // namespace mixgate
