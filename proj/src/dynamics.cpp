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

#include "mixgate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mixgate/error.hpp"

namespace mixgate {

const char *level_name(Level level) {
    return level == Level::Rwa ? "rwa" : "full";
}

NoiseModel heating_from(const Crystal &crystal) {
    NoiseModel n;
    n.heating_rate = {crystal.modes[0].heating_rate, crystal.modes[1].heating_rate};
    return n;
}

double PropagationOptions::resolved_step(const Crystal &crystal) const {
    if (step > 0) {
        return step;
    }
    return 1.0 / (200.0 * crystal.modes[1].frequency_hz);
}

static int int_pow(int base, int exp) {
    int r = 1;
    for (int k = 0; k < exp; k++) {
        r *= base;
    }
    return r;
}

SparseMatrix embed(const SpinMatrix &spin, int n_modes, int fock_dim, int mode, bool raising) {
    std::vector<ComplexMatrix> factors{ComplexMatrix(spin)};
    auto ladder = ladder_operators(FockSpace(fock_dim));
    for (int k = 0; k < n_modes; k++) {
        if (k == mode) {
            factors.push_back(raising ? ladder.raising : ladder.lowering);
        } else {
            factors.push_back(identity(fock_dim));
        }
    }
    return sparse_tensor(factors);
}

SparseMatrix lowering_on(int n_modes, int fock_dim, int mode) {
    return embed(SpinMatrix::Identity(), n_modes, fock_dim, mode, false);
}

TimeDependentHamiltonian::TimeDependentHamiltonian(std::vector<ModeLabel> modes, int fock_dim, double t_begin,
                                                   double t_end)
    : modes_(std::move(modes)), fock_dim_(fock_dim), t_begin_(t_begin), t_end_(t_end) {
    FockSpace check(fock_dim);
    (void)check;
    dim_ = 4 * static_cast<Eigen::Index>(int_pow(fock_dim, static_cast<int>(modes_.size())));
}

std::vector<int> TimeDependentHamiltonian::dims() const {
    std::vector<int> d{2, 2};
    for (size_t k = 0; k < modes_.size(); k++) {
        d.push_back(fock_dim_);
    }
    return d;
}

void TimeDependentHamiltonian::add_spin_term(const SpinMatrix &spin, int mode, bool raising, Coefficient coefficient,
                                             bool paired) {
    if (mode >= static_cast<int>(modes_.size())) {
        throw Error(ErrorCode::InvalidArgument, "Hamiltonian term refers to a mode outside the space");
    }
    if (mode >= 0 && !paired) {
        throw Error(ErrorCode::InvalidArgument, "spin-motion terms must carry their Hermitian conjugate");
    }
    Term t;
    t.spin = spin;
    t.mode = mode;
    t.raising = raising;
    t.structured = true;
    t.paired = paired;
    t.coefficient = std::move(coefficient);
    t.op = embed(spin, static_cast<int>(modes_.size()), fock_dim_, mode, raising);
    if (paired) {
        t.op_adjoint = t.op.adjoint();
    }
    terms_.push_back(std::move(t));
}

void TimeDependentHamiltonian::add_operator(SparseMatrix op, Coefficient coefficient, bool paired) {
    if (op.rows() != dim_ || op.cols() != dim_) {
        throw Error(ErrorCode::InvalidDimension, "operator dimension does not match the Hamiltonian space");
    }
    Term t;
    t.spin = SpinMatrix::Zero();
    t.mode = -1;
    t.raising = false;
    t.structured = false;
    t.paired = paired;
    t.coefficient = std::move(coefficient);
    t.op = std::move(op);
    if (paired) {
        t.op_adjoint = t.op.adjoint();
    }
    terms_.push_back(std::move(t));
}

bool TimeDependentHamiltonian::structured() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term &t) { return t.structured; });
}

ComplexMatrix TimeDependentHamiltonian::dense_at(double t) const {
    ComplexMatrix h = ComplexMatrix::Zero(dim_, dim_);
    for (const auto &term : terms_) {
        Complex c = term.coefficient(t);
        h += c * ComplexMatrix(term.op);
        if (term.paired) {
            h += std::conj(c) * ComplexMatrix(term.op_adjoint);
        }
    }
    return h;
}

void TimeDependentHamiltonian::apply(double t, const ComplexMatrix &x, ComplexMatrix &y) const {
    y.setZero(x.rows(), x.cols());
    for (const auto &term : terms_) {
        Complex c = term.coefficient(t);
        if (c == Complex(0.0, 0.0)) {
            continue;
        }
        y.noalias() += c * (term.op * x);
        if (term.paired) {
            y.noalias() += std::conj(c) * (term.op_adjoint * x);
        }
    }
}

void TimeDependentHamiltonian::spin_coefficients(double t, std::vector<SpinMatrix> &a, SpinMatrix &b) const {
    a.assign(modes_.size(), SpinMatrix::Zero());
    b.setZero();
    for (const auto &term : terms_) {
        if (!term.structured) {
            throw Error(ErrorCode::InvalidArgument, "Hamiltonian has unstructured terms; no spin decomposition");
        }
        Complex c = term.coefficient(t);
        if (term.mode < 0) {
            b += c * term.spin;
            if (term.paired) {
                b += std::conj(c) * term.spin.adjoint();
            }
        } else if (!term.raising) {
            a[term.mode] += c * term.spin;
        } else {
            a[term.mode] += std::conj(c) * term.spin.adjoint();
        }
    }
}

double pulse_envelope(double t, double start, double duration, double ramp) {
    if (ramp < 0 || ramp > duration / 2 * (1 + 1e-12)) {
        throw Error(ErrorCode::RampTooLong, "pulse ramp must lie in [0, duration/2]");
    }
    double u = t - start;
    if (u < 0 || u > duration) {
        return 0.0;
    }
    if (ramp == 0.0) {
        return 1.0;
    }
    double edge = std::min(u, duration - u);
    if (edge >= ramp) {
        return 1.0;
    }
    double s = std::sin(kPi * edge / (2 * ramp));
    return s * s;
}

std::vector<ModeLabel> simulated_modes(const GateConfig &config, Level level) {
    if (config.mechanism == Mechanism::LightShift && level == Level::Full) {
        return {ModeLabel::InPhase, ModeLabel::OutOfPhase};
    }
    return {config.mode};
}

static SpinMatrix on_ion(int j, const ComplexMatrix &op) {
    ComplexMatrix full = j == 0 ? tensor({op, identity(2)}) : tensor({identity(2), op});
    return SpinMatrix(full);
}

static void add_offsets(TimeDependentHamiltonian &h, const GateConfig &config, const NoiseModel &noise,
                        bool beams_on) {
    for (int j = 0; j < 2; j++) {
        double hz = config.qubit_offset_hz[j] + noise.qubit_offset_hz[j] + (beams_on ? config.beam_shift_hz[j] : 0.0);
        if (hz == 0.0) {
            continue;
        }
        double w = kPi * hz;
        h.add_spin_term(on_ion(j, pauli_z()), -1, false, [w](double) { return Complex(w, 0.0); }, false);
    }
}

static void check_ramp(const SequenceElement &pulse, double ramp) {
    if (ramp < 0 || ramp > pulse.duration / 2 * (1 + 1e-12)) {
        throw Error(ErrorCode::RampTooLong, "pulse ramp must lie in [0, duration/2]");
    }
}

TimeDependentHamiltonian build_ms_hamiltonian(const GateConfig &config, const Crystal &crystal,
                                              const SequenceElement &pulse, const PropagationOptions &options,
                                              const NoiseModel &noise) {
    config.validate();
    if (config.mechanism != Mechanism::MolmerSorensen) {
        throw Error(ErrorCode::MechanismMismatch, "build_ms_hamiltonian called with an LS config");
    }
    check_ramp(pulse, options.ramp);
    auto modes = simulated_modes(config, options.level);
    TimeDependentHamiltonian h(modes, options.fock_dim, pulse.start, pulse.end());
    const MotionalMode &mode = crystal.mode(config.mode);
    double eps = kTwoPi * noise.mode_offset_hz;
    double delta_eff = config.detuning - eps;
    double w_mode = kTwoPi * mode.frequency_hz + eps;
    double w_tone = kTwoPi * mode.frequency_hz + config.detuning;
    double start = pulse.start;
    double duration = pulse.duration;
    double ramp = options.ramp;
    bool full = options.level == Level::Full;

    for (int j = 0; j < 2; j++) {
        double eta = mode.eta[j];
        double rabi = crystal.ions[j].rabi * config.amplitude_scale[j] * pulse.amplitude;
        double om_p = rabi * config.tone_scale[0];
        double om_m = rabi * config.tone_scale[1];
        double phi_p = config.phi_s[j] + config.phi_d[j] + pulse.tone_phase_shift[0];
        double phi_m = config.phi_s[j] - config.phi_d[j] + pulse.tone_phase_shift[1];
        SpinMatrix sp = on_ion(j, sigma_plus());
        if (rabi == 0.0) {
            continue;
        }
        Complex k = -kI * eta / 2.0;
        if (!full) {
            h.add_spin_term(sp, 0, false,
                            [=](double t) {
                                return k * om_m * std::polar(1.0, phi_m + delta_eff * t) *
                                       pulse_envelope(t, start, duration, ramp);
                            },
                            true);
            h.add_spin_term(sp, 0, true,
                            [=](double t) {
                                return k * om_p * std::polar(1.0, phi_p - delta_eff * t) *
                                       pulse_envelope(t, start, duration, ramp);
                            },
                            true);
        } else {
            double slow = w_tone - w_mode;
            double fast = w_tone + w_mode;
            h.add_spin_term(sp, 0, false,
                            [=](double t) {
                                return k *
                                       (om_m * std::polar(1.0, phi_m + slow * t) +
                                        om_p * std::polar(1.0, phi_p - fast * t)) *
                                       pulse_envelope(t, start, duration, ramp);
                            },
                            true);
            h.add_spin_term(sp, 0, true,
                            [=](double t) {
                                return k *
                                       (om_p * std::polar(1.0, phi_p - slow * t) +
                                        om_m * std::polar(1.0, phi_m + fast * t)) *
                                       pulse_envelope(t, start, duration, ramp);
                            },
                            true);
            h.add_spin_term(sp, -1, false,
                            [=](double t) {
                                return -0.5 *
                                       (om_p * std::polar(1.0, phi_p - w_tone * t) +
                                        om_m * std::polar(1.0, phi_m + w_tone * t)) *
                                       pulse_envelope(t, start, duration, ramp);
                            },
                            true);
        }
    }
    add_offsets(h, config, noise, true);
    return h;
}

TimeDependentHamiltonian build_ls_hamiltonian(const GateConfig &config, const Crystal &crystal,
                                              const SequenceElement &pulse, const PropagationOptions &options,
                                              const NoiseModel &noise) {
    config.validate();
    if (config.mechanism != Mechanism::LightShift) {
        throw Error(ErrorCode::MechanismMismatch, "build_ls_hamiltonian called with an MS config");
    }
    check_ramp(pulse, options.ramp);
    auto modes = simulated_modes(config, options.level);
    TimeDependentHamiltonian h(modes, options.fock_dim, pulse.start, pulse.end());
    const MotionalMode &addressed = crystal.mode(config.mode);
    double eps = kTwoPi * noise.mode_offset_hz;
    double delta_eff = config.detuning - eps;
    double w_drive = kTwoPi * addressed.frequency_hz + config.detuning;
    double phi0 = config.phi0 + pulse.phase_shift;
    double start = pulse.start;
    double duration = pulse.duration;
    double ramp = options.ramp;

    for (int j = 0; j < 2; j++) {
        const IonSpec &ion = crystal.ions[j];
        double amp = config.amplitude_scale[j] * pulse.amplitude;
        ComplexMatrix d1 = ComplexMatrix::Zero(2, 2);
        d1(0, 0) = ion.shift_up * amp;
        d1(1, 1) = ion.shift_down * amp;
        if (d1.cwiseAbs().maxCoeff() == 0.0) {
            continue;
        }
        SpinMatrix d = on_ion(j, d1);
        double phi_zj = j == 0 ? 0.0 : config.phi_z;
        if (options.level == Level::Rwa) {
            double eta = addressed.eta[j];
            h.add_spin_term(d, 0, false,
                            [=](double t) {
                                return 0.5 * kI * eta * std::polar(1.0, delta_eff * t - phi0 + phi_zj) *
                                       pulse_envelope(t, start, duration, ramp);
                            },
                            true);
        } else {
            h.add_spin_term(d, -1, false,
                            [=](double t) {
                                return Complex(-std::cos(w_drive * t - phi0 + phi_zj) *
                                                   pulse_envelope(t, start, duration, ramp),
                                               0.0);
                            },
                            false);
            for (int k = 0; k < static_cast<int>(modes.size()); k++) {
                const MotionalMode &m = crystal.mode(modes[k]);
                double eta = m.eta[j];
                double w_m = kTwoPi * m.frequency_hz + eps;
                h.add_spin_term(d, k, false,
                                [=](double t) {
                                    return -eta * std::sin(w_drive * t - phi0 + phi_zj) * std::polar(1.0, -w_m * t) *
                                           pulse_envelope(t, start, duration, ramp);
                                },
                                true);
            }
        }
    }
    add_offsets(h, config, noise, true);
    return h;
}

TimeDependentHamiltonian build_idle_hamiltonian(const GateConfig &config, const std::vector<ModeLabel> &modes,
                                                int fock_dim, double t_begin, double t_end, const NoiseModel &noise) {
    TimeDependentHamiltonian h(modes, fock_dim, t_begin, t_end);
    add_offsets(h, config, noise, false);
    return h;
}

namespace {

struct Jump {
    SparseMatrix a;
    SparseMatrix ad;
    // (rate / 2) (a^dag a + a a^dag)
    SparseMatrix k;
    double rate;
};

class Integrator {
   public:
    Integrator(const TimeDependentHamiltonian &h, std::vector<Jump> jumps, bool density)
        : h_(h), jumps_(std::move(jumps)), density_(density) {
    }

    void derivative(double t, const ComplexMatrix &x, ComplexMatrix &out) {
        h_.apply(t, x, hx_);
        if (!density_) {
            out = -kI * hx_;
            return;
        }
        out = -kI * (hx_ - hx_.adjoint());
        for (const auto &j : jumps_) {
            tmp_ = j.a * x;
            out.noalias() += j.rate * (j.a * tmp_.adjoint());
            tmp_ = j.ad * x;
            out.noalias() += j.rate * (j.ad * tmp_.adjoint());
            tmp_ = j.k * x;
            out -= tmp_;
            out -= tmp_.adjoint();
        }
    }

    void step(double t, double dt, ComplexMatrix &x) {
        derivative(t, x, k1_);
        y_ = x + (dt / 2) * k1_;
        derivative(t + dt / 2, y_, k2_);
        y_ = x + (dt / 2) * k2_;
        derivative(t + dt / 2, y_, k3_);
        y_ = x + dt * k3_;
        derivative(t + dt, y_, k4_);
        x += (dt / 6) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
        if (density_) {
            y_ = x.adjoint();
            x = 0.5 * (x + y_);
        }
    }

   private:
    const TimeDependentHamiltonian &h_;
    std::vector<Jump> jumps_;
    bool density_;
    ComplexMatrix hx_, tmp_, k1_, k2_, k3_, k4_, y_;
};

}  // namespace

Propagation propagate(const TimeDependentHamiltonian &h, const ComplexMatrix &state, double t0, double t1,
                      const PropagationOptions &options, const NoiseModel &noise) {
    if (!(options.step > 0)) {
        throw Error(ErrorCode::InvalidArgument, "propagate needs a positive integrator step");
    }
    if (state.rows() != h.dim()) {
        throw Error(ErrorCode::InvalidDimension, "state dimension does not match the Hamiltonian");
    }
    std::vector<Jump> jumps;
    int n_modes = static_cast<int>(h.modes().size());
    for (int k = 0; k < n_modes; k++) {
        double rate = noise.heating_rate[mode_index(h.modes()[k])];
        if (rate < 0) {
            throw Error(ErrorCode::InvalidArgument, "heating rate must be non-negative");
        }
        if (rate > 0) {
            Jump j;
            j.a = lowering_on(n_modes, h.fock_dim(), k);
            j.ad = j.a.adjoint();
            j.k = SparseMatrix(0.5 * rate * (j.ad * j.a + j.a * j.ad));
            j.rate = rate;
            jumps.push_back(std::move(j));
        }
    }
    bool density = state.cols() != 1;
    Propagation out;
    out.state = state;
    if (!density && (options.master_equation || !jumps.empty())) {
        out.state = state * state.adjoint();
        density = true;
    }
    if (density && state.cols() != state.rows() && state.cols() != 1) {
        throw Error(ErrorCode::InvalidDimension, "density matrix must be square");
    }

    std::vector<double> stops;
    for (double s : options.sample_times) {
        if (s > t0 && s < t1) {
            stops.push_back(s);
        }
    }
    std::sort(stops.begin(), stops.end());
    stops.push_back(t1);
    bool sample_end = std::any_of(options.sample_times.begin(), options.sample_times.end(),
                                  [&](double s) { return s == t1 && t1 > t0; });

    Integrator integ(h, std::move(jumps), density);
    double t = t0;
    for (size_t si = 0; si < stops.size(); si++) {
        double b = stops[si];
        double len = b - t;
        if (len > 0) {
            long n = std::max(1L, static_cast<long>(std::ceil(len / options.step - 1e-9)));
            double dt = len / static_cast<double>(n);
            for (long i = 0; i < n; i++) {
                integ.step(t + static_cast<double>(i) * dt, dt, out.state);
            }
            t = b;
        }
        bool is_sample = si + 1 < stops.size() || sample_end;
        if (is_sample) {
            out.times.push_back(b);
            out.samples.push_back(out.state);
        }
    }

    double deviation;
    if (density) {
        deviation = std::abs(out.state.trace() - Complex(1.0, 0.0));
    } else {
        deviation = std::abs(out.state.squaredNorm() - 1.0);
    }
    if (!std::isfinite(deviation) || deviation > 1e-6) {
        std::ostringstream msg;
        msg << "integrator step " << options.step << " s too large: norm drifted by " << deviation << " over ["
            << t0 << ", " << t1 << "] s";
        throw Error(ErrorCode::StepSize, msg.str());
    }
    return out;
}

InitialState spin_product_state(int q1, int q2) {
    if (q1 < 0 || q1 > 1 || q2 < 0 || q2 > 1) {
        throw Error(ErrorCode::InvalidArgument, "qubit basis index must be 0 or 1");
    }
    InitialState s;
    s.spin(2 * q1 + q2) = 1.0;
    return s;
}

std::array<double, 4> level_populations(const ComplexMatrix &rho2) {
    return {std::real(rho2(3, 3)), std::real(rho2(2, 2)), std::real(rho2(1, 1)), std::real(rho2(0, 0))};
}

namespace {

ComplexMatrix reduce_to_qubits(const ComplexMatrix &state, Eigen::Index motion_dim) {
    if (state.cols() == 1) {
        Eigen::Map<const ComplexMatrix> m(state.data(), motion_dim, 4);
        return m.transpose() * m.conjugate();
    }
    ComplexMatrix r = ComplexMatrix::Zero(4, 4);
    for (int s = 0; s < 4; s++) {
        for (int u = 0; u < 4; u++) {
            r(s, u) = state.block(s * motion_dim, u * motion_dim, motion_dim, motion_dim).trace();
        }
    }
    return r;
}

std::vector<double> fock_numbers(int n_modes, int fock_dim, int mode) {
    int motion = int_pow(fock_dim, n_modes);
    int stride = int_pow(fock_dim, n_modes - 1 - mode);
    std::vector<double> out(4 * motion);
    for (int i = 0; i < 4 * motion; i++) {
        out[i] = static_cast<double>((i % motion) / stride % fock_dim);
    }
    return out;
}

double mean_number(const ComplexMatrix &state, const std::vector<double> &numbers) {
    double acc = 0;
    for (Eigen::Index i = 0; i < state.rows(); i++) {
        double p = state.cols() == 1 ? std::norm(state(i, 0)) : std::real(state(i, i));
        acc += p * numbers[i];
    }
    return acc;
}

ComplexMatrix thermal_state(int fock_dim, double nbar) {
    ComplexMatrix r = ComplexMatrix::Zero(fock_dim, fock_dim);
    double total = 0;
    for (int n = 0; n < fock_dim; n++) {
        double p = nbar == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::pow(nbar, n) / std::pow(nbar + 1, n + 1);
        r(n, n) = p;
        total += p;
    }
    return r / total;
}

ComplexMatrix apply_spin_unitary(const ComplexMatrix &u4, const ComplexMatrix &state, Eigen::Index motion_dim) {
    ComplexMatrix u = tensor({u4, identity(static_cast<int>(motion_dim))});
    if (state.cols() == 1) {
        return u * state;
    }
    return u * state * u.adjoint();
}

}  // namespace

static ComplexMatrix initial_full_state(const InitialState &initial, int n_modes, int fock_dim) {
    Eigen::Index motion = int_pow(fock_dim, n_modes);
    double norm = initial.spin.norm();
    if (norm == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "initial spin state is zero");
    }
    Eigen::Vector4cd spin = initial.spin / norm;
    if (initial.thermal_nbar == 0.0) {
        ComplexMatrix psi = ComplexMatrix::Zero(4 * motion, 1);
        for (int s = 0; s < 4; s++) {
            psi(s * motion, 0) = spin(s);
        }
        return psi;
    }
    std::vector<ComplexMatrix> factors{ComplexMatrix(spin * spin.adjoint())};
    for (int k = 0; k < n_modes; k++) {
        factors.push_back(thermal_state(fock_dim, initial.thermal_nbar));
    }
    return tensor(factors);
}

SimOutcome simulate_gate(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                         const InitialState &initial, const PropagationOptions &options, const NoiseModel &noise) {
    config.validate();
    seq.validate();
    if (seq.mechanism != config.mechanism) {
        throw Error(ErrorCode::MechanismMismatch, "sequence and config use different gate mechanisms");
    }
    PropagationOptions opts = options;
    opts.step = options.resolved_step(crystal);
    auto modes = simulated_modes(config, opts.level);
    int n_modes = static_cast<int>(modes.size());
    Eigen::Index motion = int_pow(opts.fock_dim, n_modes);
    int addressed = 0;
    for (int k = 0; k < n_modes; k++) {
        if (modes[k] == config.mode) {
            addressed = k;
        }
    }
    auto numbers = fock_numbers(n_modes, opts.fock_dim, addressed);

    std::vector<double> sample_times = opts.sample_times;
    std::sort(sample_times.begin(), sample_times.end());
    size_t n_samples = sample_times.size();

    int repetitions = noise.randomize_phi0 ? std::max(1, noise.phi0_samples) : 1;
    std::mt19937_64 rng(noise.seed);
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);

    SimOutcome out;
    out.rho = ComplexMatrix::Zero(4, 4);
    out.times = sample_times;
    out.populations.assign(n_samples, {0, 0, 0, 0});
    out.mean_phonons.assign(n_samples, 0.0);

    for (int rep = 0; rep < repetitions; rep++) {
        double random_phase = noise.randomize_phi0 ? uniform(rng) : 0.0;
        ComplexMatrix state = initial_full_state(initial, n_modes, opts.fock_dim);
        std::vector<ComplexMatrix> recorded(n_samples);
        std::vector<bool> done(n_samples, false);
        auto record = [&](double t, const ComplexMatrix &s) {
            for (size_t i = 0; i < n_samples; i++) {
                if (!done[i] && sample_times[i] == t) {
                    recorded[i] = s;
                    done[i] = true;
                }
            }
        };
        auto run = [&](const TimeDependentHamiltonian &h, double a, double b) {
            if (b <= a) {
                return;
            }
            Propagation p = propagate(h, state, a, b, opts, noise);
            for (size_t i = 0; i < p.times.size(); i++) {
                record(p.times[i], p.samples[i]);
            }
            state = std::move(p.state);
        };
        auto idle = [&](double a, double b) {
            if (b <= a) {
                return;
            }
            auto h = build_idle_hamiltonian(config, modes, opts.fock_dim, a, b, noise);
            run(h, a, b);
        };

        double t = 0.0;
        for (double s : sample_times) {
            if (s <= t) {
                record(s, state);
            }
        }
        for (const auto &el : seq.elements) {
            idle(t, el.start);
            t = std::max(t, el.start);
            if (el.kind == ElementKind::GatePulse) {
                SequenceElement pulse = el;
                if (config.mechanism == Mechanism::LightShift) {
                    pulse.phase_shift += random_phase;
                    run(build_ls_hamiltonian(config, crystal, pulse, opts, noise), el.start, el.end());
                } else {
                    pulse.tone_phase_shift[0] += random_phase;
                    pulse.tone_phase_shift[1] -= random_phase;
                    run(build_ms_hamiltonian(config, crystal, pulse, opts, noise), el.start, el.end());
                }
            } else if (el.kind == ElementKind::Rotation) {
                ComplexMatrix u = rotation_unitary(el, seq, config);
                if (el.duration == 0.0) {
                    state = apply_spin_unitary(u, state, motion);
                } else {
                    SpinMatrix g = SpinMatrix(rotation_generator(el, seq, config)) / el.duration;
                    TimeDependentHamiltonian h(modes, opts.fock_dim, el.start, el.end());
                    h.add_spin_term(g, -1, false, [](double) { return Complex(1.0, 0.0); }, false);
                    add_offsets(h, config, noise, false);
                    run(h, el.start, el.end());
                }
            } else {
                idle(el.start, el.end());
            }
            t = std::max(t, el.end());
        }
        idle(t, seq.total_duration);
        t = std::max(t, seq.total_duration);

        ComplexMatrix rho2 = reduce_to_qubits(state, motion);
        out.rho += rho2 / static_cast<double>(repetitions);
        for (size_t i = 0; i < n_samples; i++) {
            const ComplexMatrix &s = done[i] ? recorded[i] : state;
            auto p = level_populations(reduce_to_qubits(s, motion));
            for (int k = 0; k < 4; k++) {
                out.populations[i][k] += p[k] / repetitions;
            }
            out.mean_phonons[i] += mean_number(s, numbers) / repetitions;
        }
        out.final_mean_phonons += mean_number(state, numbers) / repetitions;
        if (rep == 0) {
            out.full_state = state;
        }
    }
    return out;
}

}  // namespace mixgate
