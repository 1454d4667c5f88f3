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

#include "mixgate/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixgate/error.hpp"

namespace mixgate {

static void require_detuning(double delta) {
    if (delta == 0.0) {
        throw Error(ErrorCode::ResonantDrive, "resonant drive: gate detuning must be nonzero");
    }
}

std::array<BranchForce, 4> branch_forces(const GateConfig &config, const Crystal &crystal) {
    config.validate();
    const MotionalMode &mode = crystal.mode(config.mode);
    std::array<BranchForce, 4> out;
    for (int b = 0; b < 4; b++) {
        auto z = kBranchLabels[b];
        Complex f = 0;
        if (config.mechanism == Mechanism::LightShift) {
            for (int j = 0; j < 2; j++) {
                const IonSpec &ion = crystal.ions[j];
                double shift = (z[j] > 0 ? ion.shift_up : ion.shift_down) * config.amplitude_scale[j];
                Complex phase = j == 0 ? Complex(1.0) : std::polar(1.0, config.phi_z);
                f += mode.eta[j] * shift * phase;
            }
        } else {
            double tone = 0.5 * (config.tone_scale[0] + config.tone_scale[1]);
            for (int j = 0; j < 2; j++) {
                double rabi = crystal.ions[j].rabi * config.amplitude_scale[j] * tone;
                f += static_cast<double>(z[j]) * mode.eta[j] * rabi * std::polar(1.0, -config.phi_d[j]);
            }
        }
        out[b] = {z, f};
    }
    return out;
}

Complex displacement_at(Complex f, double delta, double t, double phi0) {
    require_detuning(delta);
    return std::conj(f) * std::polar(1.0, phi0) * (std::polar(1.0, -delta * t) - 1.0) / (2 * delta);
}

double branch_phase_at(Complex f, double delta, double t) {
    require_detuning(delta);
    return -std::norm(f) * (t - std::sin(delta * t) / delta) / (4 * delta);
}

double loop_phase(Complex f, double delta) {
    require_detuning(delta);
    return -(delta > 0 ? 1.0 : -1.0) * kPi * std::norm(f) / (2 * delta * delta);
}

BranchTrajectory trajectory(Complex f, double delta, const std::vector<double> &times, double phi0) {
    require_detuning(delta);
    BranchTrajectory out;
    out.times = times;
    out.alpha.reserve(times.size());
    out.phase.reserve(times.size());
    for (double t : times) {
        out.alpha.push_back(displacement_at(f, delta, t, phi0));
        out.phase.push_back(branch_phase_at(f, delta, t));
    }
    return out;
}

BranchPhases branch_phases(const GateConfig &config, const Crystal &crystal) {
    auto forces = branch_forces(config, crystal);
    BranchPhases out;
    for (int b = 0; b < 4; b++) {
        out[b] = config.loops * loop_phase(forces[b].force, config.detuning);
    }
    return out;
}

PhaseDecomposition phase_decomposition(const BranchPhases &p) {
    PhaseDecomposition d;
    d.psi = (p[0] - p[1] - p[2] + p[3]) / 2;
    d.theta1 = (p[0] + p[1] - p[2] - p[3]) / 2;
    d.theta2 = (p[0] - p[1] + p[2] - p[3]) / 2;
    d.global = (p[0] + p[1] + p[2] + p[3]) / 2;
    return d;
}

BranchPhases reconstruct_phases(const PhaseDecomposition &d) {
    BranchPhases out;
    for (int b = 0; b < 4; b++) {
        double z1 = kBranchLabels[b][0];
        double z2 = kBranchLabels[b][1];
        out[b] = (d.global + d.theta1 * z1 + d.theta2 * z2 + d.psi * z1 * z2) / 2;
    }
    return out;
}

double gate_efficiency(const BranchPhases &p) {
    double even = (p[0] + p[3]) / 2;
    double odd = (p[1] + p[2]) / 2;
    double den = odd + even;
    if (den == 0.0 || std::abs(den) <= 1e-15 * (std::abs(odd) + std::abs(even))) {
        throw Error(ErrorCode::UndefinedEfficiency, "gate efficiency undefined: parity phases sum to zero");
    }
    return (odd - even) / den;
}

double calibrate_amplitude(const GateConfig &config, const Crystal &crystal, double target) {
    auto phases = branch_phases(config, crystal);
    double psi = phase_decomposition(phases).psi;
    double scale = 0;
    for (double p : phases) {
        scale = std::max(scale, std::abs(p));
    }
    if (psi == 0.0 || std::abs(psi) <= 1e-14 * scale) {
        throw Error(ErrorCode::Uncalibratable, "cannot calibrate: the entangling phase vanishes (zeta = 0)");
    }
    return std::sqrt(std::abs(target) / std::abs(psi));
}

ComplexMatrix gate_basis(const GateConfig &config) {
    std::array<ComplexMatrix, 2> per_ion;
    for (int j = 0; j < 2; j++) {
        ComplexMatrix v = ComplexMatrix::Zero(2, 2);
        if (config.mechanism == Mechanism::LightShift) {
            v(0, 0) = 1;
            v(1, 1) = 1;
        } else {
            // +-1 eigenvectors of sigma_theta, theta = pi/2 - phi_s.
            Complex e = std::polar(1.0, kPi / 2 - config.phi_s[j]);
            double s = 1 / std::sqrt(2.0);
            v(0, 0) = s;
            v(1, 0) = s * e;
            v(0, 1) = s;
            v(1, 1) = -s * e;
        }
        per_ion[j] = v;
    }
    ComplexMatrix basis(4, 4);
    for (int b = 0; b < 4; b++) {
        int c1 = kBranchLabels[b][0] > 0 ? 0 : 1;
        int c2 = kBranchLabels[b][1] > 0 ? 0 : 1;
        basis.col(b) = tensor({per_ion[0].col(c1), per_ion[1].col(c2)});
    }
    return basis;
}

ComplexMatrix ideal_gate_unitary(const GateConfig &config, const Crystal &crystal) {
    auto phases = branch_phases(config, crystal);
    ComplexMatrix basis = gate_basis(config);
    ComplexMatrix diag = ComplexMatrix::Zero(4, 4);
    for (int b = 0; b < 4; b++) {
        diag(b, b) = std::polar(1.0, phases[b]);
    }
    return basis * diag * basis.adjoint();
}

ComplexMatrix ideal_gate_unitary(const GateConfig &config, const Crystal &crystal, double duration) {
    double loops = duration / config.loop_duration();
    long n = std::lround(loops);
    if (n < 1 || std::abs(loops - static_cast<double>(n)) > 1e-9) {
        throw Error(ErrorCode::NonClosing,
                    "pulse of " + std::to_string(duration) +
                        " s does not close the motional loops; use the dynamics module for open trajectories");
    }
    GateConfig c = config;
    c.loops = static_cast<int>(n);
    return ideal_gate_unitary(c, crystal);
}

}  // namespace mixgate
