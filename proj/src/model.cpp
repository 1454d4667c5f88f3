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

#include "mixgate/model.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "mixgate/error.hpp"

namespace mixgate {

const char *mechanism_name(Mechanism m) {
    return m == Mechanism::LightShift ? "LS" : "MS";
}

const char *mode_name(ModeLabel m) {
    return m == ModeLabel::InPhase ? "ip" : "oop";
}

QubitSpec ca43_stretch_qubit() {
    return {"Ca-stretch", 2.874e9, -2.36e6, 0.0};
}

QubitSpec ca43_clock_qubit() {
    return {"Ca-clock", 3.200e9, 0.0, 0.0};
}

QubitSpec sr88_zeeman_qubit() {
    return {"Sr-Zeeman", 409e6, 2.80e6, 0.0};
}

std::array<MotionalMode, 2> axial_normal_modes(double m1_amu, double m2_amu, double f_single_hz) {
    if (!(m1_amu > 0) || !(m2_amu > 0) || !(f_single_hz > 0)) {
        throw Error(ErrorCode::InvalidArgument, "axial_normal_modes needs positive masses and frequency");
    }
    // Both ions feel the same trap curvature k = m1 w1^2; linearised Coulomb
    // coupling gives the stiffness k [[2, -1], [-1, 2]].
    double w1 = kTwoPi * f_single_hz;
    double k = m1_amu * w1 * w1;
    Eigen::Matrix2d stiff;
    stiff << 2 * k, -k, -k, 2 * k;
    Eigen::Vector2d inv_sqrt_m(1 / std::sqrt(m1_amu), 1 / std::sqrt(m2_amu));
    Eigen::Matrix2d dyn = inv_sqrt_m.asDiagonal() * stiff * inv_sqrt_m.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(dyn);

    std::array<MotionalMode, 2> out;
    for (int m = 0; m < 2; m++) {
        Eigen::Vector2d v = es.eigenvectors().col(m).normalized();
        if (v(0) < 0) {
            v = -v;
        }
        out[m].label = m == 0 ? ModeLabel::InPhase : ModeLabel::OutOfPhase;
        out[m].frequency_hz = std::sqrt(es.eigenvalues()(m)) / kTwoPi;
        out[m].vector = {v(0), v(1)};
    }
    return out;
}

std::array<double, 2> lamb_dicke(const MotionalMode &mode, std::array<double, 2> masses_amu, double delta_k) {
    if (!(delta_k > 0)) {
        throw Error(ErrorCode::InvalidArgument, "lamb_dicke needs a positive wavevector difference");
    }
    double omega = kTwoPi * mode.frequency_hz;
    std::array<double, 2> eta{};
    for (int j = 0; j < 2; j++) {
        eta[j] = delta_k * mode.vector[j] * std::sqrt(kHbar / (2 * masses_amu[j] * kAtomicMass * omega));
    }
    return eta;
}

double qubit_offset_from_field(const QubitSpec &qubit, double delta_b_gauss) {
    return qubit.sensitivity_hz_per_gauss * delta_b_gauss;
}

double standing_wave_phase(double spacing_m, double delta_k) {
    if (!(spacing_m > 0)) {
        throw Error(ErrorCode::InvalidArgument, "ion spacing must be positive");
    }
    double phi = std::fmod(delta_k * spacing_m, kTwoPi);
    if (phi < 0) {
        phi += kTwoPi;
    }
    // Snap values within rounding of a full turn back to zero.
    if (kTwoPi - phi < 1e-9) {
        phi = 0.0;
    }
    return phi;
}

double default_delta_k(double wavelength_m) {
    return std::sqrt(2.0) * kTwoPi / wavelength_m;
}

static void attach_eta(Crystal &c, double delta_k, bool ideal) {
    for (auto &mode : c.modes) {
        if (ideal) {
            double s = 1 / std::sqrt(2.0);
            mode.vector = {s, mode.label == ModeLabel::InPhase ? s : -s};
        }
        mode.eta = lamb_dicke(mode, c.masses(), delta_k);
    }
}

Crystal ca_sr_crystal(const CrystalOptions &options) {
    Crystal c;
    c.ions[0] = {"Ca43", kMassCa43, options.ca_clock_qubit ? ca43_clock_qubit() : ca43_stretch_qubit()};
    c.ions[1] = {"Sr88", kMassSr88, sr88_zeeman_qubit()};
    // The ip frequency is linear in the single-ion frequency, so one probe fixes the scale.
    auto probe = axial_normal_modes(kMassCa43, kMassSr88, 1.0e6);
    double f_single = 1.0e6 * options.ip_frequency_hz / probe[0].frequency_hz;
    c.modes = axial_normal_modes(kMassCa43, kMassSr88, f_single);
    c.modes[0].heating_rate = options.heating_ip;
    c.modes[1].heating_rate = options.heating_oop;
    attach_eta(c, options.delta_k, options.ideal_mode_vectors);
    return c;
}

void set_uniform_drive(Crystal &crystal, double rabi, double differential_shift) {
    for (auto &ion : crystal.ions) {
        ion.rabi = rabi;
        ion.shift_up = differential_shift / 2;
        ion.shift_down = -differential_shift / 2;
    }
}

Crystal same_species_crystal(double mass_amu, double f_single_hz, double delta_k, const QubitSpec &qubit) {
    Crystal c;
    c.ions[0] = {"ion", mass_amu, qubit};
    c.ions[1] = c.ions[0];
    c.modes = axial_normal_modes(mass_amu, mass_amu, f_single_hz);
    attach_eta(c, delta_k, false);
    return c;
}

void GateConfig::validate() const {
    if (detuning == 0.0) {
        throw Error(ErrorCode::ResonantDrive, "resonant drive: gate detuning must be nonzero");
    }
    if (!std::isfinite(detuning)) {
        throw Error(ErrorCode::InvalidArgument, "gate detuning must be finite");
    }
    if (loops < 1) {
        throw Error(ErrorCode::InvalidArgument, "loop count must be at least 1");
    }
    for (int j = 0; j < 2; j++) {
        if (!(amplitude_scale[j] >= 0) || !(tone_scale[j] >= 0)) {
            throw Error(ErrorCode::InvalidArgument, "amplitude scales must be non-negative");
        }
    }
    if (mechanism == Mechanism::LightShift) {
        if (tone_scale[0] != 1.0 || tone_scale[1] != 1.0 || phi_s[0] != 0.0 || phi_s[1] != 0.0 || phi_d[0] != 0.0 ||
            phi_d[1] != 0.0) {
            throw Error(ErrorCode::MechanismMismatch, "LS gate configured with MS tone settings");
        }
    } else if (phi_z != 0.0 || phi0 != 0.0) {
        throw Error(ErrorCode::MechanismMismatch, "MS gate configured with LS standing-wave phases");
    }
}

double GateConfig::loop_duration() const {
    if (detuning == 0.0) {
        throw Error(ErrorCode::ResonantDrive, "resonant drive: gate detuning must be nonzero");
    }
    return kTwoPi / std::abs(detuning);
}

GateConfig scaled(const GateConfig &config, double factor) {
    GateConfig out = config;
    out.amplitude_scale[0] *= factor;
    out.amplitude_scale[1] *= factor;
    return out;
}

}  // namespace mixgate
