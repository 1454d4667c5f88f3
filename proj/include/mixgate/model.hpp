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

#ifndef MIXGATE_MODEL_HPP
#define MIXGATE_MODEL_HPP

#include <array>
#include <numbers>
#include <string>

namespace mixgate {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kAtomicMass = 1.66053906660e-27;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPlanck = 6.62607015e-34;

inline constexpr double kMassCa43 = 42.958766;
inline constexpr double kMassSr88 = 87.905612;

/// Frequency gap between the two species' Raman reference transitions.
inline constexpr double kSpeciesOffsetHz = 20.2e12;

enum class Mechanism { LightShift, MolmerSorensen };
enum class ModeLabel { InPhase, OutOfPhase };

const char *mechanism_name(Mechanism m);
const char *mode_name(ModeLabel m);
inline int mode_index(ModeLabel m) {
    return m == ModeLabel::InPhase ? 0 : 1;
}

struct QubitSpec {
    std::string label;
    double f0_hz = 0.0;
    double sensitivity_hz_per_gauss = 0.0;
    double offset_hz = 0.0;
};

QubitSpec ca43_stretch_qubit();
QubitSpec ca43_clock_qubit();
QubitSpec sr88_zeeman_qubit();

struct IonSpec {
    std::string species;
    double mass_amu = 0.0;
    QubitSpec qubit;
    // Carrier Rabi frequency of each bichromatic tone (MS), rad/s.
    double rabi = 0.0;
    // Light shifts of the upper and lower qubit state (LS), rad/s.
    double shift_up = 0.0;
    double shift_down = 0.0;
};

struct MotionalMode {
    ModeLabel label = ModeLabel::InPhase;
    double frequency_hz = 0.0;
    // Mass-weighted mode vector, first element positive.
    std::array<double, 2> vector{};
    std::array<double, 2> eta{};
    double heating_rate = 0.0;
};

struct Crystal {
    std::array<IonSpec, 2> ions;
    std::array<MotionalMode, 2> modes;  // ip, oop

    const MotionalMode &mode(ModeLabel label) const {
        return modes[mode_index(label)];
    }
    std::array<double, 2> masses() const {
        return {ions[0].mass_amu, ions[1].mass_amu};
    }
};

/// Axial normal modes of a two-ion string. f_single is the axial frequency of ion 1 alone.
std::array<MotionalMode, 2> axial_normal_modes(double m1_amu, double m2_amu, double f_single_hz);

/// eta_j = dk * b_j * sqrt(hbar / (2 m_j omega)).
std::array<double, 2> lamb_dicke(const MotionalMode &mode, std::array<double, 2> masses_amu, double delta_k);

double qubit_offset_from_field(const QubitSpec &qubit, double delta_b_gauss);

/// Travelling standing-wave phase difference between ions, reduced to [0, 2 pi).
double standing_wave_phase(double spacing_m, double delta_k);

/// Two beams crossing at 90 degrees: |dk| = sqrt(2) * 2 pi / lambda.
double default_delta_k(double wavelength_m = 402e-9);

struct CrystalOptions {
    double ip_frequency_hz = 1.49e6;
    double delta_k = default_delta_k();
    double heating_ip = 93.0;
    double heating_oop = 27.0;
    bool ca_clock_qubit = false;
    // Replace the true mode vectors by (1, +-1)/sqrt(2).
    bool ideal_mode_vectors = false;
};

/// 43Ca+ (ion 1) and 88Sr+ (ion 2) with the axial modes scaled to the given ip frequency.
Crystal ca_sr_crystal(const CrystalOptions &options = {});
/// Two ions of the same species; used for textbook comparisons.
/// Same MS Rabi frequency on both ions and LS shifts +-shift/2 on the qubit states.
void set_uniform_drive(Crystal &crystal, double rabi, double differential_shift);

Crystal same_species_crystal(double mass_amu, double f_single_hz, double delta_k, const QubitSpec &qubit);

struct GateConfig {
    Mechanism mechanism = Mechanism::LightShift;
    ModeLabel mode = ModeLabel::OutOfPhase;
    // Gate detuning delta_g, rad/s.
    double detuning = 0.0;
    int loops = 1;
    // LS phases.
    double phi0 = 0.0;
    double phi_z = 0.0;
    // MS sum and difference phases per ion.
    std::array<double, 2> phi_s{};
    std::array<double, 2> phi_d{};
    std::array<double, 2> amplitude_scale{1.0, 1.0};
    // MS (+, -) tone amplitude factors.
    std::array<double, 2> tone_scale{1.0, 1.0};
    std::array<double, 2> qubit_offset_hz{};
    // Light shift from the other species' beams, present only while beams are on.
    std::array<double, 2> beam_shift_hz{};
    double raman_detuning_ca_hz = -9.0e12;
    double raman_detuning_sr_hz = -9.0e12 + kSpeciesOffsetHz;

    void validate() const;
    double loop_duration() const;
    double gate_duration() const {
        return loops * loop_duration();
    }
};

/// Copy of the config with both per-ion amplitude scales multiplied by factor.
GateConfig scaled(const GateConfig &config, double factor);

}  // namespace mixgate

#endif
