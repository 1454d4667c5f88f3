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

#ifndef MIXGATE_BUDGET_HPP
#define MIXGATE_BUDGET_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mixgate/dynamics.hpp"
#include "mixgate/model.hpp"
#include "mixgate/options.hpp"

namespace mixgate {

struct SpeciesOptics {
    std::string name;
    // Natural linewidth of the near-resonant transition, rad/s.
    double linewidth = 0.0;
    double wavelength_m = 0.0;
    // Omega = rabi_coefficient * Gamma^2 s / (4 |2 pi Delta|).
    double rabi_coefficient = 0.2;
    // R = scatter_coefficient * Gamma^3 s / (4 (2 pi Delta)^2).
    double scatter_coefficient = 1.0;
};

SpeciesOptics ca_optics();
SpeciesOptics sr_optics();

struct ScatteringModel {
    // Ion order of the crystal.
    std::array<SpeciesOptics, 2> species{ca_optics(), sr_optics()};
    double power_w = 0.070;
    double beam_radius_m = 25e-6;
    // Delta_2 = Delta_1 + species_offset_hz.
    double species_offset_hz = kSpeciesOffsetHz;
    // Loops of the budget gate (LS Walsh-2: 2).
    int loops = 2;
    // eps_closure = closure_coefficient / |zeta|.
    double closure_coefficient = 1e-4;
};

/// I / I_sat for a Gaussian beam of the given power and 1/e^2 radius.
double saturation_parameter(const SpeciesOptics &optics, double power_w, double radius_m);

/// Differential light shift (LS) or two-photon Rabi frequency, rad/s.
double rabi_vs_detuning(double delta_hz, double power_w, double radius_m, const SpeciesOptics &optics);
double scattering_rate(double delta_hz, double power_w, double radius_m, const SpeciesOptics &optics);

/// Per-species scattering error R_j t_g.
std::array<double, 2> scattering_error(double delta_1_hz, double gate_time, const ScatteringModel &model);

/// Operating point of the budget gate at one Raman detuning: drive strengths from the
/// beam power, gate detuning chosen so that |psi| = pi/2 over model.loops loops.
struct BudgetGate {
    double delta_1_hz = 0.0;
    std::array<double, 2> shift{};
    double detuning = 0.0;
    double gate_time = 0.0;
    double zeta = 0.0;
    GateConfig config;
    Crystal crystal;
};

BudgetGate budget_gate(double delta_1_hz, ModeLabel mode, const Crystal &crystal, const ScatteringModel &model);

struct HeatingOptions {
    int fock_dim = 8;
    // Integrator steps per loop.
    int steps_per_loop = 1000;
};

/// 1 - F of the heated Walsh-2 gate minus the same without heating.
double heating_error(const BudgetGate &gate, const HeatingOptions &options = {});

struct BudgetOptions {
    int heating_nodes = 12;
    // Master equation at every grid point instead of interpolating.
    bool heating_every_point = false;
    HeatingOptions heating;
    double refine_tolerance_hz = 10e9;
    int threads = 1;
};

struct BudgetCurve {
    ModeLabel mode = ModeLabel::OutOfPhase;
    std::vector<double> delta_hz;
    std::vector<double> eps_scatter_1;
    std::vector<double> eps_scatter_2;
    std::vector<double> eps_heating;
    std::vector<double> eps_closure;
    std::vector<double> total;
    std::vector<double> gate_time;
    std::vector<double> zeta;
    std::size_t grid_argmin = 0;
    // Golden-section refined minimum.
    double argmin_hz = 0.0;
    double min_total = 0.0;
};

std::vector<double> detuning_grid(double lo_hz, double hi_hz, int points);

BudgetCurve total_error_vs_detuning(const std::vector<double> &grid, ModeLabel mode, const Crystal &crystal,
                                    const ScatteringModel &model, const BudgetOptions &options = {});

struct PopulationTraces {
    std::vector<double> times;
    // (p00, p01, p10, p11), 0 = lower level.
    std::vector<std::array<double, 4>> populations;
};

/// MS config with equal |eta Omega| on both ions, calibrated to |psi| = pi/2.
GateConfig balanced_ms_config(const GateConfig &config, const Crystal &crystal);

/// Pulse-length scan from |dd> with tone scales (1 + t, 1 - t) and ion amplitudes
/// (1 + s, 1 - s) applied on top of the config.
PopulationTraces asymmetry_scan(const GateConfig &config, const Crystal &crystal, double tone_asym,
                                double species_asym, const std::vector<double> &times,
                                const PropagationOptions &options = {});

/// Gaussian additive noise of standard deviation sigma on every population.
PopulationTraces add_noise(const PopulationTraces &traces, double sigma, std::uint64_t seed);

struct AsymmetryEstimate {
    double tone = 0.0;
    double species = 0.0;
    // RMS residual per population sample.
    double residual = 0.0;
    int evaluations = 0;
};

AsymmetryEstimate classify_asymmetry(const PopulationTraces &traces, const GateConfig &config,
                                     const Crystal &crystal, const PropagationOptions &options = {});

struct OffsetPoint {
    double offset_hz = 0.0;
    // Fitted parity phase relative to the zero-offset gate.
    double phase = 0.0;
    double contrast = 0.0;
};

struct OffsetScan {
    std::vector<OffsetPoint> points;
    double reference_phase = 0.0;
    double total_duration = 0.0;
    // Some |offset| * t_total reached pi/2; phases may have wrapped.
    bool wrapped = false;
};

/// Walsh-2 gate from |dd> with qubit offsets weights * delta0 per ion; parity phase from
/// a least-squares fit of an analysis-phase scan.
OffsetScan parity_phase_vs_offset(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                                  const std::vector<double> &offsets_hz, std::array<double, 2> weights,
                                  const PropagationOptions &options = {}, int analysis_points = 24,
                                  int threads = 1);

}  // namespace mixgate

#endif
