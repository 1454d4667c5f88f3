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

#ifndef MIXGATE_ANALYTIC_HPP
#define MIXGATE_ANALYTIC_HPP

#include <array>
#include <vector>

#include "mixgate/hilbert.hpp"
#include "mixgate/model.hpp"

namespace mixgate {

// Branch convention. Each spin branch b sees H_b = (1/2) [f_b a e^{i(delta t - phi0)} + h.c.]
// in the motional interaction picture. The closed-form solution is
//   alpha(t) = f* e^{i phi0} (e^{-i delta t} - 1) / (2 delta)
//   Phi(t)   = -|f|^2 (t - sin(delta t) / delta) / (4 delta),
// so one loop gives Phi = -sign(delta) pi |f|^2 / (2 delta^2). phi0 only rotates alpha.
// For the LS gate the physical coefficient of a is i F with F the force returned by
// branch_forces; the constant i is absorbed into phi0 and never changes a phase.

/// Branches are ordered (+,+), (+,-), (-,+), (-,-). For LS '+' is the upper state, for
/// MS it is the +1 eigenstate of sigma_{pi/2 - phi_s,j}.
inline constexpr std::array<std::array<int, 2>, 4> kBranchLabels{{{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}}};

struct BranchForce {
    std::array<int, 2> label;
    Complex force;
};

struct BranchTrajectory {
    std::array<int, 2> label{};
    std::vector<double> times;
    std::vector<Complex> alpha;
    std::vector<double> phase;
};

struct PhaseDecomposition {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double psi = 0.0;
    double global = 0.0;
};

using BranchPhases = std::array<double, 4>;

std::array<BranchForce, 4> branch_forces(const GateConfig &config, const Crystal &crystal);

Complex displacement_at(Complex f, double delta, double t, double phi0 = 0.0);
double branch_phase_at(Complex f, double delta, double t);
double loop_phase(Complex f, double delta);

BranchTrajectory trajectory(Complex f, double delta, const std::vector<double> &times, double phi0 = 0.0);

/// Phases after the configured number of closed loops.
BranchPhases branch_phases(const GateConfig &config, const Crystal &crystal);

PhaseDecomposition phase_decomposition(const BranchPhases &phases);
BranchPhases reconstruct_phases(const PhaseDecomposition &d);

/// zeta = (Phi_odd - Phi_even) / (Phi_odd + Phi_even), parity phases averaged over
/// their two branches.
double gate_efficiency(const BranchPhases &phases);

/// Factor multiplying every drive amplitude so that |psi| reaches target after K loops.
double calibrate_amplitude(const GateConfig &config, const Crystal &crystal, double target = kPi / 2);

/// Eigenbasis of the gate: column b is the product state for kBranchLabels[b].
ComplexMatrix gate_basis(const GateConfig &config);

ComplexMatrix ideal_gate_unitary(const GateConfig &config, const Crystal &crystal);
/// Same, for a rectangular pulse of the given length; errors unless it closes the loops.
ComplexMatrix ideal_gate_unitary(const GateConfig &config, const Crystal &crystal, double duration);

}  // namespace mixgate

#endif
