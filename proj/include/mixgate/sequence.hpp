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

#ifndef MIXGATE_SEQUENCE_HPP
#define MIXGATE_SEQUENCE_HPP

#include <array>
#include <string>
#include <vector>

#include "mixgate/analytic.hpp"
#include "mixgate/hilbert.hpp"
#include "mixgate/model.hpp"
#include "mixgate/options.hpp"

namespace mixgate {

enum class ElementKind { GatePulse, Rotation, Delay };
enum class Driver { MicrowaveRf, Laser };
enum class Target { Ion1, Ion2, Both };

struct SequenceElement {
    ElementKind kind = ElementKind::Delay;
    double start = 0.0;
    double duration = 0.0;

    // Rotation: exp(-i angle sigma_phase / 2) on the targets. The phase is relative to
    // the driver's frame; see rotation_unitary.
    double angle = 0.0;
    double phase = 0.0;
    Target target = Target::Both;
    Driver driver = Driver::MicrowaveRf;

    // Gate pulse: amplitude relative to the config, LS laser phase offset added to phi0,
    // MS (+, -) tone phase offsets.
    double amplitude = 1.0;
    double phase_shift = 0.0;
    std::array<double, 2> tone_phase_shift{};

    double end() const {
        return start + duration;
    }
};

struct PulseSequence {
    Mechanism mechanism = Mechanism::LightShift;
    std::vector<SequenceElement> elements;
    double total_duration = 0.0;
    // Frame phase of the microwave (ion 1) and rf (ion 2) drives.
    std::array<double, 2> mw_phase{};

    /// Throws a sequence error unless elements are time-ordered and non-overlapping.
    void validate() const;
};

SequenceElement rotation(double angle, double phase, Target target, Driver driver, double start = 0.0,
                         double duration = 0.0);
SequenceElement gate_pulse(double start, double duration, double amplitude = 1.0);
SequenceElement delay(double start, double duration);

/// Two-qubit unitary of a rotation element. Microwave/rf axes are offset by the sequence
/// frame phases; laser axes are referenced to the laser frame, i.e. offset by -phi_s,j.
ComplexMatrix rotation_unitary(const SequenceElement &element, const PulseSequence &seq, const GateConfig &config);
/// Hermitian G with exp(-i G) = rotation_unitary.
ComplexMatrix rotation_generator(const SequenceElement &element, const PulseSequence &seq, const GateConfig &config);

/// exp(-i phi_j sigma_z / 2) per ion: maps a state expressed in a frame rotated by phi
/// back to the reference frame.
ComplexMatrix frame_rotation(std::array<double, 2> phases);

double default_t_delay(const GateConfig &config);

/// A single rectangular pulse of config.loops loops.
PulseSequence single_pulse(const GateConfig &config);
/// pi/2 - single pulse - pi/2 on both qubits (microwave/rf frame).
PulseSequence ls_ramsey(const GateConfig &config);
PulseSequence build_ls_walsh2(const GateConfig &config, double t_delay);
PulseSequence build_ms_walsh2(const GateConfig &config, double t_delay);
PulseSequence wrap_phase_insensitive(const PulseSequence &gate, double phi_mw, double phi_rf);

/// Config seen by one gate pulse: amplitude and phase offsets folded in.
GateConfig pulse_config(const GateConfig &config, const SequenceElement &pulse);

/// Branch phases accumulated through all gate pulses of the sequence, obtained by
/// integrating the classical branch trajectories of the Hamiltonian at the requested
/// level (pulse shaping, off-resonant modes and detuning offsets included). Rotations
/// between pulses must permute the gate basis.
BranchPhases sequence_branch_phases(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                                    const PropagationOptions &options, const NoiseModel &noise = {});

/// Sequence unitary built from sequence_branch_phases and the outer rotations. Qubit
/// offsets are left out.
ComplexMatrix numeric_sequence_unitary(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                                       const PropagationOptions &options, const NoiseModel &noise = {});

/// Config whose amplitudes give |psi| = target for the whole sequence.
GateConfig calibrate_sequence(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                              const PropagationOptions &options, const NoiseModel &noise = {},
                              double target = kPi / 2);

/// Closed-form two-qubit unitary of the sequence. Needs rectangular closed-loop pulses.
ComplexMatrix ideal_sequence_unitary(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq);

std::string sequence_to_json(const PulseSequence &seq);

}  // namespace mixgate

#endif
