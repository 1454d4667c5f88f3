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

#include <gtest/gtest.h>

#include "json.hpp"
#include "mixgate/analytic.hpp"
#include "mixgate/budget.hpp"
#include "mixgate/dynamics.hpp"
#include "mixgate/error.hpp"
#include "mixgate/sequence.hpp"
#include "mixgate/tomography.hpp"

using namespace mixgate;

namespace {

Crystal driven() {
    Crystal c = ca_sr_crystal();
    set_uniform_drive(c, kTwoPi * 100e3, kTwoPi * 100e3);
    return c;
}

GateConfig ls() {
    GateConfig g;
    g.mechanism = Mechanism::LightShift;
    g.detuning = kTwoPi * 40e3;
    g.phi_z = kPi;
    return g;
}

GateConfig ms() {
    GateConfig g;
    g.mechanism = Mechanism::MolmerSorensen;
    g.detuning = kTwoPi * 40e3;
    return g;
}

PropagationOptions opts() {
    PropagationOptions o;
    o.fock_dim = 12;
    return o;
}

double overlap(const ComplexMatrix &a, const ComplexMatrix &b) {
    return std::abs((a.adjoint() * b).trace()) / a.rows();
}

}  // namespace

TEST(Elements, Validation) {
    EXPECT_THROW(rotation(-2 * kPi, 0, Target::Both, Driver::MicrowaveRf), Error);
    EXPECT_NO_THROW(rotation(2 * kPi, 0, Target::Both, Driver::MicrowaveRf));
    EXPECT_THROW(rotation(7.0, 0, Target::Both, Driver::MicrowaveRf), Error);
    EXPECT_THROW(gate_pulse(0, 1e-6, -1.0), Error);
    EXPECT_THROW(delay(0, -1e-6), Error);
}

TEST(Elements, OverlapRejected) {
    PulseSequence s;
    s.elements = {gate_pulse(0, 10e-6), gate_pulse(5e-6, 10e-6)};
    s.total_duration = 15e-6;
    EXPECT_THROW(s.validate(), Error);
    GateConfig g = ls();
    EXPECT_THROW(build_ls_walsh2(g, 0.5 * g.loop_duration()), Error);
    EXPECT_THROW(build_ms_walsh2(ms(), 0.5 * g.loop_duration()), Error);
}

TEST(Walsh, LsStructure) {
    GateConfig g = ls();
    double td = default_t_delay(g);
    EXPECT_NEAR(td, g.loop_duration() + 1e-6, 1e-15);
    PulseSequence s = build_ls_walsh2(g, td);
    int pulses = 0, rotations = 0;
    for (const auto &e : s.elements) {
        pulses += e.kind == ElementKind::GatePulse;
        rotations += e.kind == ElementKind::Rotation;
    }
    EXPECT_EQ(pulses, 2);
    EXPECT_EQ(rotations, 3);
    EXPECT_NEAR(s.total_duration, td + g.loop_duration(), 1e-15);
    const SequenceElement *second = nullptr;
    for (const auto &e : s.elements) {
        if (e.kind == ElementKind::GatePulse && e.start > 0) {
            second = &e;
        }
    }
    ASSERT_NE(second, nullptr);
    EXPECT_NEAR(std::remainder(second->phase_shift - g.detuning * td, kTwoPi), 0.0, 1e-12);
    // t_delay equal to one loop: the laser phase shift vanishes mod 2 pi.
    PulseSequence tight = build_ls_walsh2(g, g.loop_duration());
    for (const auto &e : tight.elements) {
        if (e.kind == ElementKind::GatePulse) {
            EXPECT_NEAR(std::remainder(e.phase_shift, kTwoPi), 0.0, 1e-9);
        }
    }
}

TEST(Walsh, MsToneShifts) {
    GateConfig g = ms();
    double td = 30e-6;
    PulseSequence s = build_ms_walsh2(g, td);
    int pulses = 0;
    for (const auto &e : s.elements) {
        EXPECT_NE(e.kind, ElementKind::Rotation);
        if (e.kind == ElementKind::GatePulse && e.start > 0) {
            EXPECT_NEAR(std::remainder(e.tone_phase_shift[0] - (kPi + g.detuning * td), kTwoPi), 0, 1e-12);
            EXPECT_NEAR(std::remainder(e.tone_phase_shift[1] - (kPi - g.detuning * td), kTwoPi), 0, 1e-12);
        }
        pulses += e.kind == ElementKind::GatePulse;
    }
    EXPECT_EQ(pulses, 2);
    EXPECT_NEAR(s.total_duration, td + g.loop_duration(), 1e-15);
}

TEST(Walsh, ZeroAmplitudeIsIdentity) {
    Crystal c = driven();
    for (GateConfig g : {ls(), ms()}) {
        PulseSequence s = g.mechanism == Mechanism::LightShift ? build_ls_walsh2(g, default_t_delay(g))
                                                               : build_ms_walsh2(g, default_t_delay(g));
        for (auto &e : s.elements) {
            if (e.kind == ElementKind::GatePulse) {
                e.amplitude = 0;
            }
        }
        EXPECT_NEAR(overlap(numeric_sequence_unitary(g, c, s, opts()), identity(4)), 1.0, 1e-12);
        InitialState in = spin_product_state(0, 1);
        SimOutcome out = simulate_gate(g, c, s, in, opts(), {});
        EXPECT_GT(fidelity_with_pure(out.rho, in.spin), 1 - 1e-12);
    }
}

TEST(Calibration, SequenceReachesQuarterTurn) {
    Crystal c = driven();
    for (GateConfig g : {ls(), ms()}) {
        PulseSequence s = g.mechanism == Mechanism::LightShift ? build_ls_walsh2(g, default_t_delay(g))
                                                               : build_ms_walsh2(g, default_t_delay(g));
        GateConfig cal = calibrate_sequence(g, c, s, opts());
        double psi = phase_decomposition(sequence_branch_phases(cal, c, s, opts())).psi;
        EXPECT_NEAR(std::abs(psi), kPi / 2, 1e-10);
        EXPECT_NEAR(overlap(numeric_sequence_unitary(cal, c, s, opts()), ideal_sequence_unitary(cal, c, s)), 1.0,
                    1e-9);
    }
}

TEST(SpinEcho, LsCommonOffsetCancels) {
    Crystal c = driven();
    GateConfig g = ls();
    PulseSequence s = build_ls_walsh2(g, default_t_delay(g));
    GateConfig cal = calibrate_sequence(g, c, s, opts());
    double d = 0.3 / (kTwoPi * s.total_duration);
    OffsetScan scan = parity_phase_vs_offset(cal, c, s, {-d, 0.0, d}, {1, 1}, opts());
    EXPECT_LT(std::abs(scan.points[0].phase), 1e-3);
    EXPECT_LT(std::abs(scan.points[2].phase), 1e-3);
}

TEST(SpinEcho, MsInputSelectsSumOrDifference) {
    Crystal c = driven();
    GateConfig g = balanced_ms_config(ms(), c);
    PulseSequence s = build_ms_walsh2(g, default_t_delay(g));
    GateConfig cal = calibrate_sequence(g, c, s, opts());
    auto phase_change = [&](int q2, std::array<double, 2> off) {
        InitialState in = spin_product_state(1, q2);
        NoiseModel n0, n1;
        n1.qubit_offset_hz = off;
        ComplexMatrix a = simulate_gate(cal, c, s, in, opts(), n0).rho;
        ComplexMatrix b = simulate_gate(cal, c, s, in, opts(), n1).rho;
        int i = q2 == 1 ? 3 : 2, j = q2 == 1 ? 0 : 1;
        return std::abs(std::remainder(std::arg(b(i, j)) - std::arg(a(i, j)), kTwoPi));
    };
    double x = 500;
    // |dd> input: sum matters.
    EXPECT_GT(phase_change(1, {x, x}), 0.05);
    EXPECT_LT(phase_change(1, {x, -x}), 1e-3);
    // |du> input: difference matters.
    EXPECT_LT(phase_change(0, {x, x}), 1e-3);
    EXPECT_GT(phase_change(0, {x, -x}), 0.05);
}

TEST(Wrapper, MsOnlyAndSerialisable) {
    GateConfig g = ms();
    PulseSequence w = wrap_phase_insensitive(single_pulse(g), 0.3, -0.2);
    EXPECT_EQ(w.mw_phase[0], 0.3);
    EXPECT_EQ(w.mw_phase[1], -0.2);
    EXPECT_THROW(wrap_phase_insensitive(single_pulse(ls()), 0, 0), Error);
    auto j = nlohmann::json::parse(sequence_to_json(w));
    EXPECT_EQ(j["elements"].size(), w.elements.size());
    EXPECT_NEAR(j["total_duration_s"].get<double>(), w.total_duration, 1e-18);
}

TEST(Rotations, FrameAndGenerator) {
    PulseSequence s;
    s.mechanism = Mechanism::MolmerSorensen;
    s.mw_phase = {0.4, 1.3};
    SequenceElement r = rotation(kPi / 2, 0.2, Target::Both, Driver::MicrowaveRf);
    GateConfig g = ms();
    ComplexMatrix u = rotation_unitary(r, s, g);
    EXPECT_TRUE(is_unitary(u, 1e-12));
    ComplexMatrix want = tensor({rotation_matrix(kPi / 2, 0.6), rotation_matrix(kPi / 2, 1.5)});
    EXPECT_LT((u - want).norm(), 1e-12);
    ComplexMatrix gen = rotation_generator(r, s, g);
    EXPECT_TRUE(is_hermitian(gen, 1e-12));
    Eigen::ComplexEigenSolver<ComplexMatrix> es(Complex(0, -1) * gen);
    ComplexMatrix expg = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                         es.eigenvectors().inverse();
    EXPECT_LT((expg - u).norm(), 1e-10);
    EXPECT_TRUE(is_unitary(frame_rotation({0.3, -2.0}), 1e-14));
}
