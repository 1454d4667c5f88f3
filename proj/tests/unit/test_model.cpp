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

#include "generators.hpp"
#include "mixgate/error.hpp"
#include "mixgate/model.hpp"

using namespace mixgate;
using mixgate::testing::Gen;

TEST(Crystal, TableTwoModesAndLambDicke) {
    Crystal c = ca_sr_crystal();
    EXPECT_NEAR(c.modes[0].frequency_hz / 1.49e6, 1.0, 0.05);
    EXPECT_NEAR(c.modes[1].frequency_hz / 2.91e6, 1.0, 0.05);
    const double eta[4] = {0.090, 0.124, 0.127, -0.045};
    for (int m = 0; m < 2; m++) {
        for (int j = 0; j < 2; j++) {
            EXPECT_NEAR(c.modes[m].eta[j] / eta[2 * m + j], 1.0, 0.05) << m << j;
        }
    }
    EXPECT_EQ(c.ions[0].species, "Ca43");
    EXPECT_EQ(c.ions[1].species, "Sr88");
}

TEST(Crystal, HeatingRates) {
    Crystal c = ca_sr_crystal();
    EXPECT_DOUBLE_EQ(c.mode(ModeLabel::InPhase).heating_rate, 93.0);
    EXPECT_DOUBLE_EQ(c.mode(ModeLabel::OutOfPhase).heating_rate, 27.0);
}

TEST(NormalModes, OrthonormalAndOrderedForRandomMasses) {
    Gen g(11);
    for (int i = 0; i < 200; i++) {
        double m1 = 40.0;
        double m2 = m1 * g.uniform(0.1, 10.0);
        auto modes = axial_normal_modes(m1, m2, 1e6);
        EXPECT_LT(modes[0].frequency_hz, modes[1].frequency_hz);
        const auto &a = modes[0].vector, &b = modes[1].vector;
        EXPECT_NEAR(a[0] * a[0] + a[1] * a[1], 1.0, 1e-12);
        EXPECT_NEAR(b[0] * b[0] + b[1] * b[1], 1.0, 1e-12);
        EXPECT_NEAR(a[0] * b[0] + a[1] * b[1], 0.0, 1e-12);
        EXPECT_GT(a[0], 0.0);
        EXPECT_GT(b[0], 0.0);
    }
}

TEST(NormalModes, EqualMassesGiveSqrtThree) {
    auto modes = axial_normal_modes(40, 40, 1e6);
    EXPECT_NEAR(modes[0].frequency_hz, 1e6, 1e-6);
    EXPECT_NEAR(modes[1].frequency_hz, std::sqrt(3.0) * 1e6, 1e-6);
    EXPECT_NEAR(modes[0].vector[0], 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(modes[1].vector[1], -1 / std::sqrt(2.0), 1e-12);
}

TEST(LambDicke, LinearInDkAndInverseSqrtMass) {
    MotionalMode m;
    m.frequency_hz = 2e6;
    m.vector = {0.6, 0.8};
    auto base = lamb_dicke(m, {40, 88}, 1e7);
    auto dk2 = lamb_dicke(m, {40, 88}, 2e7);
    auto mass4 = lamb_dicke(m, {160, 352}, 1e7);
    for (int j = 0; j < 2; j++) {
        EXPECT_NEAR(dk2[j], 2 * base[j], 1e-15);
        EXPECT_NEAR(mass4[j], base[j] / 2, 1e-15);
    }
    // Oracle: dk b sqrt(hbar / (2 m omega)).
    double hbar = 1.054571817e-34, amu = 1.66053906660e-27;
    double want = 1e7 * 0.6 * std::sqrt(hbar / (2 * 40 * amu * kTwoPi * 2e6));
    EXPECT_NEAR(base[0] / want, 1.0, 1e-6);
}

TEST(Qubits, FieldOffsetIsLinear) {
    for (const QubitSpec &q : {ca43_stretch_qubit(), ca43_clock_qubit(), sr88_zeeman_qubit()}) {
        double a = qubit_offset_from_field(q, 1e-3);
        EXPECT_DOUBLE_EQ(qubit_offset_from_field(q, 2e-3), 2 * a);
        EXPECT_DOUBLE_EQ(qubit_offset_from_field(q, -1e-3), -a);
        EXPECT_EQ(qubit_offset_from_field(q, 0.0), 0.0);
    }
    EXPECT_DOUBLE_EQ(sr88_zeeman_qubit().sensitivity_hz_per_gauss, 2.80e6);
    EXPECT_DOUBLE_EQ(ca43_clock_qubit().sensitivity_hz_per_gauss, 0.0);
}

TEST(Geometry, DefaultWavevector) {
    EXPECT_NEAR(default_delta_k(402e-9), std::sqrt(2.0) * kTwoPi / 402e-9, 1e-6);
    double p = standing_wave_phase(5e-6, default_delta_k());
    EXPECT_GE(p, 0.0);
    EXPECT_LT(p, kTwoPi);
}

TEST(GateConfigTest, Validation) {
    GateConfig g;
    EXPECT_THROW(g.validate(), Error);
    g.detuning = kTwoPi * 40e3;
    EXPECT_NO_THROW(g.validate());
    EXPECT_NEAR(g.loop_duration(), 25e-6, 1e-15);
    g.loops = 0;
    EXPECT_THROW(g.validate(), Error);
    g.loops = 2;
    EXPECT_NEAR(g.gate_duration(), 50e-6, 1e-15);
    // Zero is allowed so that a sequence can switch a pulse off.
    g.amplitude_scale[1] = 0.0;
    EXPECT_NO_THROW(g.validate());
    g.amplitude_scale[1] = -0.1;
    EXPECT_THROW(g.validate(), Error);
}

TEST(GateConfigTest, ScaledMultipliesBothIons) {
    GateConfig g;
    g.detuning = 1;
    g.amplitude_scale = {1.5, 0.5};
    GateConfig s = scaled(g, 2.0);
    EXPECT_DOUBLE_EQ(s.amplitude_scale[0], 3.0);
    EXPECT_DOUBLE_EQ(s.amplitude_scale[1], 1.0);
}

TEST(Drive, UniformDriveSplitsShift) {
    Crystal c = ca_sr_crystal();
    set_uniform_drive(c, 5.0, 4.0);
    for (const auto &ion : c.ions) {
        EXPECT_EQ(ion.rabi, 5.0);
        EXPECT_EQ(ion.shift_up, 2.0);
        EXPECT_EQ(ion.shift_down, -2.0);
    }
}
