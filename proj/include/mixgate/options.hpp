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

#ifndef MIXGATE_OPTIONS_HPP
#define MIXGATE_OPTIONS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "mixgate/model.hpp"

namespace mixgate {

/// Rwa: single-mode branch Hamiltonians. Full: carrier terms, counter-rotating
/// sidebands and (for LS) both axial modes.
enum class Level { Rwa, Full };

const char *level_name(Level level);

struct NoiseModel {
    // quanta/s, indexed by mode (ip, oop)
    std::array<double, 2> heating_rate{};
    std::array<double, 2> qubit_offset_hz{};
    // Actual minus nominal motional frequency, applied to every mode.
    double mode_offset_hz = 0.0;
    bool randomize_phi0 = false;
    int phi0_samples = 16;
    std::uint64_t seed = 0;

    bool has_heating() const {
        return heating_rate[0] > 0 || heating_rate[1] > 0;
    }
};

/// NoiseModel whose heating rates are the crystal's.
NoiseModel heating_from(const Crystal &crystal);

struct PropagationOptions {
    // Integrator step in s; 0 selects 1 / (200 f_oop).
    double step = 0.0;
    int fock_dim = 15;
    bool master_equation = false;
    // sin^2 rise and fall applied inside every gate pulse, s.
    double ramp = 0.0;
    Level level = Level::Rwa;
    // Absolute times at which populations are recorded.
    std::vector<double> sample_times;

    double resolved_step(const Crystal &crystal) const;
};

}  // namespace mixgate

#endif
