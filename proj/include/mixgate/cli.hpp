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

#ifndef MIXGATE_CLI_HPP
#define MIXGATE_CLI_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mixgate/budget.hpp"
#include "mixgate/dynamics.hpp"
#include "mixgate/model.hpp"
#include "mixgate/options.hpp"
#include "mixgate/sequence.hpp"

namespace mixgate::cli {

enum class Kind { Frequency, Time, Power, Field, Angle, Length, Rate, Number, Integer, Boolean, Choice };

struct Value {
    Kind kind = Kind::Number;
    // SI value for numeric kinds; 0/1 for booleans.
    double number = 0.0;
    std::string text;
    // 0 for defaults.
    int line = 0;
};

/// Parsed config: every known key present, defaults filled in.
struct RunConfig {
    std::map<std::string, std::map<std::string, Value>> sections;
    std::string source;

    const Value &get(const std::string &section, const std::string &key) const;
    double number(const std::string &section, const std::string &key) const;
    int integer(const std::string &section, const std::string &key) const;
    bool flag(const std::string &section, const std::string &key) const;
    const std::string &text(const std::string &section, const std::string &key) const;
    bool explicitly_set(const std::string &section, const std::string &key) const;
};

RunConfig parse_config_text(const std::string &text, const std::string &source = "<string>");
RunConfig parse_config(const std::string &path);

/// FNV-1a 64 over the canonical (sorted, SI-normalised) key list, as 16 hex digits.
std::string config_hash(const RunConfig &config);
/// Canonical "section.key = value" lines.
std::string canonical_form(const RunConfig &config);

/// Round-trip exact %.17g.
std::string format_double(double x);

struct Overrides {
    int fock_dim = 0;
    std::string level;
    int threads = 1;
    std::uint64_t seed = 0;
};

/// Models built from a RunConfig; command-line overrides applied.
struct Setup {
    Crystal crystal;
    GateConfig gate;
    PulseSequence sequence;
    NoiseModel noise;
    PropagationOptions propagation;
    InitialState initial;
    bool calibrate = true;
};

Setup build_setup(const RunConfig &config, const Overrides &overrides);

/// Entry point; returns the process exit code.
int run(int argc, char **argv);

}  // namespace mixgate::cli

#endif
