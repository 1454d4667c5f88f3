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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "json.hpp"
#include "mixgate/cli.hpp"
#include "mixgate/error.hpp"

using namespace mixgate;
using namespace mixgate::cli;
using mixgate::testing::Gen;
namespace fs = std::filesystem;

namespace {

const char *kBase = R"([crystal]
rabi = 100 kHz
shift = 100 kHz

[gate]
mechanism = ls
detuning = 40 kHz
phi_z = 1 pi

[sequence]
type = walsh2
)";

std::string parse_error(const std::string &text) {
    try {
        parse_config_text(text, "t.cfg");
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::Parse);
        return e.what();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return "";
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

int run_cli(std::vector<std::string> args) {
    std::vector<char *> argv;
    static std::string name = "mixgate";
    argv.push_back(name.data());
    for (auto &a : args) {
        argv.push_back(a.data());
    }
    return run(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string &tag) {
    fs::path p = fs::temp_directory_path() / ("mixgate_cli_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_cfg(const fs::path &dir, const std::string &text) {
    fs::path p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST(Config, UnitsConvertToSi) {
    RunConfig c = parse_config_text(std::string(kBase) + "[propagation]\nramp = 2 us\nstep = 5 ns\n[budget]\n"
                                                         "power = 70 mW\nbeam_radius = 25 um\ndelta_min = -19.5 THz\n");
    EXPECT_DOUBLE_EQ(c.number("gate", "detuning"), 40e3);
    EXPECT_DOUBLE_EQ(c.number("gate", "phi_z"), kPi);
    EXPECT_DOUBLE_EQ(c.number("propagation", "ramp"), 2e-6);
    EXPECT_DOUBLE_EQ(c.number("propagation", "step"), 5e-9);
    EXPECT_DOUBLE_EQ(c.number("budget", "power"), 0.07);
    EXPECT_DOUBLE_EQ(c.number("budget", "beam_radius"), 25e-6);
    EXPECT_DOUBLE_EQ(c.number("budget", "delta_min"), -19.5e12);
    EXPECT_TRUE(c.explicitly_set("gate", "detuning"));
    EXPECT_FALSE(c.explicitly_set("gate", "loops"));
    EXPECT_EQ(c.integer("gate", "loops"), 1);
    EXPECT_EQ(c.text("sequence", "type"), "walsh2");
}

TEST(Config, ErrorsNameLineAndKey) {
    std::string e = parse_error(std::string(kBase) + "bogus = 1\n");
    EXPECT_NE(e.find("line 12"), std::string::npos) << e;
    EXPECT_NE(e.find("sequence.bogus"), std::string::npos) << e;
    e = parse_error("[crystal]\n[gate]\nmechanism = ls\ndetuning = 40 kg\n");
    EXPECT_NE(e.find("line 4"), std::string::npos) << e;
    EXPECT_NE(e.find("unknown unit"), std::string::npos) << e;
    e = parse_error("[crystal]\n[gate]\nmechanism = ls\ndetuning = 40\n");
    EXPECT_NE(e.find("missing unit"), std::string::npos) << e;
    e = parse_error("[crystal]\n[gate]\nmechanism = ls\ndetuning = 40 us\n");
    EXPECT_NE(e.find("wrong dimension"), std::string::npos) << e;
    e = parse_error("[gate]\nmechanism = ls\ndetuning = 40 kHz\n");
    EXPECT_NE(e.find("[crystal]"), std::string::npos) << e;
    e = parse_error("[crystal]\n[gate]\nmechanism = ls\n");
    EXPECT_NE(e.find("gate.detuning"), std::string::npos) << e;
    e = parse_error("[crystal]\n[gate]\nmechanism = ls\nmechanism = ms\ndetuning = 1 kHz\n");
    EXPECT_NE(e.find("duplicate"), std::string::npos) << e;
    e = parse_error("[crystal]\n[gate]\nmechanism = xx\ndetuning = 1 kHz\n");
    EXPECT_NE(e.find("one of"), std::string::npos) << e;
    e = parse_error(std::string(kBase) + "[noise]\nheating = yes\n");
    EXPECT_NE(e.find("true or false"), std::string::npos) << e;
    e = parse_error(std::string(kBase) + "[extra]\n");
    EXPECT_NE(e.find("unknown section"), std::string::npos) << e;
    e = parse_error(std::string(kBase) + "[scan]\npoints = 2.5\n");
    EXPECT_NE(e.find("integer"), std::string::npos) << e;
}

TEST(Config, HashStableUnderReorderingAndUnitChoice) {
    std::string a = "[gate]\nmechanism = ls\ndetuning = 40 kHz\nloops = 2\n[crystal]\nrabi = 100 kHz\n";
    std::string b = "# comment\n[crystal]\nrabi = 0.1 MHz\n\n[gate]\nloops = 2\ndetuning = 40000 Hz ; trailing\n"
                    "mechanism = ls\n";
    std::string c = "[crystal]\nrabi = 100 kHz\n[gate]\nmechanism = ls\ndetuning = 41 kHz\nloops = 2\n";
    std::string ha = config_hash(parse_config_text(a));
    EXPECT_EQ(ha.size(), 16u);
    EXPECT_EQ(ha, config_hash(parse_config_text(b)));
    EXPECT_NE(ha, config_hash(parse_config_text(c)));
}

TEST(Format, RoundTripExact) {
    Gen g(51);
    for (int i = 0; i < 1000; i++) {
        double x = g.normal() * std::pow(10.0, g.integer(-30, 30));
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
}

TEST(Setup, BuildsCalibratedSequence) {
    cli::Setup s = build_setup(parse_config_text(kBase), {});
    EXPECT_EQ(s.sequence.mechanism, Mechanism::LightShift);
    EXPECT_NEAR(s.gate.detuning, kTwoPi * 40e3, 1e-9);
    EXPECT_NE(s.gate.amplitude_scale[0], 1.0);
    Overrides ov;
    ov.fock_dim = 9;
    ov.level = "full";
    cli::Setup t = build_setup(parse_config_text(kBase), ov);
    EXPECT_EQ(t.propagation.fock_dim, 9);
    EXPECT_EQ(t.propagation.level, Level::Full);
}

TEST(Setup, MechanismSpecificKeysChecked) {
    std::string ms = "[crystal]\nrabi = 100 kHz\n[gate]\nmechanism = ms\ndetuning = 40 kHz\nphi0 = 1 rad\n";
    try {
        build_setup(parse_config_text(ms), {});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::MechanismMismatch);
    }
}

TEST(Run, SimulateWritesFilesWithHeaders) {
    fs::path dir = scratch("sim");
    fs::path cfg = write_cfg(dir, std::string(kBase) + "[scan]\npoints = 5\n");
    ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "out").string(), "--seed", "17"}), 0);
    std::string csv = slurp(dir / "out" / "populations.csv");
    std::istringstream in(csv);
    std::string l1, l2, l3, l4;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    std::getline(in, l4);
    EXPECT_EQ(l1, std::string("# tool: mixgate ") + MIXGATE_VERSION);
    EXPECT_EQ(l2.rfind("# config_hash: ", 0), 0u);
    EXPECT_EQ(l3, "# seed: 17");
    EXPECT_EQ(l4, "t_us,p00,p01,p10,p11");
    auto j = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
    EXPECT_EQ(j["seed"].get<std::uint64_t>(), 17u);
    EXPECT_EQ(j["command"], "simulate");
    EXPECT_GT(j["results"]["fidelity"].get<double>(), 0.9999);
    EXPECT_EQ(j["config"]["gate"]["mechanism"], "ls");
    EXPECT_TRUE(fs::exists(dir / "out" / "sequence.json"));
}

TEST(Run, ZeroAmplitudeKeepsInitialPopulations) {
    fs::path dir = scratch("zero");
    fs::path cfg = write_cfg(dir, std::string(kBase) + "amplitude = 0\n[propagation]\ninitial = du\n");
    ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}), 0);
    auto r = nlohmann::json::parse(slurp(dir / "out" / "summary.json"))["results"];
    for (const char *k : {"p00", "p01", "p10", "p11"}) {
        EXPECT_NEAR(r["final_populations"][k].get<double>(), r["initial_populations"][k].get<double>(), 1e-12);
    }
}

TEST(Run, ExitCodes) {
    fs::path dir = scratch("codes");
    fs::path bad = write_cfg(dir, "[crystal]\n[gate]\nmechanism = ls\ndetuning = 4 kHz\nwhat = 1\n");
    EXPECT_EQ(run_cli({"simulate", "--config", bad.string(), "--out", (dir / "a").string()}), 2);
    fs::path flat = write_cfg(dir, "[crystal]\n[gate]\nmechanism = ls\ndetuning = 4 kHz\n");
    EXPECT_EQ(run_cli({"simulate", "--config", flat.string(), "--out", (dir / "b").string()}), 3);
    EXPECT_EQ(run_cli({"nonsense"}), 2);
    EXPECT_EQ(run_cli({"simulate", "--out", (dir / "c").string()}), 2);
}

TEST(Run, ParityScanAndRefit) {
    fs::path dir = scratch("parity");
    fs::path cfg = write_cfg(dir, std::string(kBase) + "[scan]\nphi_points = 16\nshots = 300\n");
    ASSERT_EQ(run_cli({"scan", "parity", "--config", cfg.string(), "--out", (dir / "a").string()}), 0);
    ASSERT_EQ(run_cli({"scan", "parity", "--config", cfg.string(), "--out", (dir / "b").string()}), 0);
    EXPECT_EQ(slurp(dir / "a" / "parity_scan.csv"), slurp(dir / "b" / "parity_scan.csv"));
    EXPECT_EQ(slurp(dir / "a" / "summary.json"), slurp(dir / "b" / "summary.json"));
    ASSERT_EQ(run_cli({"fit", "parity", "--input", (dir / "a" / "parity_scan.csv").string(), "--out",
                       (dir / "c").string()}),
              0);
    auto s = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    auto f = nlohmann::json::parse(slurp(dir / "c" / "summary.json"));
    EXPECT_DOUBLE_EQ(s["results"]["fit"]["phi_p_rad"].get<double>(), f["results"]["fit"]["phi_p_rad"].get<double>());
    EXPECT_GT(s["results"]["fit"]["contrast"].get<double>(), 0.9);
}

TEST(Run, PulseLengthThenClassify) {
    fs::path dir = scratch("asym");
    std::string text = "[crystal]\nrabi = 100 kHz\n[gate]\nmechanism = ms\ndetuning = 40 kHz\nbalance_ions = true\n"
                       "[propagation]\nfock_dim = 10\nstep = 0.1 us\n[scan]\npoints = 31\nspecies_asym = 0.1\n";
    fs::path cfg = write_cfg(dir, text);
    ASSERT_EQ(run_cli({"scan", "pulse-length", "--config", cfg.string(), "--out", (dir / "a").string()}), 0);
    ASSERT_EQ(run_cli({"classify", "asymmetry", "--config", cfg.string(), "--input",
                       (dir / "a" / "populations.csv").string(), "--out", (dir / "b").string()}),
              0);
    auto r = nlohmann::json::parse(slurp(dir / "b" / "summary.json"))["results"];
    EXPECT_NEAR(r["species_asym"].get<double>(), 0.1, 0.01);
    EXPECT_NEAR(r["tone_asym"].get<double>(), 0.0, 0.01);
    EXPECT_EQ(r["dominant"], "species");
}

TEST(Run, MalformedInputCsv) {
    fs::path dir = scratch("badcsv");
    std::ofstream(dir / "x.csv") << "# tool\nphi,parity\n0,1\n";
    EXPECT_EQ(run_cli({"fit", "parity", "--input", (dir / "x.csv").string(), "--out", (dir / "o").string()}), 2);
}
