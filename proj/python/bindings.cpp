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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "mixgate/analytic.hpp"
#include "mixgate/budget.hpp"
#include "mixgate/cli.hpp"
#include "mixgate/error.hpp"
#include "mixgate/model.hpp"
#include "mixgate/sequence.hpp"
#include "mixgate/tomography.hpp"

namespace py = pybind11;
using namespace mixgate;

namespace {

// argv for cli::run; the strings must outlive the call.
int run_cli(const std::vector<std::string> &args) {
    std::vector<std::string> owned{"mixgate"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &s : owned) {
        argv.push_back(s.data());
    }
    py::gil_scoped_release release;
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mixed-species two-qubit gate models";
    m.attr("__version__") = MIXGATE_VERSION;

    static py::exception<Error> error_type(m, "MixgateError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error &e) {
            std::string msg = std::string(error_code_name(e.code())) + ": " + e.what();
            PyErr_SetString(error_type.ptr(), msg.c_str());
        }
    });

    py::enum_<Mechanism>(m, "Mechanism")
        .value("LightShift", Mechanism::LightShift)
        .value("MolmerSorensen", Mechanism::MolmerSorensen);
    py::enum_<ModeLabel>(m, "ModeLabel").value("InPhase", ModeLabel::InPhase).value("OutOfPhase", ModeLabel::OutOfPhase);
    py::enum_<Level>(m, "Level").value("Rwa", Level::Rwa).value("Full", Level::Full);

    py::class_<MotionalMode>(m, "MotionalMode")
        .def_readonly("label", &MotionalMode::label)
        .def_readonly("frequency_hz", &MotionalMode::frequency_hz)
        .def_readonly("vector", &MotionalMode::vector)
        .def_readonly("eta", &MotionalMode::eta)
        .def_readonly("heating_rate", &MotionalMode::heating_rate);

    py::class_<Crystal>(m, "Crystal")
        .def("mode", &Crystal::mode, py::return_value_policy::copy)
        .def("masses", &Crystal::masses)
        .def_property_readonly("modes", [](const Crystal &c) { return c.modes; });

    py::class_<CrystalOptions>(m, "CrystalOptions")
        .def(py::init<>())
        .def_readwrite("ip_frequency_hz", &CrystalOptions::ip_frequency_hz)
        .def_readwrite("delta_k", &CrystalOptions::delta_k)
        .def_readwrite("heating_ip", &CrystalOptions::heating_ip)
        .def_readwrite("heating_oop", &CrystalOptions::heating_oop)
        .def_readwrite("ca_clock_qubit", &CrystalOptions::ca_clock_qubit)
        .def_readwrite("ideal_mode_vectors", &CrystalOptions::ideal_mode_vectors);

    m.def("ca_sr_crystal", &ca_sr_crystal, py::arg("options") = CrystalOptions{});
    m.def("axial_normal_modes", &axial_normal_modes, py::arg("m1_amu"), py::arg("m2_amu"), py::arg("f_single_hz"));
    m.def(
        "set_uniform_drive",
        [](Crystal c, double rabi, double shift) {
            set_uniform_drive(c, rabi, shift);
            return c;
        },
        "Copy of the crystal with uniform drive strengths.", py::arg("crystal"), py::arg("rabi"),
        py::arg("differential_shift"));

    py::class_<GateConfig>(m, "GateConfig")
        .def(py::init<>())
        .def_readwrite("mechanism", &GateConfig::mechanism)
        .def_readwrite("mode", &GateConfig::mode)
        .def_readwrite("detuning", &GateConfig::detuning)
        .def_readwrite("loops", &GateConfig::loops)
        .def_readwrite("phi0", &GateConfig::phi0)
        .def_readwrite("phi_z", &GateConfig::phi_z)
        .def_readwrite("phi_s", &GateConfig::phi_s)
        .def_readwrite("phi_d", &GateConfig::phi_d)
        .def_readwrite("amplitude_scale", &GateConfig::amplitude_scale)
        .def_readwrite("tone_scale", &GateConfig::tone_scale)
        .def_readwrite("qubit_offset_hz", &GateConfig::qubit_offset_hz)
        .def_readwrite("beam_shift_hz", &GateConfig::beam_shift_hz)
        .def("validate", &GateConfig::validate)
        .def("loop_duration", &GateConfig::loop_duration)
        .def("gate_duration", &GateConfig::gate_duration);
    m.def("scaled", &scaled);

    py::class_<PhaseDecomposition>(m, "PhaseDecomposition")
        .def_readonly("theta1", &PhaseDecomposition::theta1)
        .def_readonly("theta2", &PhaseDecomposition::theta2)
        .def_readonly("psi", &PhaseDecomposition::psi)
        .def_readonly("global_phase", &PhaseDecomposition::global);

    m.def("displacement_at", &displacement_at, py::arg("f"), py::arg("delta"), py::arg("t"), py::arg("phi0") = 0.0);
    m.def("loop_phase", &loop_phase);
    m.def("branch_phases", &branch_phases);
    m.def("phase_decomposition", &phase_decomposition);
    m.def("gate_efficiency", &gate_efficiency);
    m.def("calibrate_amplitude", &calibrate_amplitude, py::arg("config"), py::arg("crystal"),
          py::arg("target") = kPi / 2);
    m.def("ideal_gate_unitary", py::overload_cast<const GateConfig &, const Crystal &>(&ideal_gate_unitary));

    py::class_<PropagationOptions>(m, "PropagationOptions")
        .def(py::init<>())
        .def_readwrite("step", &PropagationOptions::step)
        .def_readwrite("fock_dim", &PropagationOptions::fock_dim)
        .def_readwrite("master_equation", &PropagationOptions::master_equation)
        .def_readwrite("ramp", &PropagationOptions::ramp)
        .def_readwrite("level", &PropagationOptions::level);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<>())
        .def_readwrite("heating_rate", &NoiseModel::heating_rate)
        .def_readwrite("qubit_offset_hz", &NoiseModel::qubit_offset_hz)
        .def_readwrite("mode_offset_hz", &NoiseModel::mode_offset_hz)
        .def_readwrite("seed", &NoiseModel::seed);

    py::class_<PulseSequence>(m, "PulseSequence")
        .def_readonly("total_duration", &PulseSequence::total_duration)
        .def("__len__", [](const PulseSequence &s) { return s.elements.size(); })
        .def("to_json", &sequence_to_json);
    m.def("single_pulse", &single_pulse);
    m.def("ls_ramsey", &ls_ramsey);
    m.def("ls_walsh2", [](const GateConfig &g) { return build_ls_walsh2(g, default_t_delay(g)); });
    m.def("ms_walsh2", [](const GateConfig &g) { return build_ms_walsh2(g, default_t_delay(g)); });
    m.def("numeric_sequence_unitary", &numeric_sequence_unitary, py::arg("config"), py::arg("crystal"),
          py::arg("sequence"), py::arg("options") = PropagationOptions{}, py::arg("noise") = NoiseModel{});
    m.def("ideal_sequence_unitary", &ideal_sequence_unitary);
    m.def("calibrate_sequence", &calibrate_sequence, py::arg("config"), py::arg("crystal"), py::arg("sequence"),
          py::arg("options") = PropagationOptions{}, py::arg("noise") = NoiseModel{}, py::arg("target") = kPi / 2);

    py::class_<ParityFit>(m, "ParityFit")
        .def_readonly("offset", &ParityFit::offset)
        .def_readonly("contrast", &ParityFit::contrast)
        .def_readonly("phase", &ParityFit::phase)
        .def_readonly("rms_residual", &ParityFit::rms_residual);
    m.def("bell_state", &bell_state);
    m.def("bell_phase", &bell_phase);
    m.def("parity_after_analysis", &parity_after_analysis);
    m.def(
        "fit_parity",
        [](const std::vector<double> &phases, const std::vector<double> &parity) {
            ParityScan scan;
            scan.phases = phases;
            scan.parity = parity;
            return fit_parity(scan);
        },
        py::arg("phases"), py::arg("parity"));
    m.def("bell_fidelity_two_point", &bell_fidelity_two_point);
    m.def("matched_analysis_phase", &matched_analysis_phase);

    m.def("rabi_vs_detuning", [](double delta_hz, double power_w, double radius_m, bool sr) {
        return rabi_vs_detuning(delta_hz, power_w, radius_m, sr ? sr_optics() : ca_optics());
    }, py::arg("delta_hz"), py::arg("power_w") = 0.070, py::arg("radius_m") = 25e-6, py::arg("sr") = false);
    m.def("scattering_error", [](double delta_1_hz, double gate_time) {
        return scattering_error(delta_1_hz, gate_time, ScatteringModel{});
    });

    m.def("config_hash", [](const std::string &text) { return cli::config_hash(cli::parse_config_text(text)); });
    m.def("run_cli", &run_cli, "Run the command-line tool in-process; returns the exit code.");
}
