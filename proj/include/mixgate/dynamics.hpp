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

#ifndef MIXGATE_DYNAMICS_HPP
#define MIXGATE_DYNAMICS_HPP

#include <array>
#include <functional>
#include <vector>

#include "mixgate/hilbert.hpp"
#include "mixgate/model.hpp"
#include "mixgate/options.hpp"
#include "mixgate/sequence.hpp"

namespace mixgate {

using Coefficient = std::function<Complex(double)>;
using SpinMatrix = Eigen::Matrix4cd;

/// Sum of terms c(t) O (+ h.c. for paired terms) on qubit (x) qubit (x) modes.
/// Structured terms are spin (x) {1, a_m, a_m^dag}; they can be projected onto spin
/// branches. Operators are stored sparse; the dense form is available for checks.
class TimeDependentHamiltonian {
   public:
    TimeDependentHamiltonian(std::vector<ModeLabel> modes, int fock_dim, double t_begin, double t_end);

    /// mode = -1 for a spin-only term.
    void add_spin_term(const SpinMatrix &spin, int mode, bool raising, Coefficient coefficient, bool paired);
    void add_operator(SparseMatrix op, Coefficient coefficient, bool paired);

    const std::vector<ModeLabel> &modes() const {
        return modes_;
    }
    int fock_dim() const {
        return fock_dim_;
    }
    std::vector<int> dims() const;
    Eigen::Index dim() const {
        return dim_;
    }
    double t_begin() const {
        return t_begin_;
    }
    double t_end() const {
        return t_end_;
    }
    bool structured() const;

    ComplexMatrix dense_at(double t) const;
    /// y = H(t) x for a column state or a matrix.
    void apply(double t, const ComplexMatrix &x, ComplexMatrix &y) const;
    /// H(t) = sum_m (A_m (x) a_m + A_m^dag (x) a_m^dag) + B (x) 1.
    void spin_coefficients(double t, std::vector<SpinMatrix> &a, SpinMatrix &b) const;

   private:
    struct Term {
        SpinMatrix spin;
        int mode;
        bool raising;
        bool structured;
        bool paired;
        Coefficient coefficient;
        SparseMatrix op;
        SparseMatrix op_adjoint;
    };
    std::vector<ModeLabel> modes_;
    int fock_dim_;
    Eigen::Index dim_;
    double t_begin_;
    double t_end_;
    std::vector<Term> terms_;
};

/// Full-space operator: spin (x) [a_m or a_m^dag or 1].
SparseMatrix embed(const SpinMatrix &spin, int n_modes, int fock_dim, int mode, bool raising);
/// a_m on the full space.
SparseMatrix lowering_on(int n_modes, int fock_dim, int mode);

/// sin^2 rise and fall of length ramp inside [start, start + duration], zero outside.
double pulse_envelope(double t, double start, double duration, double ramp);

/// Motional subsystems simulated for a gate at the given level.
std::vector<ModeLabel> simulated_modes(const GateConfig &config, Level level);

TimeDependentHamiltonian build_ms_hamiltonian(const GateConfig &config, const Crystal &crystal,
                                              const SequenceElement &pulse, const PropagationOptions &options,
                                              const NoiseModel &noise);
TimeDependentHamiltonian build_ls_hamiltonian(const GateConfig &config, const Crystal &crystal,
                                              const SequenceElement &pulse, const PropagationOptions &options,
                                              const NoiseModel &noise);
/// Qubit offsets only; used between pulses.
TimeDependentHamiltonian build_idle_hamiltonian(const GateConfig &config, const std::vector<ModeLabel> &modes,
                                                int fock_dim, double t_begin, double t_end, const NoiseModel &noise);

struct Propagation {
    ComplexMatrix state;
    std::vector<double> times;
    std::vector<ComplexMatrix> samples;
};

/// Fixed-step RK4. A single-column state is propagated with the Schroedinger equation,
/// a square one with the Lindblad equation (heating pair sqrt(n') a, sqrt(n') a^dag).
/// A pure state is promoted to a density matrix when heating or the master equation is
/// requested.
Propagation propagate(const TimeDependentHamiltonian &h, const ComplexMatrix &state, double t0, double t1,
                      const PropagationOptions &options, const NoiseModel &noise);

struct InitialState {
    Eigen::Vector4cd spin = Eigen::Vector4cd::Zero();
    double thermal_nbar = 0.0;
};

/// Basis state; 0 is the upper and 1 the lower level.
InitialState spin_product_state(int q1, int q2);

struct SimOutcome {
    // Two-qubit state with motion traced out.
    ComplexMatrix rho;
    std::vector<double> times;
    // (p00, p01, p10, p11) with 0 the lower and 1 the upper level of each ion.
    std::vector<std::array<double, 4>> populations;
    // <n> of the addressed mode at each sample.
    std::vector<double> mean_phonons;
    double final_mean_phonons = 0.0;
    // Final state on the full space (column or density matrix).
    ComplexMatrix full_state;
};

/// Populations in (p00, p01, p10, p11) order, 0 = lower level.
std::array<double, 4> level_populations(const ComplexMatrix &rho2);

SimOutcome simulate_gate(const GateConfig &config, const Crystal &crystal, const PulseSequence &seq,
                         const InitialState &initial, const PropagationOptions &options, const NoiseModel &noise);

}  // namespace mixgate

#endif
