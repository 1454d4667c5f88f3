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

#ifndef MIXGATE_TOMOGRAPHY_HPP
#define MIXGATE_TOMOGRAPHY_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "mixgate/hilbert.hpp"

namespace mixgate {

/// (p_uu, p_ud, p_du, p_dd) in basis order; u = upper, d = lower level.
std::array<double, 4> populations(const ComplexMatrix &rho);
/// p_uu + p_dd - p_ud - p_du
double parity(const std::array<double, 4> &p);

/// Parity after pi/2 rotations about axis phi on both qubits.
double parity_after_analysis(const ComplexMatrix &rho, double phi);

struct ParityScan {
    std::vector<double> phases;
    std::vector<double> parity;
    // 0 = exact expectation values.
    int shots = 0;
    std::uint64_t seed = 0;
};

struct ParityFit {
    double offset = 0.0;
    double contrast = 0.0;
    // In (-pi/2, pi/2].
    double phase = 0.0;
    std::vector<double> residuals;
    double rms_residual = 0.0;
};

/// Optional linear readout model: measured = M * true populations, columns sum to one.
struct ReadoutModel {
    Eigen::Matrix4d confusion = Eigen::Matrix4d::Identity();

    std::array<double, 4> apply(const std::array<double, 4> &p) const;
    /// Inverts the confusion matrix; results may leave [0, 1] under noise.
    std::array<double, 4> correct(const std::array<double, 4> &p) const;
};

/// Symmetric per-qubit readout error e (probability of flipping each outcome).
ReadoutModel independent_readout(double e1, double e2);

/// Multinomial sample of the four outcomes, returned as frequencies.
std::array<double, 4> sample_populations(const std::array<double, 4> &p, int shots, std::uint64_t &state);

ParityScan parity_scan(const ComplexMatrix &rho, const std::vector<double> &phases, int shots = 0,
                       std::uint64_t seed = 0, const ReadoutModel &readout = {});

/// Linear least squares of P = P0 + A sin 2phi + B cos 2phi.
ParityFit fit_parity(const ParityScan &scan);

/// (P(phi') - P(phi' + pi/2)) / 2
double two_point_contrast(const ComplexMatrix &rho, double phi_prime);
double bell_fidelity_two_point(const ComplexMatrix &rho, double phi_prime);

/// (|uu> + e^{i chi} |dd>) / sqrt(2)
ComplexVector bell_state(double chi);
/// chi of the uu-dd coherence.
double bell_phase(const ComplexMatrix &rho);

/// Analysis phase at which the two-point method is matched to bell_state(chi).
double matched_analysis_phase(double chi);

}  // namespace mixgate

#endif
