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

#include "mixgate/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mixgate/error.hpp"
#include "mixgate/model.hpp"

namespace mixgate {

static void require_two_qubit(const ComplexMatrix &rho) {
    if (rho.rows() != 4 || rho.cols() != 4) {
        throw Error(ErrorCode::InvalidDimension, "expected a two-qubit (4x4) density matrix");
    }
}

std::array<double, 4> populations(const ComplexMatrix &rho) {
    require_two_qubit(rho);
    return {std::real(rho(0, 0)), std::real(rho(1, 1)), std::real(rho(2, 2)), std::real(rho(3, 3))};
}

double parity(const std::array<double, 4> &p) {
    return p[0] + p[3] - p[1] - p[2];
}

static ComplexMatrix analysed(const ComplexMatrix &rho, double phi) {
    require_two_qubit(rho);
    ComplexMatrix r = rotation_matrix(kPi / 2, phi);
    ComplexMatrix u = tensor({r, r});
    return u * rho * u.adjoint();
}

double parity_after_analysis(const ComplexMatrix &rho, double phi) {
    return parity(populations(analysed(rho, phi)));
}

std::array<double, 4> ReadoutModel::apply(const std::array<double, 4> &p) const {
    Eigen::Vector4d v(p[0], p[1], p[2], p[3]);
    Eigen::Vector4d m = confusion * v;
    return {m(0), m(1), m(2), m(3)};
}

std::array<double, 4> ReadoutModel::correct(const std::array<double, 4> &p) const {
    Eigen::FullPivLU<Eigen::Matrix4d> lu(confusion);
    if (!lu.isInvertible()) {
        throw Error(ErrorCode::InvalidArgument, "readout confusion matrix is singular");
    }
    Eigen::Vector4d v(p[0], p[1], p[2], p[3]);
    Eigen::Vector4d t = lu.solve(v);
    return {t(0), t(1), t(2), t(3)};
}

ReadoutModel independent_readout(double e1, double e2) {
    for (double e : {e1, e2}) {
        if (!(e >= 0 && e < 0.5)) {
            throw Error(ErrorCode::InvalidArgument, "readout error must lie in [0, 0.5)");
        }
    }
    Eigen::Matrix2d m1, m2;
    m1 << 1 - e1, e1, e1, 1 - e1;
    m2 << 1 - e2, e2, e2, 1 - e2;
    ReadoutModel r;
    for (int a = 0; a < 2; a++)
        for (int b = 0; b < 2; b++)
            for (int c = 0; c < 2; c++)
                for (int d = 0; d < 2; d++) r.confusion(2 * a + b, 2 * c + d) = m1(a, c) * m2(b, d);
    return r;
}

std::array<double, 4> sample_populations(const std::array<double, 4> &p, int shots, std::uint64_t &state) {
    if (shots <= 0) {
        throw Error(ErrorCode::InvalidArgument, "shot count must be positive");
    }
    std::mt19937_64 rng(state);
    std::array<double, 4> out{};
    int left = shots;
    double mass = 1.0;
    for (int k = 0; k < 3; k++) {
        double q = mass > 0 ? std::clamp(std::max(p[k], 0.0) / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<int> draw(left, q);
        int n = draw(rng);
        out[k] = static_cast<double>(n) / shots;
        left -= n;
        mass -= std::max(p[k], 0.0);
    }
    out[3] = static_cast<double>(left) / shots;
    state = rng();
    return out;
}

ParityScan parity_scan(const ComplexMatrix &rho, const std::vector<double> &phases, int shots, std::uint64_t seed,
                       const ReadoutModel &readout) {
    ParityScan scan;
    scan.phases = phases;
    scan.shots = shots;
    scan.seed = seed;
    std::uint64_t state = seed;
    for (double phi : phases) {
        auto p = readout.apply(populations(analysed(rho, phi)));
        if (shots > 0) {
            p = sample_populations(p, shots, state);
        }
        scan.parity.push_back(parity(p));
    }
    return scan;
}

ParityFit fit_parity(const ParityScan &scan) {
    size_t n = scan.phases.size();
    if (n != scan.parity.size()) {
        throw Error(ErrorCode::FitFailed, "parity scan has mismatched phase and parity columns");
    }
    if (n < 3) {
        throw Error(ErrorCode::FitFailed, "parity fit needs at least 3 points");
    }
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd y(n);
    for (size_t i = 0; i < n; i++) {
        design(i, 0) = 1.0;
        design(i, 1) = std::sin(2 * scan.phases[i]);
        design(i, 2) = std::cos(2 * scan.phases[i]);
        y(i) = scan.parity[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) {
        throw Error(ErrorCode::FitFailed, "parity fit is rank deficient; need 3 phases distinct modulo pi");
    }
    Eigen::Vector3d c = qr.solve(y);
    ParityFit fit;
    fit.offset = c(0);
    fit.contrast = std::hypot(c(1), c(2));
    double phase = -std::atan2(c(2), c(1)) / 2;
    if (phase <= -kPi / 2) {
        phase += kPi;
    }
    fit.phase = phase;
    Eigen::VectorXd r = y - design * c;
    fit.residuals.assign(r.data(), r.data() + n);
    fit.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    return fit;
}

double two_point_contrast(const ComplexMatrix &rho, double phi_prime) {
    return (parity_after_analysis(rho, phi_prime) - parity_after_analysis(rho, phi_prime + kPi / 2)) / 2;
}

double bell_fidelity_two_point(const ComplexMatrix &rho, double phi_prime) {
    auto p = populations(rho);
    return 0.5 * (p[0] + p[3] + two_point_contrast(rho, phi_prime));
}

ComplexVector bell_state(double chi) {
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = 1 / std::sqrt(2.0);
    v(3) = std::polar(1 / std::sqrt(2.0), chi);
    return v;
}

double bell_phase(const ComplexMatrix &rho) {
    require_two_qubit(rho);
    return std::arg(rho(3, 0));
}

double matched_analysis_phase(double chi) {
    // P(phi) = sin(2 (phi - phi_p)) with phi_p = chi / 2 + pi / 4.
    return chi / 2 + kPi / 2;
}

}  // namespace mixgate
