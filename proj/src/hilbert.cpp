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

#include "mixgate/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "mixgate/error.hpp"

namespace mixgate {

const char *error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
            return "invalid_argument";
        case ErrorCode::InvalidDimension:
            return "invalid_dimension";
        case ErrorCode::ResonantDrive:
            return "resonant_drive";
        case ErrorCode::Resonance:
            return "resonance";
        case ErrorCode::MechanismMismatch:
            return "mechanism_mismatch";
        case ErrorCode::NonClosing:
            return "non_closing";
        case ErrorCode::UndefinedEfficiency:
            return "undefined_efficiency";
        case ErrorCode::Uncalibratable:
            return "uncalibratable";
        case ErrorCode::SequenceOverlap:
            return "sequence_overlap";
        case ErrorCode::RampTooLong:
            return "ramp_too_long";
        case ErrorCode::StepSize:
            return "step_size";
        case ErrorCode::FitFailed:
            return "fit_failed";
        case ErrorCode::NonConvergence:
            return "non_convergence";
        case ErrorCode::Parse:
            return "parse_error";
        case ErrorCode::Io:
            return "io_error";
    }
    return "unknown";
}

FockSpace::FockSpace(int dim) : dim(dim) {
    if (dim < 2) {
        throw Error(ErrorCode::InvalidDimension, "Fock space dimension must be at least 2, got " + std::to_string(dim));
    }
}

LadderPair ladder_operators(const FockSpace &space) {
    ComplexMatrix a = ComplexMatrix::Zero(space.dim, space.dim);
    for (int n = 1; n < space.dim; n++) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    ComplexMatrix ad = a.adjoint();
    return {std::move(a), std::move(ad)};
}

ComplexMatrix identity(int dim) {
    return ComplexMatrix::Identity(dim, dim);
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

ComplexMatrix sigma_plus() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 0, 0;
    return m;
}

ComplexMatrix sigma_minus() {
    return sigma_plus().adjoint();
}

ComplexMatrix pauli_phi(double phi) {
    ComplexMatrix m(2, 2);
    m << 0, std::polar(1.0, -phi), std::polar(1.0, phi), 0;
    return m;
}

ComplexMatrix rotation_matrix(double theta, double phi) {
    // sigma_phi squares to one, so the exponential is exact in closed form.
    return std::cos(theta / 2) * identity(2) - kI * std::sin(theta / 2) * pauli_phi(phi);
}

ComplexMatrix tensor(const std::vector<ComplexMatrix> &factors) {
    if (factors.empty()) {
        throw Error(ErrorCode::InvalidArgument, "tensor of an empty factor list");
    }
    ComplexMatrix out = factors[0];
    for (size_t k = 1; k < factors.size(); k++) {
        ComplexMatrix next = Eigen::kroneckerProduct(out, factors[k]).eval();
        out = std::move(next);
    }
    return out;
}

SparseMatrix sparse_tensor(const std::vector<ComplexMatrix> &factors) {
    if (factors.empty()) {
        throw Error(ErrorCode::InvalidArgument, "tensor of an empty factor list");
    }
    SparseMatrix out = factors[0].sparseView();
    for (size_t k = 1; k < factors.size(); k++) {
        SparseMatrix f = factors[k].sparseView();
        SparseMatrix next = Eigen::kroneckerProduct(out, f);
        out = std::move(next);
    }
    out.prune(Complex(0.0, 0.0));
    out.makeCompressed();
    return out;
}

bool is_hermitian(const ComplexMatrix &m, double tol) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m.adjoint() * m - identity(static_cast<int>(m.rows()))).cwiseAbs().maxCoeff() <= tol;
}

static long long product_of(const std::vector<int> &dims) {
    long long p = 1;
    for (int d : dims) {
        if (d < 1) {
            throw Error(ErrorCode::InvalidDimension, "subsystem dimensions must be positive");
        }
        p *= d;
    }
    return p;
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, std::vector<int> dims) : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw Error(ErrorCode::InvalidDimension, "density matrix needs at least one subsystem");
    }
    long long n = product_of(dims_);
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw Error(ErrorCode::InvalidDimension, "density matrix shape does not match subsystem dimensions");
    }
}

DensityMatrix DensityMatrix::from_pure(const ComplexVector &psi, std::vector<int> dims) {
    return DensityMatrix(psi * psi.adjoint(), std::move(dims));
}

void DensityMatrix::validate(double hermitian_tol, double trace_tol, double eig_tol) const {
    if (!is_hermitian(matrix_, hermitian_tol)) {
        throw Error(ErrorCode::InvalidArgument, "density matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - Complex(1.0, 0.0)) > trace_tol) {
        throw Error(ErrorCode::InvalidArgument, "density matrix trace differs from one");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -eig_tol) {
        throw Error(ErrorCode::InvalidArgument, "density matrix has a negative eigenvalue");
    }
}

DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<int> &keep) {
    const auto &dims = rho.dims();
    int n_sub = static_cast<int>(dims.size());
    std::vector<bool> kept(n_sub, false);
    for (int k : keep) {
        if (k < 0 || k >= n_sub) {
            throw Error(ErrorCode::InvalidArgument, "partial_trace: subsystem index " + std::to_string(k) + " out of range");
        }
        if (kept[k]) {
            throw Error(ErrorCode::InvalidArgument, "partial_trace: duplicate subsystem index " + std::to_string(k));
        }
        kept[k] = true;
    }
    std::vector<int> keep_sorted(keep.begin(), keep.end());
    std::sort(keep_sorted.begin(), keep_sorted.end());
    std::vector<int> traced;
    for (int k = 0; k < n_sub; k++) {
        if (!kept[k]) {
            traced.push_back(k);
        }
    }

    std::vector<long long> stride(n_sub, 1);
    for (int k = n_sub - 2; k >= 0; k--) {
        stride[k] = stride[k + 1] * dims[k + 1];
    }
    auto offsets = [&](const std::vector<int> &subs) {
        long long count = 1;
        for (int s : subs) {
            count *= dims[s];
        }
        std::vector<long long> out(count, 0);
        for (long long idx = 0; idx < count; idx++) {
            long long rem = idx;
            long long off = 0;
            for (int p = static_cast<int>(subs.size()) - 1; p >= 0; p--) {
                int s = subs[p];
                off += (rem % dims[s]) * stride[s];
                rem /= dims[s];
            }
            out[idx] = off;
        }
        return out;
    };
    auto keep_off = offsets(keep_sorted);
    auto trace_off = offsets(traced);

    long long nk = static_cast<long long>(keep_off.size());
    ComplexMatrix out = ComplexMatrix::Zero(nk, nk);
    const ComplexMatrix &m = rho.matrix();
    for (long long i = 0; i < nk; i++) {
        for (long long j = 0; j < nk; j++) {
            Complex acc = 0;
            for (long long t : trace_off) {
                acc += m(keep_off[i] + t, keep_off[j] + t);
            }
            out(i, j) = acc;
        }
    }
    std::vector<int> out_dims;
    for (int k : keep_sorted) {
        out_dims.push_back(dims[k]);
    }
    return DensityMatrix(std::move(out), std::move(out_dims));
}

double fidelity_with_pure(const ComplexMatrix &rho, const ComplexVector &psi) {
    return std::real(psi.dot(rho * psi));
}

}  // namespace mixgate
