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

#ifndef MIXGATE_HILBERT_HPP
#define MIXGATE_HILBERT_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace mixgate {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

inline constexpr Complex kI{0.0, 1.0};

// Basis convention used everywhere: qubit index 0 is the upper state, index 1 the
// lower one, and composite spaces are ordered qubit1 (x) qubit2 (x) mode(s).

struct FockSpace {
    int dim;
    explicit FockSpace(int dim);
};

struct LadderPair {
    ComplexMatrix lowering;
    ComplexMatrix raising;
};

LadderPair ladder_operators(const FockSpace &space);

ComplexMatrix identity(int dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
/// |up><down|
ComplexMatrix sigma_plus();
ComplexMatrix sigma_minus();
/// cos(phi) sigma_x + sin(phi) sigma_y
ComplexMatrix pauli_phi(double phi);
/// exp(-i theta sigma_phi / 2)
ComplexMatrix rotation_matrix(double theta, double phi);

/// Kronecker product of the factors, first factor most significant.
ComplexMatrix tensor(const std::vector<ComplexMatrix> &factors);
SparseMatrix sparse_tensor(const std::vector<ComplexMatrix> &factors);

bool is_hermitian(const ComplexMatrix &m, double tol);
bool is_unitary(const ComplexMatrix &m, double tol);

class DensityMatrix {
   public:
    DensityMatrix(ComplexMatrix matrix, std::vector<int> dims);
    static DensityMatrix from_pure(const ComplexVector &psi, std::vector<int> dims);

    const ComplexMatrix &matrix() const {
        return matrix_;
    }
    const std::vector<int> &dims() const {
        return dims_;
    }
    Complex trace() const {
        return matrix_.trace();
    }
    /// Throws unless Hermitian, unit trace and positive within the given tolerances.
    void validate(double hermitian_tol = 1e-10, double trace_tol = 1e-10, double eig_tol = 1e-9) const;

   private:
    ComplexMatrix matrix_;
    std::vector<int> dims_;
};

DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<int> &keep);

/// <psi| rho |psi>
double fidelity_with_pure(const ComplexMatrix &rho, const ComplexVector &psi);

}  // namespace mixgate

#endif
