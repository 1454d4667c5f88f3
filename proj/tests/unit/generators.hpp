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

// Seeded generators for property tests.

#ifndef MIXGATE_TEST_GENERATORS_HPP
#define MIXGATE_TEST_GENERATORS_HPP

#include <random>

#include "mixgate/hilbert.hpp"

namespace mixgate::testing {

class Gen {
   public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    int integer(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng_);
    }
    Complex complex(double scale = 1.0) {
        return {scale * normal(), scale * normal()};
    }
    double normal() {
        return std::normal_distribution<double>(0, 1)(rng_);
    }

    ComplexMatrix matrix(int rows, int cols) {
        ComplexMatrix m(rows, cols);
        for (int i = 0; i < rows; i++) {
            for (int j = 0; j < cols; j++) {
                m(i, j) = complex();
            }
        }
        return m;
    }

    ComplexVector state(int dim) {
        ComplexVector v = matrix(dim, 1).col(0);
        return v / v.norm();
    }

    // Random full-rank density matrix.
    ComplexMatrix density(int dim) {
        ComplexMatrix a = matrix(dim, dim);
        ComplexMatrix rho = a * a.adjoint();
        return rho / rho.trace().real();
    }

   private:
    std::mt19937_64 rng_;
};

}  // namespace mixgate::testing

#endif
