// Copyright 2026 The spincat Authors
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

// linalg.hpp: dense complex helpers shared by every module.

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace spincat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
struct HermitianSpectrum {
    RealVector values;
    Matrix vectors;
};

HermitianSpectrum hermitian_spectrum(const Matrix& h);

// exp(-i H t) from a precomputed spectrum.
Matrix spectral_propagator(const HermitianSpectrum& spectrum, double t);

// exp(-i H t) applied to a vector without forming the propagator.
Vector spectral_apply(const HermitianSpectrum& spectrum, double t, const Vector& v);

Matrix expm_hermitian(const Matrix& h, double t);

Matrix kron(const Matrix& a, const Matrix& b);

double max_abs(const Matrix& m);

// max |M_ij - conj(M_ji)|
double hermiticity_defect(const Matrix& m);

// Multiplies each column by a phase so that its largest-magnitude component
// is real and positive. Ties are resolved towards the lowest index.
void fix_column_phases(Matrix& m);

}  // namespace spincat
