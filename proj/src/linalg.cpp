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

#include "spincat/linalg.hpp"

#include "spincat/error.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace spincat {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotADensityMatrix: return "NotADensityMatrix";
        case ErrorKind::OddAtomNumber: return "OddAtomNumber";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::TruncationError: return "TruncationError";
        case ErrorKind::CutoffSearchFailed: return "CutoffSearchFailed";
        case ErrorKind::NumericalInstability: return "NumericalInstability";
        case ErrorKind::BranchTrackingFailure: return "BranchTrackingFailure";
        case ErrorKind::RangeError: return "RangeError";
        case ErrorKind::UnsupportedAngle: return "UnsupportedAngle";
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::EngineError: return "EngineError";
        case ErrorKind::ResourceCeiling: return "ResourceCeiling";
        case ErrorKind::IncompatibleConfigs: return "IncompatibleConfigs";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

HermitianSpectrum hermitian_spectrum(const Matrix& h) {
    require(h.rows() == h.cols(), ErrorKind::DimensionMismatch, "eigendecomposition of a non-square matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    require(solver.info() == Eigen::Success, ErrorKind::NumericalInstability, "Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix spectral_propagator(const HermitianSpectrum& spectrum, double t) {
    const auto n = spectrum.values.size();
    Vector phases(n);
    for (Eigen::Index k = 0; k < n; ++k) phases[k] = std::exp(-kI * spectrum.values[k] * t);
    return spectrum.vectors * phases.asDiagonal() * spectrum.vectors.adjoint();
}

Vector spectral_apply(const HermitianSpectrum& spectrum, double t, const Vector& v) {
    Vector coeffs = spectrum.vectors.adjoint() * v;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::exp(-kI * spectrum.values[k] * t);
    return spectrum.vectors * coeffs;
}

Matrix expm_hermitian(const Matrix& h, double t) {
    return spectral_propagator(hermitian_spectrum(h), t);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    return max_abs(m - m.adjoint());
}

void fix_column_phases(Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double peak = m.col(c).cwiseAbs().maxCoeff();
        if (peak == 0.0) continue;
        Eigen::Index pivot = 0;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (std::abs(m(r, c)) >= peak * (1.0 - 1e-9)) {
                pivot = r;
                break;
            }
        }
        const cplx z = m(pivot, c);
        m.col(c) *= std::conj(z) / std::abs(z);
    }
}

}  // namespace spincat
