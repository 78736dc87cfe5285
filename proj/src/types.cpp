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

#include "spincat/types.hpp"

#include "spincat/error.hpp"

#include <cmath>

namespace spincat {

SpinBasis::SpinBasis(int n_atoms) : n_atoms_(n_atoms) {
    require(n_atoms >= 0, ErrorKind::InvalidArgument, "atom number must be nonnegative");
}

FockBasis::FockBasis(int n_cut, double leakage) : n_cut_(n_cut), leakage_(leakage) {
    require(n_cut >= 1, ErrorKind::InvalidArgument, "Fock cutoff must be at least 1");
}

int basis_dim(const Basis& basis) {
    return std::visit([](const auto& b) { return b.dim(); }, basis);
}

PureState::PureState(Basis basis, Vector amplitudes) : basis_(basis), amplitudes_(std::move(amplitudes)) {
    require(amplitudes_.size() == basis_dim(basis_), ErrorKind::DimensionMismatch,
            "amplitude vector length does not match basis dimension");
    const double norm2 = amplitudes_.squaredNorm();
    require(std::abs(norm2 - 1.0) <= kNormTolerance, ErrorKind::InvalidArgument,
            "state is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
}

PureState PureState::normalized(Basis basis, Vector amplitudes) {
    const double norm = amplitudes.norm();
    require(norm > 0.0, ErrorKind::InvalidArgument, "cannot normalize the zero vector");
    amplitudes /= norm;
    return PureState(basis, std::move(amplitudes));
}

HermitianOperator::HermitianOperator(Matrix entries, std::string label)
    : entries_(std::move(entries)), label_(std::move(label)) {
    require(entries_.rows() == entries_.cols() && entries_.rows() > 0, ErrorKind::DimensionMismatch,
            "operator must be a nonempty square matrix");
    require(hermiticity_defect(entries_) <= kHermiticityTolerance, ErrorKind::InvalidArgument,
            "operator is not Hermitian");
}

UnitaryOperator::UnitaryOperator(Matrix entries) : entries_(std::move(entries)) {
    require(entries_.rows() == entries_.cols() && entries_.rows() > 0, ErrorKind::DimensionMismatch,
            "operator must be a nonempty square matrix");
    const Matrix defect = entries_.adjoint() * entries_ - Matrix::Identity(entries_.rows(), entries_.cols());
    require(max_abs(defect) <= kUnitarityTolerance, ErrorKind::InvalidArgument, "operator is not unitary");
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
    require(entries_.rows() == entries_.cols() && entries_.rows() > 0, ErrorKind::DimensionMismatch,
            "density matrix must be a nonempty square matrix");
    require(hermiticity_defect(entries_) <= kHermiticityTolerance, ErrorKind::NotADensityMatrix,
            "density matrix is not Hermitian");
    // Symmetrize away the sub-tolerance defect so the eigensolver sees an exact Hermitian input.
    entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
    const double trace = entries_.trace().real();
    require(std::abs(trace - 1.0) <= kTraceTolerance, ErrorKind::NotADensityMatrix,
            "density matrix trace is " + std::to_string(trace));
    spectrum_ = hermitian_spectrum(entries_);
    require(spectrum_.values.minCoeff() >= -kNegativityTolerance, ErrorKind::NotADensityMatrix,
            "density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const Vector& psi) {
    return DensityMatrix(psi * psi.adjoint());
}

}  // namespace spincat
