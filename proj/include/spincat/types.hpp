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

// types.hpp: value types shared across the spin, boson and composite layers.

#pragma once

#include "spincat/linalg.hpp"

#include <string>
#include <variant>

namespace spincat {

/// Symmetric subspace of N two-mode bosons, dimension N+1.
/// Index k carries the Jz eigenvalue m = k - N/2 (ascending), so k = N is
/// |N, 0>, every particle in mode 1.
class SpinBasis {
public:
    explicit SpinBasis(int n_atoms);

    int n_atoms() const noexcept { return n_atoms_; }
    int dim() const noexcept { return n_atoms_ + 1; }
    double j() const noexcept { return 0.5 * n_atoms_; }
    double m(int index) const noexcept { return index - 0.5 * n_atoms_; }

    friend bool operator==(const SpinBasis&, const SpinBasis&) = default;

private:
    int n_atoms_;
};

/// Truncated single-mode Fock space {|0>, ..., |n_cut>}.
/// `leakage` records the tail probability measured when the cutoff was chosen.
class FockBasis {
public:
    explicit FockBasis(int n_cut, double leakage = 0.0);

    int n_cut() const noexcept { return n_cut_; }
    int dim() const noexcept { return n_cut_ + 1; }
    double leakage() const noexcept { return leakage_; }

    FockBasis with_headroom(int extra) const { return FockBasis(n_cut_ + extra, leakage_); }

    friend bool operator==(const FockBasis& a, const FockBasis& b) { return a.n_cut_ == b.n_cut_; }

private:
    int n_cut_;
    double leakage_;
};

/// Probe (x) auxiliary space. Spin-major: index = spin_index * (n_cut+1) + fock_index.
class CompositeBasis {
public:
    CompositeBasis(SpinBasis spin, FockBasis fock) : spin_(spin), fock_(fock) {}

    const SpinBasis& spin() const noexcept { return spin_; }
    const FockBasis& fock() const noexcept { return fock_; }
    int dim() const noexcept { return spin_.dim() * fock_.dim(); }
    int index(int spin_index, int fock_index) const noexcept { return spin_index * fock_.dim() + fock_index; }

    friend bool operator==(const CompositeBasis&, const CompositeBasis&) = default;

private:
    SpinBasis spin_;
    FockBasis fock_;
};

using Basis = std::variant<SpinBasis, FockBasis, CompositeBasis>;

int basis_dim(const Basis& basis);

/// Normalized amplitude vector over a labelled basis.
class PureState {
public:
    static constexpr double kNormTolerance = 1e-10;

    PureState(Basis basis, Vector amplitudes);

    // Rescales to unit norm before validation.
    static PureState normalized(Basis basis, Vector amplitudes);

    const Basis& basis() const noexcept { return basis_; }
    const Vector& amplitudes() const noexcept { return amplitudes_; }
    int dim() const noexcept { return static_cast<int>(amplitudes_.size()); }
    cplx operator[](int i) const { return amplitudes_[i]; }

private:
    Basis basis_;
    Vector amplitudes_;
};

class HermitianOperator {
public:
    static constexpr double kHermiticityTolerance = 1e-12;

    explicit HermitianOperator(Matrix entries, std::string label = {});

    const Matrix& matrix() const noexcept { return entries_; }
    int dim() const noexcept { return static_cast<int>(entries_.rows()); }
    const std::string& label() const noexcept { return label_; }

private:
    Matrix entries_;
    std::string label_;
};

class UnitaryOperator {
public:
    static constexpr double kUnitarityTolerance = 1e-10;

    explicit UnitaryOperator(Matrix entries);

    const Matrix& matrix() const noexcept { return entries_; }
    int dim() const noexcept { return static_cast<int>(entries_.rows()); }
    Vector apply(const Vector& v) const { return entries_ * v; }

private:
    Matrix entries_;
};

/// Hermitian, positive semidefinite, unit trace. The spectrum is computed once
/// at construction (it is needed for validation anyway) and reused by the QFI.
class DensityMatrix {
public:
    static constexpr double kHermiticityTolerance = 1e-11;
    static constexpr double kTraceTolerance = 1e-10;
    static constexpr double kNegativityTolerance = 1e-10;

    explicit DensityMatrix(Matrix entries);

    static DensityMatrix from_pure(const Vector& psi);

    const Matrix& matrix() const noexcept { return entries_; }
    int dim() const noexcept { return static_cast<int>(entries_.rows()); }
    const HermitianSpectrum& spectrum() const noexcept { return spectrum_; }

private:
    Matrix entries_;
    HermitianSpectrum spectrum_;
};

}  // namespace spincat
