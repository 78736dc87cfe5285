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

#include "spincat/spin_algebra.hpp"

#include "spincat/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace spincat {

CartesianAxis parse_cartesian_axis(std::string_view name) {
    if (name == "x") return CartesianAxis::x;
    if (name == "y") return CartesianAxis::y;
    if (name == "z") return CartesianAxis::z;
    fail(ErrorKind::InvalidArgument, "unknown axis '" + std::string(name) + "'");
}

std::string_view to_string(CartesianAxis axis) {
    switch (axis) {
        case CartesianAxis::x: return "x";
        case CartesianAxis::y: return "y";
        case CartesianAxis::z: return "z";
    }
    return "?";
}

Matrix spin_operator(SpinAxis axis, const SpinBasis& basis) {
    const int d = basis.dim();
    const double j = basis.j();
    if (axis == SpinAxis::z) {
        Matrix jz = Matrix::Zero(d, d);
        for (int k = 0; k < d; ++k) jz(k, k) = basis.m(k);
        return jz;
    }
    Matrix jp = Matrix::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k) {
        const double m = basis.m(k);
        jp(k + 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    switch (axis) {
        case SpinAxis::plus: return jp;
        case SpinAxis::minus: return jp.adjoint();
        case SpinAxis::x: return 0.5 * (jp + jp.adjoint());
        case SpinAxis::y: return (jp - jp.adjoint()) / (2.0 * kI);
        case SpinAxis::z: break;
    }
    return {};
}

HermitianOperator spin_component(CartesianAxis axis, const SpinBasis& basis) {
    switch (axis) {
        case CartesianAxis::x: return HermitianOperator(spin_operator(SpinAxis::x, basis), "J_x");
        case CartesianAxis::y: return HermitianOperator(spin_operator(SpinAxis::y, basis), "J_y");
        case CartesianAxis::z: return HermitianOperator(spin_operator(SpinAxis::z, basis), "J_z");
    }
    fail(ErrorKind::InvalidArgument, "unknown axis");
}

UnitaryOperator rotation_operator(double theta, double phi, const SpinBasis& basis) {
    require(std::isfinite(theta) && std::isfinite(phi), ErrorKind::InvalidArgument, "rotation angles must be finite");
    const Matrix about_z = expm_hermitian(spin_operator(SpinAxis::z, basis), phi);
    const Matrix about_x = expm_hermitian(spin_operator(SpinAxis::x, basis), theta);
    return UnitaryOperator(about_z * about_x);
}

HermitianOperator rotated_spin_operator(double theta, double phi, const SpinBasis& basis) {
    const Matrix r = rotation_operator(theta, phi, basis).matrix();
    Matrix op = r * spin_operator(SpinAxis::z, basis) * r.adjoint();
    op = 0.5 * (op + op.adjoint()).eval();
    return HermitianOperator(std::move(op), "J_theta_phi");
}

PureState coherent_spin_state(double theta, double phi, const SpinBasis& basis) {
    const Matrix r = rotation_operator(theta, phi, basis).matrix();
    return PureState::normalized(basis, r.col(basis.dim() - 1));
}

PureState spin_cat(double theta, double phi, double rel_phase, const SpinBasis& basis) {
    require(std::isfinite(rel_phase), ErrorKind::InvalidArgument, "relative phase must be finite");
    const Matrix r = rotation_operator(theta, phi, basis).matrix();
    const int top = basis.dim() - 1;
    if (top == 0) return PureState(basis, r.col(0));
    Vector amps = (r.col(top) + std::exp(kI * rel_phase) * r.col(0)) / std::sqrt(2.0);
    return PureState::normalized(basis, std::move(amps));
}

NamedState parse_named_state(std::string_view name) {
    if (name == "noon") return NamedState::noon;
    if (name == "twin_fock") return NamedState::twin_fock;
    if (name == "oat_cat") return NamedState::oat_cat;
    fail(ErrorKind::InvalidArgument, "unknown named state '" + std::string(name) + "'");
}

PureState named_state(NamedState kind, const SpinBasis& basis) {
    switch (kind) {
        case NamedState::noon:
            return spin_cat(0.0, 0.0, 0.0, basis);
        case NamedState::twin_fock: {
            require(basis.n_atoms() % 2 == 0, ErrorKind::OddAtomNumber, "twin-Fock state needs an even atom number");
            Vector amps = Vector::Zero(basis.dim());
            amps[basis.n_atoms() / 2] = 1.0;
            return PureState(basis, std::move(amps));
        }
        case NamedState::oat_cat: {
            const Matrix jz = spin_operator(SpinAxis::z, basis);
            const Matrix twist = expm_hermitian(jz * jz, std::numbers::pi / 2.0);
            const PureState css = coherent_spin_state(std::numbers::pi / 2.0, 0.0, basis);
            return PureState::normalized(basis, twist * css.amplitudes());
        }
    }
    fail(ErrorKind::InvalidArgument, "unknown named state");
}

namespace {

Matrix phase_fixed_eigenvectors(CartesianAxis axis, const SpinBasis& basis) {
    if (axis == CartesianAxis::z) return Matrix::Identity(basis.dim(), basis.dim());
    Matrix vectors = hermitian_spectrum(spin_component(axis, basis).matrix()).vectors;
    fix_column_phases(vectors);
    return vectors;
}

}  // namespace

UnitaryOperator basis_change(CartesianAxis from, CartesianAxis to, const SpinBasis& basis) {
    Matrix change = phase_fixed_eigenvectors(to, basis).adjoint() * phase_fixed_eigenvectors(from, basis);
    fix_column_phases(change);
    return UnitaryOperator(std::move(change));
}

}  // namespace spincat
