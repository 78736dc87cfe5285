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

// spin_algebra.hpp: collective pseudo-spin operators, rotations and probe states
// on the (N+1)-dimensional symmetric subspace.

#pragma once

#include "spincat/types.hpp"

#include <string_view>

namespace spincat {

enum class SpinAxis { x, y, z, plus, minus };
enum class CartesianAxis { x, y, z };

CartesianAxis parse_cartesian_axis(std::string_view name);
std::string_view to_string(CartesianAxis axis);

/// Angular-momentum matrices with j = N/2 in the ascending-m Jz basis.
/// J+ has <m+1|J+|m> = sqrt(j(j+1) - m(m+1)); Jx = (J+ + J-)/2, Jy = (J+ - J-)/(2i).
Matrix spin_operator(SpinAxis axis, const SpinBasis& basis);

/// Hermitian Jx, Jy or Jz, labelled "J_x" etc.
HermitianOperator spin_component(CartesianAxis axis, const SpinBasis& basis);

/// R(theta, phi) = exp(-i Jz phi) exp(-i Jx theta), each factor exponentiated
/// through its eigendecomposition. No global phase correction is applied.
UnitaryOperator rotation_operator(double theta, double phi, const SpinBasis& basis);

/// R Jz R^dagger = Jz cos(theta) + (Jx sin(phi) - Jy cos(phi)) sin(theta): the
/// operator whose extreme eigenstates are R|m = +-N/2>.
HermitianOperator rotated_spin_operator(double theta, double phi, const SpinBasis& basis);

/// |theta, phi> = R(theta, phi)|N, 0>.
PureState coherent_spin_state(double theta, double phi, const SpinBasis& basis);

/// (|max> + e^{i rel_phase}|min>)/sqrt(2) with |max>, |min> = R|m = +N/2>, R|m = -N/2>.
/// spin_cat(0, 0, 0) is the NOON state; spin_cat(pi/2, 0, .) is the Jy cat.
PureState spin_cat(double theta, double phi, double rel_phase, const SpinBasis& basis);

enum class NamedState { noon, twin_fock, oat_cat };

NamedState parse_named_state(std::string_view name);

/// noon: spin_cat(0,0,0). twin_fock: |N/2, N/2> (even N only).
/// oat_cat: exp(-i Jz^2 pi/2)|pi/2, 0>, a cat along Jy.
PureState named_state(NamedState kind, const SpinBasis& basis);

/// Columns are the eigenvectors of J_from (ascending eigenvalue) written in the
/// eigenbasis of J_to. Each column is phase fixed so its largest-magnitude
/// component is real positive. basis_change(x, z) gives A_{j,k} = <j; z|k; x>.
UnitaryOperator basis_change(CartesianAxis from, CartesianAxis to, const SpinBasis& basis);

}  // namespace spincat
