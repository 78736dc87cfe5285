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


#include "spincat/error.hpp"
#include "spincat/metrology.hpp"
#include "spincat/spin_algebra.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace spincat {
namespace {

constexpr double kPi = std::numbers::pi;

double qfi(const PureState& psi, CartesianAxis axis) {
    return qfi_pure(psi, spin_component(axis, SpinBasis(psi.dim() - 1))).value;
}

TEST(SpinOperator, JzIsDiagonalInM) {
    const Matrix jz = spin_operator(SpinAxis::z, SpinBasis(2));
    EXPECT_NEAR((jz - Eigen::Vector3cd(-1.0, 0.0, 1.0).asDiagonal().toDenseMatrix()).norm(), 0.0, 1e-15);
}

TEST(SpinOperator, JxForOneParticleIsHalfSigmaX) {
    const Matrix jx = spin_operator(SpinAxis::x, SpinBasis(1));
    EXPECT_NEAR(std::abs(jx(0, 1) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(jx(1, 0) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(jx(0, 0)) + std::abs(jx(1, 1)), 0.0, 1e-15);
}

TEST(SpinOperator, CommutationRelations) {
    const SpinBasis b(5);
    const Matrix jx = spin_operator(SpinAxis::x, b);
    const Matrix jy = spin_operator(SpinAxis::y, b);
    const Matrix jz = spin_operator(SpinAxis::z, b);
    EXPECT_LT(max_abs(jx * jy - jy * jx - kI * jz), 1e-12);
    EXPECT_LT(max_abs(jy * jz - jz * jy - kI * jx), 1e-12);
    EXPECT_LT(max_abs(jz * jx - jx * jz - kI * jy), 1e-12);
    const Matrix casimir = jx * jx + jy * jy + jz * jz;
    EXPECT_LT(max_abs(casimir - 2.5 * 3.5 * Matrix::Identity(6, 6)), 1e-12);
}

TEST(SpinOperator, LadderOperatorsAreAdjoint) {
    const SpinBasis b(4);
    EXPECT_LT(max_abs(spin_operator(SpinAxis::plus, b).adjoint() - spin_operator(SpinAxis::minus, b)), 1e-15);
}

TEST(SpinOperator, RejectsNegativeAtomNumber) {
    EXPECT_THROW(SpinBasis(-1), Error);
}

TEST(Rotation, ZeroAnglesGiveIdentity) {
    const UnitaryOperator r = rotation_operator(0.0, 0.0, SpinBasis(7));
    EXPECT_LT(max_abs(r.matrix() - Matrix::Identity(8, 8)), 1e-14);
}

TEST(Rotation, PiAboutXFlipsTheSpin) {
    const SpinBasis b(2);
    Vector up = Vector::Zero(3);
    up[2] = 1.0;
    const Vector out = rotation_operator(kPi, 0.0, b).apply(up);
    EXPECT_NEAR(std::abs(out[0]), 1.0, 1e-12);
}

// The spec's stated form of this identity does not hold for
// R = exp(-i Jz phi) exp(-i Jx theta); both correct conjugations are checked.
TEST(Rotation, ConjugationIdentities) {
    const SpinBasis b(4);
    const double theta = 0.7;
    const double phi = 1.1;
    const Matrix r = rotation_operator(theta, phi, b).matrix();
    const Matrix jx = spin_operator(SpinAxis::x, b);
    const Matrix jy = spin_operator(SpinAxis::y, b);
    const Matrix jz = spin_operator(SpinAxis::z, b);
    const Matrix forward = r * jz * r.adjoint();
    const Matrix expected = jz * std::cos(theta) + (jx * std::sin(phi) - jy * std::cos(phi)) * std::sin(theta);
    EXPECT_LT(max_abs(forward - expected), 1e-10);
    EXPECT_LT(max_abs(rotated_spin_operator(theta, phi, b).matrix() - expected), 1e-10);
    const Matrix backward = r.adjoint() * jz * r;
    EXPECT_LT(max_abs(backward - (jz * std::cos(theta) + jy * std::sin(theta))), 1e-10);
}

TEST(Rotation, IsUnitaryForRandomAngles) {
    const SpinBasis b(9);
    for (double theta : {0.1, 1.3, 2.9}) {
        for (double phi : {-0.4, 2.2}) {
            const Matrix r = rotation_operator(theta, phi, b).matrix();
            EXPECT_LT(max_abs(r.adjoint() * r - Matrix::Identity(10, 10)), 1e-12);
        }
    }
}

TEST(CoherentSpinState, PolesAndEquator) {
    const SpinBasis b(6);
    EXPECT_NEAR(std::abs(coherent_spin_state(0.0, 0.0, b)[6]), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(coherent_spin_state(kPi, 0.0, b)[0]), 1.0, 1e-12);
    const PureState eq = coherent_spin_state(kPi / 2.0, 0.0, SpinBasis(2));
    EXPECT_NEAR(std::norm(eq[0]), 0.25, 1e-12);
    EXPECT_NEAR(std::norm(eq[1]), 0.5, 1e-12);
    EXPECT_NEAR(std::norm(eq[2]), 0.25, 1e-12);
}

TEST(CoherentSpinState, IsTopEigenstateOfRotatedOperator) {
    const SpinBasis b(5);
    const PureState css = coherent_spin_state(0.9, -1.7, b);
    const Matrix j = rotated_spin_operator(0.9, -1.7, b).matrix();
    EXPECT_LT((j * css.amplitudes() - 2.5 * css.amplitudes()).norm(), 1e-10);
}

TEST(SpinCat, ZeroAnglesGiveNoon) {
    const PureState cat = spin_cat(0.0, 0.0, 0.0, SpinBasis(10));
    EXPECT_NEAR(std::abs(cat[0] - 1.0 / std::sqrt(2.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(cat[10] - 1.0 / std::sqrt(2.0)), 0.0, 1e-14);
    EXPECT_NEAR(cat.amplitudes().segment(1, 9).norm(), 0.0, 1e-14);
}

// The Jy cat sits at (pi/2, 0) in this rotation convention; (pi/2, pi/2)
// points along x.
TEST(SpinCat, JyCatHasHeisenbergQfi) {
    const SpinBasis b(20);
    EXPECT_NEAR(qfi(spin_cat(kPi / 2.0, 0.0, 0.0, b), CartesianAxis::y), 400.0, 1e-8);
    EXPECT_NEAR(qfi(spin_cat(kPi / 2.0, kPi / 2.0, 0.0, b), CartesianAxis::y), 20.0, 1e-8);
    EXPECT_NEAR(qfi(spin_cat(kPi / 2.0, kPi / 2.0, 0.0, b), CartesianAxis::x), 400.0, 1e-8);
}

TEST(SpinCat, NormalizedForAnyAngles) {
    const SpinBasis b(7);
    for (double theta : {0.0, 0.3, 1.9, kPi}) {
        for (double phi : {0.0, 2.1}) {
            for (double rel : {0.0, 1.0, kPi}) {
                EXPECT_NEAR(spin_cat(theta, phi, rel, b).amplitudes().norm(), 1.0, 1e-12);
            }
        }
    }
}

TEST(NamedState, NoonAmplitudes) {
    const PureState noon = named_state(NamedState::noon, SpinBasis(20));
    EXPECT_NEAR(std::abs(noon[0]), 1.0 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(std::abs(noon[20]), 1.0 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(qfi(noon, CartesianAxis::z), 400.0, 1e-9);
}

TEST(NamedState, TwinFockAndOatCat) {
    const SpinBasis b(20);
    EXPECT_NEAR(qfi(named_state(NamedState::twin_fock, b), CartesianAxis::y), 220.0, 1e-8);
    EXPECT_NEAR(qfi(named_state(NamedState::oat_cat, b), CartesianAxis::y), 400.0, 1e-8);
    EXPECT_THROW(named_state(NamedState::twin_fock, SpinBasis(5)), Error);
}

TEST(BasisChange, IdentityAndUnitarity) {
    EXPECT_LT(max_abs(basis_change(CartesianAxis::z, CartesianAxis::z, SpinBasis(4)).matrix() - Matrix::Identity(5, 5)), 1e-14);
    const Matrix a = basis_change(CartesianAxis::x, CartesianAxis::z, SpinBasis(6)).matrix();
    EXPECT_LT(max_abs(a.adjoint() * a - Matrix::Identity(7, 7)), 1e-10);
}

TEST(BasisChange, DiagonalizesJx) {
    const SpinBasis b(4);
    const Matrix a = basis_change(CartesianAxis::x, CartesianAxis::z, b).matrix();
    const Matrix d = a.adjoint() * spin_operator(SpinAxis::x, b) * a;
    for (int k = 0; k < 5; ++k) {
        EXPECT_NEAR(d(k, k).real(), b.m(k), 1e-10);
    }
    EXPECT_LT(max_abs(d - Matrix(d.diagonal().asDiagonal())), 1e-10);
}

TEST(ParseAxis, RejectsUnknownNames) {
    EXPECT_EQ(parse_cartesian_axis("y"), CartesianAxis::y);
    EXPECT_THROW(parse_cartesian_axis("w"), Error);
}

}  // namespace
}  // namespace spincat
