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

// bosonic_mode.hpp: truncated single-mode auxiliary field.
//
// Squeezed coherent states are D(beta) S(r)|0> with
//   D(beta) = exp(beta b^dag - beta^* b),  S(r) = exp[r (b^2 - b^dag^2) / 2].
// For real beta, r > 0 squeezes the amplitude quadrature X = b + b^dag
// (V(X) = e^{-2r}) and r < 0 squeezes the phase quadrature Y = -i(b - b^dag).
//
// Every construction goes through a FockBasis produced by choose_cutoff, which
// is the single place where the truncation budget is decided.

#pragma once

#include "spincat/types.hpp"

#include <string_view>

namespace spincat {

enum class ModeOperator { annihilation, number, X, Y };

Matrix mode_operator(ModeOperator which, const FockBasis& basis);

HermitianOperator number_operator(const FockBasis& basis);
HermitianOperator quadrature_x(const FockBasis& basis);
HermitianOperator quadrature_y(const FockBasis& basis);

enum class AuxKind { squeezed_coherent, fock };

AuxKind parse_aux_kind(std::string_view name);
std::string_view to_string(AuxKind kind);

struct AuxStateSpec {
    AuxKind kind = AuxKind::squeezed_coherent;
    cplx beta{0.0, 0.0};
    double r = 0.0;
    int fock_n = 0;

    static AuxStateSpec coherent(double beta) { return {AuxKind::squeezed_coherent, beta, 0.0, 0}; }
    static AuxStateSpec squeezed(double beta, double r) { return {AuxKind::squeezed_coherent, beta, r, 0}; }
    static AuxStateSpec fock(int n) { return {AuxKind::fock, 0.0, 0.0, n}; }

    /// |beta|^2 + sinh^2 r, or n for a Fock state.
    double mean_photon_number() const;
    /// Closed-form V(n): |beta|^2 e^{-2r} + 2 sinh^2 r cosh^2 r for real beta; 0 for Fock.
    double number_variance() const;
};

/// D(beta) S(r)|0> on `basis`. Throws TruncationError when |amplitude(n_cut)| > 1e-6
/// or more than 1e-6 of the norm lies above n_cut.
PureState squeezed_coherent(const AuxStateSpec& spec, const FockBasis& basis);

PureState fock_state(int n, const FockBasis& basis);

/// Builds whichever state `spec` describes.
PureState aux_state(const AuxStateSpec& spec, const FockBasis& basis);

/// 4 (<G^2> - <G>^2).
double aux_qfi(const PureState& state, const Matrix& generator);

struct CutoffPolicy {
    double tolerance = 1e-10;
    int ceiling = 4096;
};

/// Smallest n_cut = ceil(N_B + c e^{|r|} sqrt(N_B + 1)), c = 8, 10, 12, ...,
/// whose constructed state keeps the probability beyond n_cut - 2 below the
/// tolerance. The returned basis records the achieved leakage.
FockBasis choose_cutoff(const AuxStateSpec& spec, const CutoffPolicy& policy = {});

/// Probability in Fock levels above `from_level`.
double tail_probability(const PureState& state, int from_level);

double expectation(const PureState& state, const Matrix& op);
double variance(const PureState& state, const Matrix& op);

}  // namespace spincat
