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

#include "spincat/bosonic_mode.hpp"

#include "spincat/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace spincat {

Matrix mode_operator(ModeOperator which, const FockBasis& basis) {
    const int d = basis.dim();
    Matrix b = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    switch (which) {
        case ModeOperator::annihilation: return b;
        case ModeOperator::number: {
            Matrix n = Matrix::Zero(d, d);
            for (int k = 0; k < d; ++k) n(k, k) = k;
            return n;
        }
        case ModeOperator::X: return b + b.adjoint();
        case ModeOperator::Y: return -kI * (b - b.adjoint());
    }
    return {};
}

HermitianOperator number_operator(const FockBasis& basis) {
    return HermitianOperator(mode_operator(ModeOperator::number, basis), "n_B");
}

HermitianOperator quadrature_x(const FockBasis& basis) {
    return HermitianOperator(mode_operator(ModeOperator::X, basis), "X");
}

HermitianOperator quadrature_y(const FockBasis& basis) {
    return HermitianOperator(mode_operator(ModeOperator::Y, basis), "Y");
}

AuxKind parse_aux_kind(std::string_view name) {
    if (name == "squeezed_coherent" || name == "coherent") return AuxKind::squeezed_coherent;
    if (name == "fock") return AuxKind::fock;
    fail(ErrorKind::InvalidArgument, "unknown auxiliary state kind '" + std::string(name) + "'");
}

std::string_view to_string(AuxKind kind) {
    return kind == AuxKind::fock ? "fock" : "squeezed_coherent";
}

double AuxStateSpec::mean_photon_number() const {
    if (kind == AuxKind::fock) return fock_n;
    const double s = std::sinh(r);
    return std::norm(beta) + s * s;
}

double AuxStateSpec::number_variance() const {
    if (kind == AuxKind::fock) return 0.0;
    require(std::abs(beta.imag()) <= 1e-14 * std::max(1.0, std::abs(beta)), ErrorKind::InvalidArgument,
            "closed-form number variance assumes real beta");
    const double s = std::sinh(r);
    const double c = std::cosh(r);
    return std::norm(beta) * std::exp(-2.0 * r) + 2.0 * s * s * c * c;
}

namespace {

Vector coherent_amplitudes(cplx alpha, int dim) {
    Vector psi = Vector::Zero(dim);
    const double magnitude = std::abs(alpha);
    if (magnitude == 0.0) {
        psi[0] = 1.0;
        return psi;
    }
    const double phase = std::arg(alpha);
    for (int n = 0; n < dim; ++n) {
        const double log_amp = -0.5 * magnitude * magnitude + n * std::log(magnitude) - 0.5 * std::lgamma(n + 1.0);
        psi[n] = std::polar(std::exp(log_amp), n * phase);
    }
    return psi;
}

// <n|D(beta) S(r)|0> as the overlap of the Gaussian wavefunction with the
// Hermite functions psi_n(q). The Hermite recurrence carries a separate log
// scale so that far-out q and large n neither overflow nor underflow. The
// trapezoid rule is spectrally accurate once the grid resolves the highest
// wavenumber of the integrand.
Vector gaussian_fock_amplitudes(cplx beta, double r, int dim) {
    const double s = std::exp(-r);  // position width, V(q) = s^2 / 2
    const double q0 = std::sqrt(2.0) * beta.real();
    const double p0 = std::sqrt(2.0) * beta.imag();
    const double half_span = 14.0 * s;
    const double k_max = std::sqrt(2.0 * dim + 3.0) + std::abs(p0) + 10.0 / s;
    const int points = 2 * static_cast<int>(std::ceil(half_span * k_max / (0.8 * 2.0 * std::numbers::pi))) + 1;
    const double h = 2.0 * half_span / (points - 1);
    const double norm = std::pow(std::numbers::pi * s * s, -0.25) * std::pow(std::numbers::pi, -0.25);
    constexpr double kBig = 1e150;
    const double log_big = std::log(kBig);
    RealVector up(dim);
    RealVector down(dim);
    for (int n = 0; n + 1 < dim; ++n) {
        up[n] = std::sqrt(2.0 / (n + 1.0));
        down[n] = std::sqrt(n / (n + 1.0));
    }
    Vector out = Vector::Zero(dim);
    for (int j = 0; j < points; ++j) {
        const double q = q0 - half_span + j * h;
        const double dq = q - q0;
        double scale = -0.5 * q * q - dq * dq / (2.0 * s * s);
        const cplx phase = std::polar(h * norm, p0 * q - 0.5 * p0 * q0);
        double prev = 0.0;
        double cur = 1.0;
        for (int n = 0; n < dim; ++n) {
            if (scale > -745.0) out[n] += phase * (cur * std::exp(scale));
            if (n + 1 == dim) break;
            const double next = up[n] * q * cur - down[n] * prev;
            prev = cur;
            cur = next;
            if (std::abs(cur) > kBig) {
                cur /= kBig;
                prev /= kBig;
                scale += log_big;
            }
        }
    }
    return out;
}

}  // namespace

PureState squeezed_coherent(const AuxStateSpec& spec, const FockBasis& basis) {
    require(spec.kind == AuxKind::squeezed_coherent, ErrorKind::InvalidArgument, "spec is not a squeezed coherent state");
    require(std::isfinite(spec.r) && std::isfinite(std::abs(spec.beta)), ErrorKind::InvalidArgument,
            "non-finite squeezed coherent parameters");
    Vector psi = spec.r == 0.0 ? coherent_amplitudes(spec.beta, basis.dim())
                               : gaussian_fock_amplitudes(spec.beta, spec.r, basis.dim());
    require(std::abs(psi[basis.n_cut()]) <= 1e-6 && psi.squaredNorm() >= 1.0 - 1e-6, ErrorKind::TruncationError,
            "state is not contained below the Fock cutoff; raise n_cut");
    return PureState::normalized(basis, std::move(psi));
}

PureState fock_state(int n, const FockBasis& basis) {
    require(n >= 0 && n <= basis.n_cut(), ErrorKind::IndexOutOfRange,
            "Fock level " + std::to_string(n) + " outside [0, " + std::to_string(basis.n_cut()) + "]");
    Vector psi = Vector::Zero(basis.dim());
    psi[n] = 1.0;
    return PureState(basis, std::move(psi));
}

PureState aux_state(const AuxStateSpec& spec, const FockBasis& basis) {
    return spec.kind == AuxKind::fock ? fock_state(spec.fock_n, basis) : squeezed_coherent(spec, basis);
}

double expectation(const PureState& state, const Matrix& op) {
    require(op.rows() == state.dim() && op.cols() == state.dim(), ErrorKind::DimensionMismatch,
            "operator and state dimensions differ");
    return state.amplitudes().dot(op * state.amplitudes()).real();
}

double variance(const PureState& state, const Matrix& op) {
    require(op.rows() == state.dim() && op.cols() == state.dim(), ErrorKind::DimensionMismatch,
            "operator and state dimensions differ");
    const Vector g_psi = op * state.amplitudes();
    const double mean = state.amplitudes().dot(g_psi).real();
    return std::max(0.0, g_psi.squaredNorm() - mean * mean);
}

double aux_qfi(const PureState& state, const Matrix& generator) {
    require(hermiticity_defect(generator) <= 1e-10 * std::max(1.0, max_abs(generator)), ErrorKind::InvalidArgument,
            "auxiliary generator is not Hermitian");
    return 4.0 * variance(state, generator);
}

double tail_probability(const PureState& state, int from_level) {
    double tail = 0.0;
    for (int n = std::max(0, from_level + 1); n < state.dim(); ++n) tail += std::norm(state[n]);
    return tail;
}

FockBasis choose_cutoff(const AuxStateSpec& spec, const CutoffPolicy& policy) {
    require(policy.tolerance > 0.0 && policy.tolerance <= 1e-3, ErrorKind::InvalidArgument,
            "cutoff tolerance must lie in (0, 1e-3]");
    if (spec.kind == AuxKind::fock) {
        require(spec.fock_n >= 0, ErrorKind::InvalidArgument, "negative Fock level");
        const int n_cut = std::max(spec.fock_n + 2, 2);
        require(n_cut <= policy.ceiling, ErrorKind::CutoffSearchFailed, "Fock level exceeds the cutoff ceiling");
        return FockBasis(n_cut, 0.0);
    }
    const double n_b = spec.mean_photon_number();
    const double width = std::exp(std::abs(spec.r)) * std::sqrt(n_b + 1.0);
    int previous = -1;
    for (double c = 8.0;; c += 2.0) {
        const int n_cut = std::max(2, static_cast<int>(std::ceil(n_b + c * width)));
        require(n_cut <= policy.ceiling, ErrorKind::CutoffSearchFailed,
                "required Fock cutoff exceeds the ceiling of " + std::to_string(policy.ceiling));
        if (n_cut == previous) continue;
        previous = n_cut;
        const FockBasis trial(n_cut);
        try {
            const PureState psi = squeezed_coherent(spec, trial);
            const double leakage = tail_probability(psi, n_cut - 2);
            if (leakage < policy.tolerance) return FockBasis(n_cut, leakage);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::TruncationError) throw;
        }
    }
}

}  // namespace spincat
