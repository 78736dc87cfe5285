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

#include "spincat/semiclassical.hpp"

#include "spincat/error.hpp"

#include <cmath>

namespace spincat {

GaussianNoiseSpec::GaussianNoiseSpec(double mean_, double sigma_) : mean(mean_), sigma(sigma_) {
    require(std::isfinite(mean) && std::isfinite(sigma), ErrorKind::InvalidArgument, "noise moments must be finite");
    require(sigma >= 0.0, ErrorKind::InvalidArgument, "noise width must be nonnegative");
}

QuadratureGrid gaussian_grid(const GaussianNoiseSpec& spec, int n_points, double span_sigmas) {
    require(n_points >= 3 && n_points % 2 == 1, ErrorKind::InvalidArgument, "grid needs an odd number of points >= 3");
    require(span_sigmas > 0.0, ErrorKind::InvalidArgument, "grid span must be positive");
    QuadratureGrid grid;
    if (spec.sigma == 0.0) {
        grid.nodes = {spec.mean};
        grid.weights = {1.0};
        return grid;
    }
    const int half = n_points / 2;
    const double step = span_sigmas * spec.sigma / half;
    grid.nodes.resize(n_points);
    grid.weights.resize(n_points);
    double total = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double u = (k - half) * step;
        grid.nodes[k] = spec.mean + u;
        grid.weights[k] = std::exp(-0.5 * (u / spec.sigma) * (u / spec.sigma));
        total += grid.weights[k];
    }
    for (double& w : grid.weights) w /= total;
    return grid;
}

cplx gaussian_coherence(double d, const GaussianNoiseSpec& spec) {
    return std::exp(-kI * (d * spec.mean)) * std::exp(-0.5 * d * d * spec.sigma * spec.sigma);
}

namespace {

const SpinBasis& probe_basis(const PureState& psi) {
    const auto* basis = std::get_if<SpinBasis>(&psi.basis());
    require(basis != nullptr, ErrorKind::DimensionMismatch, "semiclassical averaging needs a probe (spin) state");
    return *basis;
}

// Multiplies rho_mn by E[e^{-i (m - n) x}] in whatever basis rho is written;
// the basis labels m run from -j to j.
void dephase(Matrix& rho, const GaussianNoiseSpec& noise) {
    const int d = static_cast<int>(rho.rows());
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            if (m != n) rho(m, n) *= gaussian_coherence(static_cast<double>(m - n), noise);
        }
    }
}

// Same average on the quadrature grid: sum_k w_k e^{-i x_k J} rho e^{i x_k J}
// for J diagonal with entries m.
void dephase_on_grid(Matrix& rho, const GaussianNoiseSpec& noise, const SemiclassicalOptions& options) {
    const QuadratureGrid grid = gaussian_grid(noise, options.grid_points, options.span_sigmas);
    const int d = static_cast<int>(rho.rows());
    Matrix averaged = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        for (int m = 0; m < d; ++m) {
            for (int n = 0; n < d; ++n) {
                averaged(m, n) += grid.weights[k] * std::exp(-kI * (static_cast<double>(m - n) * grid.nodes[k])) * rho(m, n);
            }
        }
    }
    rho = std::move(averaged);
}

void average(Matrix& rho, const GaussianNoiseSpec& noise, const SemiclassicalOptions& options) {
    if (options.quadrature) {
        dephase_on_grid(rho, noise, options);
    } else {
        dephase(rho, noise);
    }
}

DensityMatrix finish(Matrix rho) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const cplx trace = rho.trace();
    rho /= trace.real();
    return DensityMatrix(std::move(rho));
}

}  // namespace

DensityMatrix semiclassical_jz(const PureState& psi, const GaussianNoiseSpec& noise, const SemiclassicalOptions& options) {
    probe_basis(psi);
    Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
    average(rho, noise, options);
    return finish(std::move(rho));
}

OpticalNoise noise_from_optics(const AuxStateSpec& aux, double tau) {
    require(aux.kind == AuxKind::squeezed_coherent, ErrorKind::InvalidArgument,
            "a Fock auxiliary has no mean field to define rotation angles");
    require(std::abs(aux.beta.imag()) <= 1e-14 * std::max(1.0, std::abs(aux.beta)) && aux.beta.real() > 0.0,
            ErrorKind::InvalidArgument, "noise relations need real beta > 0");
    require(std::isfinite(tau) && tau >= 0.0, ErrorKind::InvalidArgument, "tau must be finite and nonnegative");
    const AuxStateSpec vacuum = AuxStateSpec::squeezed(0.0, aux.r);
    const FockBasis basis = choose_cutoff(vacuum);
    const PureState squeezed = squeezed_coherent(vacuum, basis);
    OpticalNoise out;
    out.var_x = variance(squeezed, mode_operator(ModeOperator::X, basis));
    out.var_y = variance(squeezed, mode_operator(ModeOperator::Y, basis));
    const double beta = aux.beta.real();
    const double theta = 2.0 * beta * tau;
    out.theta = GaussianNoiseSpec(theta, std::sqrt(theta * theta * out.var_x / (4.0 * beta * beta)));
    out.phi = GaussianNoiseSpec(0.0, std::sqrt(out.var_y / (4.0 * beta * beta)));
    return out;
}

DensityMatrix semiclassical_bs(const PureState& psi, const GaussianNoiseSpec& theta_noise,
                               const GaussianNoiseSpec& phi_noise, const SemiclassicalOptions& options) {
    const SpinBasis& basis = probe_basis(psi);
    // Columns: J_x eigenvectors in the J_z basis.
    const Matrix x_in_z = basis_change(CartesianAxis::x, CartesianAxis::z, basis).matrix();
    const Matrix jz = spin_operator(SpinAxis::z, basis);

    // theta average in the J_x eigenbasis, applied to a projector in the J_z basis.
    const auto theta_average = [&](const Vector& v) {
        const Vector in_x = x_in_z.adjoint() * v;
        Matrix rho = in_x * in_x.adjoint();
        average(rho, theta_noise, options);
        return Matrix(x_in_z * rho * x_in_z.adjoint());
    };

    if (options.neglect_initial_dephasing || phi_noise.sigma == 0.0) {
        Vector start = psi.amplitudes();
        if (!options.neglect_initial_dephasing) {
            start = expm_hermitian(jz, -phi_noise.mean) * start;
        }
        Matrix rho = theta_average(start);
        average(rho, phi_noise, options);
        return finish(std::move(rho));
    }

    // phi enters on both sides of the x rotation, so it is integrated on the grid.
    const QuadratureGrid grid = gaussian_grid(phi_noise, options.grid_points, options.span_sigmas);
    const int d = basis.dim();
    Matrix rho = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        const double phi = grid.nodes[k];
        Vector start(d);
        Vector phase_out(d);
        for (int i = 0; i < d; ++i) {
            start[i] = std::exp(kI * (basis.m(i) * phi)) * psi[i];
            phase_out[i] = std::exp(-kI * (basis.m(i) * phi));
        }
        const Matrix rotated = theta_average(start);
        rho += grid.weights[k] * (phase_out.asDiagonal() * rotated * phase_out.conjugate().asDiagonal());
    }
    return finish(std::move(rho));
}

}  // namespace spincat
