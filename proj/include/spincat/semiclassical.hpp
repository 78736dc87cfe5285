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

// semiclassical.hpp: the probe state as a Gaussian mixture of classically
// rotated pure states.
//
// The auxiliary field is replaced by random rotation angles. Averages over an
// angle whose generator is diagonal in a known basis are done in closed form
// (each off-diagonal element picks up e^{-i d mean} e^{-d^2 sigma^2 / 2});
// the quadrature grid is kept as an independent path.

#pragma once

#include "spincat/bosonic_mode.hpp"
#include "spincat/spin_algebra.hpp"
#include "spincat/types.hpp"

#include <vector>

namespace spincat {

struct GaussianNoiseSpec {
    double mean = 0.0;
    double sigma = 0.0;

    GaussianNoiseSpec() = default;
    GaussianNoiseSpec(double mean, double sigma);
};

struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Uniform nodes on mean +/- span * sigma with renormalized Gaussian weights.
/// sigma = 0 gives the single node (mean, 1).
QuadratureGrid gaussian_grid(const GaussianNoiseSpec& spec, int n_points = 201, double span_sigmas = 6.0);

/// E[e^{-i d x}] for x ~ N(mean, sigma^2).
cplx gaussian_coherence(double d, const GaussianNoiseSpec& spec);

struct SemiclassicalOptions {
    int grid_points = 201;
    double span_sigmas = 6.0;
    /// Average every angle on the quadrature grid instead of in closed form.
    bool quadrature = false;
    /// Beam splitter only: drop the e^{+i phi J_z} factor that precedes the
    /// x rotation, so both averages factor (closed form in both bases).
    bool neglect_initial_dephasing = false;
};

/// Average of e^{-i J_z phi}|psi><psi|e^{i J_z phi} over phi ~ noise.
DensityMatrix semiclassical_jz(const PureState& psi, const GaussianNoiseSpec& noise,
                               const SemiclassicalOptions& options = {});

struct OpticalNoise {
    GaussianNoiseSpec theta;
    GaussianNoiseSpec phi;
    double var_x = 1.0;
    double var_y = 1.0;
};

/// Rotation-angle statistics of a squeezed coherent field with real beta > 0
/// acting for time tau through the beam splitter:
///   theta ~ N(2 beta tau, theta^2 V(X) / (4 beta^2)),  phi ~ N(0, V(Y) / (4 beta^2)).
/// V(X) and V(Y) are computed on a truncated basis from S(r)|0>.
OpticalNoise noise_from_optics(const AuxStateSpec& aux, double tau);

/// Average of U|psi><psi|U^dag over theta ~ theta_noise, phi ~ phi_noise with
///   U = e^{-i phi J_z} e^{-i theta J_x} e^{+i phi J_z}
/// (the rotation about an axis at azimuth phi in the equatorial plane). With
/// neglect_initial_dephasing the last factor is dropped.
DensityMatrix semiclassical_bs(const PureState& psi, const GaussianNoiseSpec& theta_noise,
                               const GaussianNoiseSpec& phi_noise, const SemiclassicalOptions& options = {});

}  // namespace spincat
