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

// metrology.hpp: quantum Fisher information, purity, coherence matrices and
// the closed-form approximations built on them.

#pragma once

#include "spincat/bosonic_mode.hpp"
#include "spincat/semiclassical.hpp"
#include "spincat/types.hpp"

#include <string>
#include <string_view>

namespace spincat {

/// C_mn = <psi_B| exp(-i (lambda_m - lambda_n) G_B tau) |psi_B>.
class CoherenceMatrix {
public:
    explicit CoherenceMatrix(Matrix entries);

    const Matrix& matrix() const noexcept { return entries_; }
    int dim() const noexcept { return static_cast<int>(entries_.rows()); }
    cplx operator()(int m, int n) const { return entries_(m, n); }
    /// C between the extreme eigenvalues (last row, first column).
    cplx c_max() const { return entries_(dim() - 1, 0); }

private:
    Matrix entries_;
};

struct QfiResult {
    double value = 0.0;
    std::string generator_label;
    double eigen_threshold_used = 0.0;
    double discarded_pair_weight = 0.0;
};

/// F = 2 sum_{ij} (l_i - l_j)^2 / (l_i + l_j) |<e_i|G|e_j>|^2 over pairs with
/// l_i + l_j > threshold.
QfiResult qfi_mixed(const DensityMatrix& rho, const HermitianOperator& g, double threshold = 1e-12);

/// 4 V(G).
QfiResult qfi_pure(const PureState& psi, const HermitianOperator& g);

/// 8 (1 - sqrt F_U(rho, e^{-iG d} rho e^{iG d})) / d^2 at d and d/2, combined
/// by Richardson extrapolation. Independent of qfi_mixed; used as a test oracle.
double qfi_fidelity_oracle(const DensityMatrix& rho, const HermitianOperator& g, double dchi = 1e-3);

double purity(const DensityMatrix& rho);

/// G_B may be any Hermitian matrix; it is diagonalized once.
CoherenceMatrix coherence_numeric(const PureState& psi_b, const Matrix& g_b, double tau, const RealVector& eigenvalues);

/// exp[|beta|^2 (e^{-i delta tau} - 1)].
cplx coherence_coherent_analytic(double beta, double tau, int delta);

/// Overlap of D(beta)S(r)|0> with its image under exp(-i delta n tau). The
/// square root is continued from C(0) = 1 along [0, tau]. Below |r| < r_eps
/// the coherent form is used.
cplx coherence_squeezed_analytic(double beta, double r, double tau, int delta, double r_eps = 1e-6);

/// C_delta(tau) for coupling J_z (x) n_B in closed form: the squeezed
/// coherent expression for squeezed_coherent auxiliaries and a pure phase
/// e^{-i delta n tau} for Fock states. Assumes real beta.
cplx number_coupling_coherence(const AuxStateSpec& aux, double tau, int delta);

/// rho_mn = c_m c_n^* C_{m-n}(tau) with the closed-form coherence above.
DensityMatrix reduced_density_number_coupling(const PureState& probe, const AuxStateSpec& aux, double tau);

struct ShortTimePrediction {
    double gamma;
    double f_a;
};

/// gamma ~ exp(-F_B N^2 tau^2 / 8), F_A ~ N^2 exp(-F_B N^2 tau^2 / 4).
ShortTimePrediction short_time_predictions(double f_b, int n_atoms, double tau);

/// N^2 exp(F_B [cos(N tau) - 1] / 2).
double qfi_revival_prediction(double f_b, int n_atoms, double tau);

/// Conversions for two-branch cat states: gamma = (1 + |C_max|^2) / 2 and
/// F_A = N^2 (2 gamma - 1).
namespace cat_identities {
double gamma_from_cmax(double abs_c_max);
double cmax_from_gamma(double gamma);
double qfi_from_gamma(double gamma, int n_atoms);
double gamma_from_qfi(double f_a, int n_atoms);
}  // namespace cat_identities

/// V(Y) = e^{2r} in the squeezing convention of bosonic_mode.
double quadrature_y_variance(double r);

/// F_B = V(Y) / beta^2, F_A ~ N^2 exp(-F_B N^2 / 4) after a pi/2 rotation.
double beamsplitter_generator_prediction(double beta, double r, int n_atoms);

enum class NbTfsRegime { noon_jz, jycat_jz, jycat_bs };

NbTfsRegime parse_nb_tfs_regime(std::string_view name);
std::string_view to_string(NbTfsRegime regime);

/// Closed-form photon budget for keeping F_A >= N^2 / 2 after rotating by
/// `angle`. The jycat_jz value uses the heuristic phase width pi / 3.
double nb_tfs(NbTfsRegime regime, int n_atoms, double angle, double r);

enum class NbTfsEngine { automatic, exact, semiclassical };

struct NbTfsOptions {
    NbTfsEngine engine = NbTfsEngine::automatic;
    int exact_max_atoms = 24;
    double lower = 1.0;
    double upper = 1e7;
    double relative_width = 1e-3;
    CutoffPolicy cutoff{};
    SemiclassicalOptions semiclassical{};
};

struct NbTfsResult {
    double beta_sq = 0.0;
    double n_b = 0.0;
    bool met_at_lower_bracket = false;
    bool monotone = true;
    int evaluations = 0;
    std::string engine;
};

/// Probe QFI after the regime's rotation with the auxiliary `family` rescaled
/// to |beta|^2 (r fixed). The generator is J_z for noon_jz and jycat_bs and J_y
/// for jycat_jz.
double regime_qfi(NbTfsRegime regime, int n_atoms, double angle, const AuxStateSpec& aux, NbTfsEngine engine,
                  const NbTfsOptions& options = {});

/// Smallest |beta|^2 with F_A >= N^2 / 2, by a geometric scan from the closed
/// form followed by bisection in log |beta|^2.
NbTfsResult nb_tfs_empirical(NbTfsRegime regime, int n_atoms, double angle, const AuxStateSpec& family,
                             const NbTfsOptions& options = {});

}  // namespace spincat
