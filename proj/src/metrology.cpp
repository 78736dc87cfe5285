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

#include "spincat/metrology.hpp"

#include "spincat/composite_evolution.hpp"
#include "spincat/error.hpp"
#include "spincat/spin_algebra.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace spincat {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

CoherenceMatrix::CoherenceMatrix(Matrix entries) : entries_(std::move(entries)) {
    require(entries_.rows() > 0 && entries_.rows() == entries_.cols(), ErrorKind::DimensionMismatch,
            "coherence matrix must be square and nonempty");
    const int d = dim();
    for (int m = 0; m < d; ++m) {
        entries_(m, m) = 1.0;
        for (int n = m + 1; n < d; ++n) {
            require(std::abs(entries_(n, m) - std::conj(entries_(m, n))) <= 1e-10, ErrorKind::InvalidArgument,
                    "coherence matrix is not Hermitian");
            require(std::abs(entries_(m, n)) <= 1.0 + 1e-12, ErrorKind::InvalidArgument,
                    "coherence matrix entry exceeds unit modulus");
            entries_(n, m) = std::conj(entries_(m, n));
        }
    }
}

QfiResult qfi_mixed(const DensityMatrix& rho, const HermitianOperator& g, double threshold) {
    require(g.dim() == rho.dim(), ErrorKind::DimensionMismatch, "generator and density matrix dimensions differ");
    require(threshold > 0.0, ErrorKind::InvalidArgument, "eigenvalue threshold must be positive");
    const HermitianSpectrum& spec = rho.spectrum();
    const Matrix g_eigen = spec.vectors.adjoint() * g.matrix() * spec.vectors;
    const int d = rho.dim();
    QfiResult out;
    out.generator_label = g.label();
    out.eigen_threshold_used = threshold;
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
        const double li = std::max(spec.values[i], 0.0);
        for (int j = 0; j < d; ++j) {
            const double lj = std::max(spec.values[j], 0.0);
            const double weight = std::norm(g_eigen(i, j));
            if (li + lj <= threshold) {
                out.discarded_pair_weight += weight;
                continue;
            }
            total += (li - lj) * (li - lj) / (li + lj) * weight;
        }
    }
    out.value = 2.0 * total;
    return out;
}

QfiResult qfi_pure(const PureState& psi, const HermitianOperator& g) {
    require(g.dim() == psi.dim(), ErrorKind::DimensionMismatch, "generator and state dimensions differ");
    const Vector g_psi = g.matrix() * psi.amplitudes();
    const double mean = psi.amplitudes().dot(g_psi).real();
    QfiResult out;
    out.value = std::max(0.0, 4.0 * (g_psi.squaredNorm() - mean * mean));
    out.generator_label = g.label();
    return out;
}

namespace {

Matrix clamped_sqrt(const HermitianSpectrum& spec) {
    RealVector roots(spec.values.size());
    for (Eigen::Index i = 0; i < roots.size(); ++i) roots[i] = spec.values[i] > 1e-13 ? std::sqrt(spec.values[i]) : 0.0;
    return spec.vectors * roots.asDiagonal() * spec.vectors.adjoint();
}

double bures_estimate(const Matrix& sqrt_rho, const HermitianSpectrum& g_spec, double delta) {
    const Matrix u = spectral_propagator(g_spec, delta);
    const Matrix sqrt_sigma = u * sqrt_rho * u.adjoint();
    const Matrix product = sqrt_rho * sqrt_sigma;
    const double root_fidelity = Eigen::JacobiSVD<Matrix>(product).singularValues().sum();
    return 8.0 * (1.0 - root_fidelity) / (delta * delta);
}

}  // namespace

double qfi_fidelity_oracle(const DensityMatrix& rho, const HermitianOperator& g, double dchi) {
    require(g.dim() == rho.dim(), ErrorKind::DimensionMismatch, "generator and density matrix dimensions differ");
    require(dchi >= 1e-5 && dchi <= 1e-3, ErrorKind::InvalidArgument, "dchi must lie in [1e-5, 1e-3]");
    const Matrix sqrt_rho = clamped_sqrt(rho.spectrum());
    const HermitianSpectrum g_spec = hermitian_spectrum(g.matrix());
    const double coarse = bures_estimate(sqrt_rho, g_spec, dchi);
    const double fine = bures_estimate(sqrt_rho, g_spec, 0.5 * dchi);
    const double extrapolated = (4.0 * fine - coarse) / 3.0;
    const double scale = std::max(std::abs(extrapolated), 1e-6);
    require(std::abs(fine - extrapolated) <= 0.01 * scale || std::abs(fine - extrapolated) <= 1e-6,
            ErrorKind::NumericalInstability, "fidelity-based QFI estimates disagree between step sizes");
    return std::max(0.0, extrapolated);
}

double purity(const DensityMatrix& rho) {
    return rho.matrix().squaredNorm();
}

CoherenceMatrix coherence_numeric(const PureState& psi_b, const Matrix& g_b, double tau, const RealVector& eigenvalues) {
    require(g_b.rows() == psi_b.dim() && g_b.cols() == psi_b.dim(), ErrorKind::DimensionMismatch,
            "auxiliary generator and state dimensions differ");
    require(eigenvalues.size() > 0, ErrorKind::InvalidArgument, "no probe eigenvalues");
    const HermitianSpectrum spec = hermitian_spectrum(g_b);
    const RealVector populations = (spec.vectors.adjoint() * psi_b.amplitudes()).cwiseAbs2();
    const int d = static_cast<int>(eigenvalues.size());
    Matrix c = Matrix::Identity(d, d);
    for (int m = 0; m < d; ++m) {
        for (int n = m + 1; n < d; ++n) {
            const double shift = (eigenvalues[m] - eigenvalues[n]) * tau;
            cplx sum = 0.0;
            for (Eigen::Index k = 0; k < populations.size(); ++k) sum += populations[k] * std::exp(-kI * (shift * spec.values[k]));
            c(m, n) = sum;
            c(n, m) = std::conj(sum);
        }
    }
    return CoherenceMatrix(std::move(c));
}

cplx coherence_coherent_analytic(double beta, double tau, int delta) {
    return std::exp(beta * beta * (std::exp(-kI * (static_cast<double>(delta) * tau)) - 1.0));
}

cplx coherence_squeezed_analytic(double beta, double r, double tau, int delta, double r_eps) {
    require(std::isfinite(beta) && std::isfinite(r) && std::isfinite(tau), ErrorKind::InvalidArgument,
            "non-finite coherence parameters");
    if (std::abs(r) < r_eps) return coherence_coherent_analytic(beta, tau, delta);
    const double ch = std::cosh(r);
    const double sh = std::sinh(r);
    const double coth = ch / sh;
    const double angle = static_cast<double>(delta) * tau;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(angle) / 0.05)));
    cplx root = 1.0;
    for (int s = 1; s <= steps; ++s) {
        const double a = angle * s / steps;
        const cplx candidate = std::sqrt(ch * ch - std::exp(-2.0 * kI * a) * sh * sh);
        const cplx chosen = std::abs(candidate - root) <= std::abs(candidate + root) ? candidate : -candidate;
        require(std::abs(std::arg(chosen / root)) <= kPi / 2.0, ErrorKind::BranchTrackingFailure,
                "square-root branch jumped between adjacent tau samples");
        root = chosen;
    }
    const cplx phase = std::exp(-kI * angle);
    return std::exp(beta * beta * (1.0 + coth) * (phase - 1.0) / (phase + coth)) / root;
}

ShortTimePrediction short_time_predictions(double f_b, int n_atoms, double tau) {
    const double n2 = static_cast<double>(n_atoms) * n_atoms;
    return {std::exp(-f_b * n2 * tau * tau / 8.0), n2 * std::exp(-f_b * n2 * tau * tau / 4.0)};
}

double qfi_revival_prediction(double f_b, int n_atoms, double tau) {
    const double n2 = static_cast<double>(n_atoms) * n_atoms;
    return n2 * std::exp(0.5 * f_b * (std::cos(n_atoms * tau) - 1.0));
}

namespace cat_identities {

double gamma_from_cmax(double abs_c_max) {
    require(abs_c_max >= 0.0 && abs_c_max <= 1.0 + 1e-12, ErrorKind::RangeError, "|C_max| must lie in [0, 1]");
    return 0.5 * (1.0 + abs_c_max * abs_c_max);
}

double cmax_from_gamma(double gamma) {
    require(gamma >= 0.5 - 1e-12 && gamma <= 1.0 + 1e-12, ErrorKind::RangeError, "purity must lie in [1/2, 1]");
    return std::sqrt(std::max(0.0, 2.0 * gamma - 1.0));
}

double qfi_from_gamma(double gamma, int n_atoms) {
    require(gamma >= 0.5 - 1e-12 && gamma <= 1.0 + 1e-12, ErrorKind::RangeError, "purity must lie in [1/2, 1]");
    return static_cast<double>(n_atoms) * n_atoms * (2.0 * gamma - 1.0);
}

double gamma_from_qfi(double f_a, int n_atoms) {
    const double n2 = static_cast<double>(n_atoms) * n_atoms;
    require(n_atoms > 0 && f_a >= -1e-12 * n2 && f_a <= n2 * (1.0 + 1e-12), ErrorKind::RangeError,
            "QFI must lie in [0, N^2]");
    return 0.5 * (1.0 + f_a / n2);
}

}  // namespace cat_identities

double quadrature_y_variance(double r) {
    return std::exp(2.0 * r);
}

double beamsplitter_generator_prediction(double beta, double r, int n_atoms) {
    require(beta > 0.0 && std::isfinite(beta), ErrorKind::InvalidArgument, "beta must be real and positive");
    const double n2 = static_cast<double>(n_atoms) * n_atoms;
    const double f_b = quadrature_y_variance(r) / (beta * beta);
    return n2 * std::exp(-f_b * n2 / 4.0);
}

NbTfsRegime parse_nb_tfs_regime(std::string_view name) {
    if (name == "noon_jz") return NbTfsRegime::noon_jz;
    if (name == "jycat_jz") return NbTfsRegime::jycat_jz;
    if (name == "jycat_bs") return NbTfsRegime::jycat_bs;
    fail(ErrorKind::InvalidArgument, "unknown photon-budget regime '" + std::string(name) + "'");
}

std::string_view to_string(NbTfsRegime regime) {
    switch (regime) {
        case NbTfsRegime::noon_jz: return "noon_jz";
        case NbTfsRegime::jycat_jz: return "jycat_jz";
        case NbTfsRegime::jycat_bs: return "jycat_bs";
    }
    return "?";
}

namespace {

void require_bs_angle(double angle) {
    require(std::abs(angle - kPi / 2.0) <= 1e-12, ErrorKind::UnsupportedAngle,
            "the beam-splitter photon budget is defined for a pi/2 rotation only");
}

}  // namespace

double nb_tfs(NbTfsRegime regime, int n_atoms, double angle, double r) {
    require(angle > 0.0 && std::isfinite(angle), ErrorKind::InvalidArgument, "rotation angle must be positive");
    require(n_atoms >= 1, ErrorKind::InvalidArgument, "need at least one atom");
    const double n2 = static_cast<double>(n_atoms) * n_atoms;
    switch (regime) {
        case NbTfsRegime::noon_jz: return angle * angle * std::exp(-2.0 * r) * n2 / std::numbers::ln2;
        case NbTfsRegime::jycat_jz: {
            const double ratio = angle / (kPi / 3.0);
            return ratio * ratio * std::exp(-2.0 * r);
        }
        case NbTfsRegime::jycat_bs:
            require_bs_angle(angle);
            return std::exp(2.0 * r) * n2 / (4.0 * std::numbers::ln2);
    }
    fail(ErrorKind::InvalidArgument, "unknown regime");
}

cplx number_coupling_coherence(const AuxStateSpec& aux, double tau, int delta) {
    if (aux.kind == AuxKind::fock) return std::exp(-kI * (static_cast<double>(delta) * aux.fock_n * tau));
    return coherence_squeezed_analytic(aux.beta.real(), aux.r, tau, delta);
}

DensityMatrix reduced_density_number_coupling(const PureState& probe, const AuxStateSpec& aux, double tau) {
    require(std::holds_alternative<SpinBasis>(probe.basis()), ErrorKind::DimensionMismatch, "expected a probe state");
    const int d = probe.dim();
    std::vector<cplx> table(2 * d - 1);
    for (int delta = -(d - 1); delta <= d - 1; ++delta) table[delta + d - 1] = number_coupling_coherence(aux, tau, delta);
    Matrix rho(d, d);
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) rho(m, n) = probe[m] * std::conj(probe[n]) * table[m - n + d - 1];
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

double regime_qfi(NbTfsRegime regime, int n_atoms, double angle, const AuxStateSpec& aux, NbTfsEngine engine,
                  const NbTfsOptions& options) {
    const SpinBasis basis(n_atoms);
    if (engine == NbTfsEngine::automatic) {
        engine = n_atoms > options.exact_max_atoms ? NbTfsEngine::semiclassical : NbTfsEngine::exact;
    }
    const bool jz_coupling = regime != NbTfsRegime::jycat_bs;
    const PureState probe = regime == NbTfsRegime::noon_jz ? named_state(NamedState::noon, basis)
                                                           : spin_cat(kPi / 2.0, 0.0, 0.0, basis);
    const HermitianOperator g = spin_component(regime == NbTfsRegime::jycat_jz ? CartesianAxis::y : CartesianAxis::z, basis);

    if (jz_coupling) {
        const double n_b = aux.mean_photon_number();
        require(n_b > 0.0, ErrorKind::InvalidArgument, "the auxiliary field is empty");
        const double tau = angle / n_b;
        if (engine == NbTfsEngine::exact) return qfi_mixed(reduced_density_number_coupling(probe, aux, tau), g).value;
        const GaussianNoiseSpec noise(n_b * tau, std::sqrt(aux.number_variance()) * tau);
        return qfi_mixed(semiclassical_jz(probe, noise, options.semiclassical), g).value;
    }

    require_bs_angle(angle);
    require(aux.kind == AuxKind::squeezed_coherent && aux.beta.real() > 0.0, ErrorKind::InvalidArgument,
            "the beam-splitter regime needs real beta > 0");
    const double tau = angle / (2.0 * aux.beta.real());
    if (engine == NbTfsEngine::exact) {
        const FockBasis fock = choose_cutoff(aux, options.cutoff);
        const CompositeBasis composite(basis, fock);
        const PureState psi0 = product_state(probe, aux_state(aux, fock));
        const PureState psi = Propagator::build(beamsplitter_hamiltonian(composite)).evolve(psi0, tau);
        return qfi_mixed(partial_trace_B(psi), g).value;
    }
    const OpticalNoise noise = noise_from_optics(aux, tau);
    return qfi_mixed(semiclassical_bs(probe, noise.theta, noise.phi, options.semiclassical), g).value;
}

NbTfsResult nb_tfs_empirical(NbTfsRegime regime, int n_atoms, double angle, const AuxStateSpec& family,
                             const NbTfsOptions& options) {
    require(options.lower > 0.0 && options.upper > options.lower, ErrorKind::InvalidArgument, "invalid bracket");
    require(options.relative_width > 0.0, ErrorKind::InvalidArgument, "bisection width must be positive");
    NbTfsEngine engine = options.engine;
    if (engine == NbTfsEngine::automatic) {
        engine = n_atoms > options.exact_max_atoms ? NbTfsEngine::semiclassical : NbTfsEngine::exact;
    }
    const double threshold = 0.5 * static_cast<double>(n_atoms) * n_atoms;
    NbTfsResult result;
    result.engine = engine == NbTfsEngine::exact ? "exact" : "semiclassical";

    if (family.kind == AuxKind::fock) {
        ++result.evaluations;
        require(regime_qfi(regime, n_atoms, angle, family, engine, options) >= threshold, ErrorKind::BracketFailure,
                "Fock auxiliary never reaches the threshold");
        result.beta_sq = options.lower;
        result.n_b = options.lower;
        result.met_at_lower_bracket = true;
        return result;
    }

    const auto at = [&](double beta_sq) {
        AuxStateSpec aux = family;
        aux.beta = std::sqrt(beta_sq);
        ++result.evaluations;
        return regime_qfi(regime, n_atoms, angle, aux, engine, options);
    };

    // Start above the closed-form estimate, climb until the threshold is met,
    // then walk down geometrically until it is lost.
    const double guess = std::clamp(2.0 * nb_tfs(regime, n_atoms, angle, family.r), options.lower, options.upper);
    double hi = guess;
    double f_hi = at(hi);
    while (f_hi < threshold) {
        require(hi < options.upper, ErrorKind::BracketFailure, "threshold not reached inside the search bracket");
        hi = std::min(options.upper, 4.0 * hi);
        f_hi = at(hi);
    }
    double lo = hi;
    double f_lo = f_hi;
    while (f_lo >= threshold) {
        if (lo <= options.lower) {
            result.beta_sq = options.lower;
            result.n_b = AuxStateSpec::squeezed(std::sqrt(options.lower), family.r).mean_photon_number();
            result.met_at_lower_bracket = true;
            return result;
        }
        hi = lo;
        f_hi = f_lo;
        lo = std::max(options.lower, 0.5 * lo);
        f_lo = at(lo);
        if (f_lo > f_hi + 1e-9 * threshold) result.monotone = false;
    }
    while ((hi - lo) / hi >= options.relative_width) {
        const double mid = std::sqrt(lo * hi);
        const double f_mid = at(mid);
        if (f_mid >= threshold) {
            if (f_mid > f_hi + 1e-9 * threshold) result.monotone = false;
            hi = mid;
            f_hi = f_mid;
        } else {
            if (f_mid < f_lo - 1e-9 * threshold) result.monotone = false;
            lo = mid;
            f_lo = f_mid;
        }
    }
    result.beta_sq = hi;
    result.n_b = AuxStateSpec::squeezed(std::sqrt(hi), family.r).mean_photon_number();
    return result;
}

}  // namespace spincat
