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
#include "spincat/composite_evolution.hpp"
#include "spincat/metrology.hpp"
#include "spincat/spin_algebra.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

namespace spincat {
namespace {

constexpr double kPi = std::numbers::pi;

HermitianOperator jz(int n) { return spin_component(CartesianAxis::z, SpinBasis(n)); }

DensityMatrix random_density(std::mt19937& rng, int dim, int rank) {
    std::normal_distribution<double> gauss;
    Matrix g(dim, rank);
    for (int i = 0; i < dim; ++i) {
        for (int k = 0; k < rank; ++k) g(i, k) = cplx(gauss(rng), gauss(rng));
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

HermitianOperator random_hermitian(std::mt19937& rng, int dim) {
    std::normal_distribution<double> gauss;
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
    }
    return HermitianOperator(0.5 * (a + a.adjoint()));
}

TEST(QfiMixed, PureNoonAndMaximallyMixed) {
    const PureState noon = named_state(NamedState::noon, SpinBasis(20));
    const QfiResult r = qfi_mixed(DensityMatrix::from_pure(noon.amplitudes()), jz(20));
    EXPECT_NEAR(r.value, 400.0, 1e-8);
    EXPECT_EQ(r.eigen_threshold_used, 1e-12);
    EXPECT_GT(r.discarded_pair_weight, 0.0);
    EXPECT_NEAR(qfi_mixed(DensityMatrix(Matrix::Identity(21, 21) / 21.0), jz(20)).value, 0.0, 1e-12);
}

TEST(QfiMixed, DephasedNoonFollowsCatIdentity) {
    const int n = 20;
    Matrix rho = Matrix::Zero(n + 1, n + 1);
    const cplx c = std::polar(std::sqrt(0.5), 0.3);
    rho(0, 0) = rho(n, n) = 0.5;
    rho(n, 0) = 0.5 * c;
    rho(0, n) = 0.5 * std::conj(c);
    const DensityMatrix dm(rho);
    const double gamma = purity(dm);
    EXPECT_NEAR(gamma, cat_identities::gamma_from_cmax(std::abs(c)), 1e-12);
    EXPECT_NEAR(qfi_mixed(dm, jz(n)).value, 0.5 * n * n, 1e-8);
    EXPECT_NEAR(qfi_mixed(dm, jz(n)).value, cat_identities::qfi_from_gamma(gamma, n), 1e-8);
}

TEST(QfiPure, CssEigenstateAndAgreement) {
    EXPECT_NEAR(qfi_pure(coherent_spin_state(kPi / 2.0, 0.0, SpinBasis(20)), jz(20)).value, 20.0, 1e-9);
    EXPECT_NEAR(qfi_pure(coherent_spin_state(0.0, 0.0, SpinBasis(20)), jz(20)).value, 0.0, 1e-12);
    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        Vector v(6);
        for (int k = 0; k < 6; ++k) v[k] = cplx(gauss(rng), gauss(rng));
        const PureState psi = PureState::normalized(SpinBasis(5), v);
        const HermitianOperator g = random_hermitian(rng, 6);
        const double a = qfi_pure(psi, g).value;
        const double b = qfi_mixed(DensityMatrix::from_pure(psi.amplitudes()), g).value;
        EXPECT_NEAR(a, b, 1e-8 * std::max(1.0, a));
    }
}

TEST(FidelityOracle, KnownCases) {
    const PureState noon = named_state(NamedState::noon, SpinBasis(8));
    EXPECT_NEAR(qfi_fidelity_oracle(DensityMatrix::from_pure(noon.amplitudes()), jz(8)), 64.0, 0.005 * 64.0);
    EXPECT_NEAR(qfi_fidelity_oracle(DensityMatrix(Matrix::Identity(5, 5) / 5.0), jz(4)), 0.0, 1e-6);
    EXPECT_THROW(qfi_fidelity_oracle(DensityMatrix(Matrix::Identity(5, 5) / 5.0), jz(4), 0.1), Error);
}

TEST(FidelityOracle, MatchesQfiMixedOnRandomRankThreeStates) {
    std::mt19937 rng(20261018);
    for (int seed = 0; seed < 20; ++seed) {
        const DensityMatrix rho = random_density(rng, 5, 3);
        const HermitianOperator g = random_hermitian(rng, 5);
        const double exact = qfi_mixed(rho, g).value;
        EXPECT_NEAR(qfi_fidelity_oracle(rho, g), exact, 0.005 * exact) << seed;
    }
}

TEST(Purity, BasicValuesAndSeparableIdentity) {
    EXPECT_NEAR(purity(DensityMatrix(Matrix::Identity(4, 4) / 4.0)), 0.25, 1e-15);
    const AuxStateSpec spec = AuxStateSpec::squeezed(std::sqrt(30.0), -0.4);
    const PureState aux = squeezed_coherent(spec, choose_cutoff(spec));
    const PureState probe = coherent_spin_state(1.1, 0.3, SpinBasis(6));
    const auto branches = separable_evolve(probe, aux, 0.07);
    double sum = 0.0;
    for (int m = 0; m < 7; ++m) {
        for (int n = 0; n < 7; ++n) {
            sum += std::norm(probe[m]) * std::norm(probe[n]) * std::norm(branch_overlap(branches, m, n));
        }
    }
    EXPECT_NEAR(purity(reduced_density_separable(branches)), sum, 1e-10);
}

TEST(Coherence, NumericBasics) {
    const FockBasis b(40);
    const Matrix n = mode_operator(ModeOperator::number, b);
    RealVector m(5);
    m << -2, -1, 0, 1, 2;
    const PureState aux = squeezed_coherent(AuxStateSpec::coherent(2.0), b);
    const CoherenceMatrix at0 = coherence_numeric(aux, n, 0.0, m);
    EXPECT_LT(max_abs(at0.matrix() - Matrix::Ones(5, 5)), 1e-12);
    const CoherenceMatrix fock = coherence_numeric(fock_state(9, b), n, 0.37, m);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) EXPECT_NEAR(std::abs(fock(i, j)), 1.0, 1e-12);
    }
}

TEST(Coherence, CoherentAnalyticMatchesNumeric) {
    const AuxStateSpec spec = AuxStateSpec::coherent(10.0);
    const FockBasis b = choose_cutoff(spec);
    const PureState aux = squeezed_coherent(spec, b);
    const Matrix n = mode_operator(ModeOperator::number, b);
    RealVector m(21);
    for (int k = 0; k <= 20; ++k) m[k] = k - 10;
    for (int k = 0; k <= 10; ++k) {
        const double tau = 0.05 * k;
        const CoherenceMatrix c = coherence_numeric(aux, n, tau, m);
        EXPECT_NEAR(std::abs(c.c_max() - coherence_coherent_analytic(10.0, tau, 20)), 0.0, 1e-8) << tau;
        EXPECT_NEAR(std::abs(c(13, 4) - coherence_coherent_analytic(10.0, tau, 9)), 0.0, 1e-8) << tau;
    }
    EXPECT_NEAR(std::abs(coherence_coherent_analytic(10.0, 2.0 * kPi / 20.0, 20) - 1.0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(coherence_coherent_analytic(10.0, 0.0, 20) - 1.0), 0.0, 0.0);
    EXPECT_NEAR(std::norm(coherence_coherent_analytic(10.0, 0.01, 20)), std::exp(200.0 * (std::cos(0.2) - 1.0)), 1e-14);
}

TEST(Coherence, SqueezedAnalyticLimitsAndNumeric) {
    for (double r : {-1.0, 0.3, 2.0}) EXPECT_NEAR(std::abs(coherence_squeezed_analytic(3.0, r, 0.0, 7) - 1.0), 0.0, 1e-14);
    for (double tau : {0.01, 0.2, 0.9}) {
        EXPECT_NEAR(std::abs(coherence_squeezed_analytic(5.0, 1e-7, tau, 3, 1e-9) - coherence_coherent_analytic(5.0, tau, 3)), 0.0, 1e-5);
    }
    // Cases where the continued square root winds around the origin.
    for (auto [beta_sq, r, delta, tau] : {std::tuple{50.0, 0.352, 1, 0.02}, {100.0, -1.0, 20, 0.3}, {98.6, 1.0, 13, 1.7}}) {
        const AuxStateSpec spec = AuxStateSpec::squeezed(std::sqrt(beta_sq), r);
        const FockBasis b = choose_cutoff(spec);
        const PureState aux = squeezed_coherent(spec, b);
        RealVector m(2);
        m << 0.0, delta;
        const cplx numeric = coherence_numeric(aux, mode_operator(ModeOperator::number, b), tau, m)(1, 0);
        EXPECT_NEAR(std::abs(coherence_squeezed_analytic(std::sqrt(beta_sq), r, tau, delta) - numeric), 0.0, 1e-6);
    }
}

TEST(ShortTime, TrivialLimitsAndAccuracy) {
    const ShortTimePrediction zero = short_time_predictions(400.0, 20, 0.0);
    EXPECT_DOUBLE_EQ(zero.gamma, 1.0);
    EXPECT_DOUBLE_EQ(zero.f_a, 400.0);
    const ShortTimePrediction fock = short_time_predictions(0.0, 20, 0.3);
    EXPECT_DOUBLE_EQ(fock.gamma, 1.0);
    EXPECT_DOUBLE_EQ(fock.f_a, 400.0);
    const AuxStateSpec spec = AuxStateSpec::coherent(10.0);
    const PureState aux = squeezed_coherent(spec, choose_cutoff(spec));
    const PureState noon = named_state(NamedState::noon, SpinBasis(20));
    for (int k = 0; k <= 10; ++k) {
        const double tau = 0.005 * k / 10.0;
        const double exact = qfi_mixed(reduced_density_separable(separable_evolve(noon, aux, tau)), jz(20)).value;
        EXPECT_NEAR(short_time_predictions(400.0, 20, tau).f_a, exact, 0.05 * exact) << tau;
    }
}

TEST(Revival, PeriodicInTau) {
    EXPECT_NEAR(qfi_revival_prediction(400.0, 20, 2.0 * kPi / 20.0), 400.0, 1e-9);
    EXPECT_DOUBLE_EQ(qfi_revival_prediction(400.0, 20, 0.0), 400.0);
}

TEST(CatIdentities, EndpointsAndRanges) {
    EXPECT_DOUBLE_EQ(cat_identities::gamma_from_cmax(1.0), 1.0);
    EXPECT_DOUBLE_EQ(cat_identities::qfi_from_gamma(1.0, 20), 400.0);
    EXPECT_DOUBLE_EQ(cat_identities::gamma_from_cmax(0.0), 0.5);
    EXPECT_DOUBLE_EQ(cat_identities::qfi_from_gamma(0.5, 20), 0.0);
    EXPECT_NEAR(cat_identities::cmax_from_gamma(0.75), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(cat_identities::gamma_from_qfi(200.0, 20), 0.75, 1e-15);
    EXPECT_THROW(cat_identities::gamma_from_cmax(1.5), Error);
    EXPECT_THROW(cat_identities::cmax_from_gamma(0.2), Error);
}

TEST(CatIdentities, SeparableNoonIdentity) {
    const AuxStateSpec spec = AuxStateSpec::coherent(8.0);
    const PureState aux = squeezed_coherent(spec, choose_cutoff(spec));
    const auto branches = separable_evolve(named_state(NamedState::noon, SpinBasis(12)), aux, 0.03);
    const DensityMatrix rho = reduced_density_separable(branches);
    const double f = qfi_mixed(rho, jz(12)).value;
    const double gamma = purity(rho);
    EXPECT_NEAR(f, cat_identities::qfi_from_gamma(gamma, 12), 1e-8 * f);
    EXPECT_NEAR(gamma, cat_identities::gamma_from_cmax(std::abs(branch_overlap(branches, 12, 0))), 1e-10);
}

TEST(BeamsplitterPrediction, ValuesAndTrend) {
    EXPECT_NEAR(beamsplitter_generator_prediction(10.0, 0.0, 20), 400.0 * std::exp(-1.0), 1e-9);
    EXPECT_NEAR(beamsplitter_generator_prediction(1e6, 0.0, 20), 400.0, 1e-6);
    EXPECT_GT(beamsplitter_generator_prediction(10.0, -0.5, 20), beamsplitter_generator_prediction(10.0, 0.5, 20));
    EXPECT_DOUBLE_EQ(quadrature_y_variance(0.5), std::exp(1.0));
}

TEST(NbTfs, ClosedForms) {
    EXPECT_NEAR(nb_tfs(NbTfsRegime::noon_jz, 100, kPi, 0.0), kPi * kPi * 1e4 / std::log(2.0), 1e-6);
    EXPECT_NEAR(nb_tfs(NbTfsRegime::jycat_bs, 100, kPi / 2.0, 0.0), 1e4 / (4.0 * std::log(2.0)), 1e-9);
    EXPECT_NEAR(nb_tfs(NbTfsRegime::jycat_jz, 7, kPi, 0.0), 9.0, 1e-12);
    EXPECT_NEAR(nb_tfs(NbTfsRegime::jycat_jz, 70, kPi, 0.0), 9.0, 1e-12);
    EXPECT_THROW(nb_tfs(NbTfsRegime::jycat_bs, 100, 1.0, 0.0), Error);
}

TEST(NbTfsEmpirical, FockNeverCrosses) {
    const NbTfsResult r = nb_tfs_empirical(NbTfsRegime::noon_jz, 10, kPi, AuxStateSpec::fock(5));
    EXPECT_TRUE(r.met_at_lower_bracket);
    EXPECT_EQ(r.beta_sq, NbTfsOptions{}.lower);
}

TEST(NbTfsEmpirical, QuadraticScalingAndSqueezingFactor) {
    NbTfsOptions opt;
    opt.engine = NbTfsEngine::semiclassical;
    std::vector<double> na;
    std::vector<double> nb;
    for (int n : {8, 12, 16, 20}) {
        const NbTfsResult r = nb_tfs_empirical(NbTfsRegime::jycat_bs, n, kPi / 2.0, AuxStateSpec::coherent(1.0), opt);
        EXPECT_FALSE(r.met_at_lower_bracket);
        na.push_back(n);
        nb.push_back(r.n_b);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < na.size(); ++k) {
        const double x = std::log(na[k]);
        const double y = std::log(nb[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(na.size());
    EXPECT_NEAR((k * sxy - sx * sy) / (k * sxx - sx * sx), 2.0, 0.15);
    const NbTfsResult squeezed = nb_tfs_empirical(NbTfsRegime::jycat_bs, 20, kPi / 2.0, AuxStateSpec::squeezed(1.0, 0.5), opt);
    EXPECT_NEAR(squeezed.n_b / nb.back(), std::exp(1.0), 0.2 * std::exp(1.0));
}

TEST(NbTfsEmpirical, ExactJzRegimeAgreesWithClosedFormForNoon) {
    NbTfsOptions opt;
    opt.engine = NbTfsEngine::exact;
    const NbTfsResult r = nb_tfs_empirical(NbTfsRegime::noon_jz, 10, kPi, AuxStateSpec::coherent(1.0), opt);
    const double closed = nb_tfs(NbTfsRegime::noon_jz, 10, kPi, 0.0);
    EXPECT_NEAR(r.n_b, closed, 0.1 * closed);
    EXPECT_TRUE(r.monotone);
}

}  // namespace
}  // namespace spincat
