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

#include "spincat/composite_evolution.hpp"

#include "spincat/bosonic_mode.hpp"
#include "spincat/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace spincat {

HamiltonianKind parse_hamiltonian_kind(std::string_view name) {
    if (name == "separable_jz") return HamiltonianKind::separable_jz;
    if (name == "beam_splitter") return HamiltonianKind::beam_splitter;
    if (name == "classical_rotation") return HamiltonianKind::classical_rotation;
    if (name == "classical_X_case") return HamiltonianKind::classical_X_case;
    if (name == "classical_Y_case") return HamiltonianKind::classical_Y_case;
    fail(ErrorKind::InvalidArgument, "unknown Hamiltonian kind '" + std::string(name) + "'");
}

std::string_view to_string(HamiltonianKind kind) {
    switch (kind) {
        case HamiltonianKind::separable_jz: return "separable_jz";
        case HamiltonianKind::beam_splitter: return "beam_splitter";
        case HamiltonianKind::classical_rotation: return "classical_rotation";
        case HamiltonianKind::classical_X_case: return "classical_X_case";
        case HamiltonianKind::classical_Y_case: return "classical_Y_case";
    }
    return "?";
}

namespace {

const SpinBasis& spin_basis_of(const PureState& psi) {
    const auto* basis = std::get_if<SpinBasis>(&psi.basis());
    require(basis != nullptr, ErrorKind::DimensionMismatch, "expected a probe (spin) state");
    return *basis;
}

const FockBasis& fock_basis_of(const PureState& psi) {
    const auto* basis = std::get_if<FockBasis>(&psi.basis());
    require(basis != nullptr, ErrorKind::DimensionMismatch, "expected an auxiliary (Fock) state");
    return *basis;
}

const CompositeBasis& composite_basis_of(const PureState& psi) {
    const auto* basis = std::get_if<CompositeBasis>(&psi.basis());
    require(basis != nullptr, ErrorKind::DimensionMismatch, "expected a composite state");
    return *basis;
}

using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

PureState product_state(const PureState& probe, const PureState& aux) {
    const CompositeBasis basis(spin_basis_of(probe), fock_basis_of(aux));
    Vector amps(basis.dim());
    Eigen::Map<RowMajor>(amps.data(), probe.dim(), aux.dim()) = probe.amplitudes() * aux.amplitudes().transpose();
    return PureState(basis, std::move(amps));
}

SeparableBranches separable_evolve(const PureState& probe, const PureState& aux, double tau) {
    const SpinBasis& spin = spin_basis_of(probe);
    const FockBasis& fock = fock_basis_of(aux);
    require(std::isfinite(tau), ErrorKind::InvalidArgument, "tau must be finite");
    SeparableBranches branches;
    branches.reserve(spin.dim());
    for (int k = 0; k < spin.dim(); ++k) {
        const double m = spin.m(k);
        Vector evolved(fock.dim());
        for (int n = 0; n < fock.dim(); ++n) evolved[n] = std::exp(-kI * (m * n * tau)) * aux[n];
        branches.push_back({k, m, probe[k], PureState(fock, std::move(evolved))});
    }
    return branches;
}

cplx branch_overlap(const SeparableBranches& branches, int m_index, int n_index) {
    require(m_index >= 0 && n_index >= 0 && m_index < static_cast<int>(branches.size()) &&
                n_index < static_cast<int>(branches.size()),
            ErrorKind::IndexOutOfRange, "branch index out of range");
    return branches[n_index].state.amplitudes().dot(branches[m_index].state.amplitudes());
}

DensityMatrix reduced_density_separable(const SeparableBranches& branches) {
    require(!branches.empty(), ErrorKind::InvalidArgument, "no branches");
    const int d = static_cast<int>(branches.size());
    Matrix rho(d, d);
    for (int m = 0; m < d; ++m) {
        rho(m, m) = std::norm(branches[m].coefficient);
        for (int n = m + 1; n < d; ++n) {
            const cplx c = branches[m].coefficient * std::conj(branches[n].coefficient) * branch_overlap(branches, m, n);
            rho(m, n) = c;
            rho(n, m) = std::conj(c);
        }
    }
    return DensityMatrix(std::move(rho));
}

// ---------------------------------------------------------------------------

CompositeHamiltonian::CompositeHamiltonian(CompositeBasis basis, std::vector<KronTerm> terms, std::string label)
    : basis_(basis), terms_(std::move(terms)), label_(std::move(label)) {
    for (const auto& t : terms_) {
        require(t.spin.rows() == basis_.spin().dim() && t.spin.cols() == basis_.spin().dim() &&
                    t.fock.rows() == basis_.fock().dim() && t.fock.cols() == basis_.fock().dim(),
                ErrorKind::DimensionMismatch, "Kronecker term does not match the composite basis");
    }
    const Eigen::SparseMatrix<cplx> h = sparse();
    const Eigen::SparseMatrix<cplx> skew = h - Eigen::SparseMatrix<cplx>(h.adjoint());
    double defect = 0.0;
    for (int k = 0; k < skew.outerSize(); ++k) {
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(skew, k); it; ++it) defect = std::max(defect, std::abs(it.value()));
    }
    require(defect <= 1e-12 * std::max(1.0, static_cast<double>(basis_.fock().dim())), ErrorKind::InvalidArgument,
            "composite Hamiltonian is not Hermitian");
}

Eigen::SparseMatrix<cplx> CompositeHamiltonian::sparse() const {
    const int fd = basis_.fock().dim();
    std::vector<Eigen::Triplet<cplx>> triplets;
    for (const auto& t : terms_) {
        for (int a = 0; a < t.spin.rows(); ++a) {
            for (int b = 0; b < t.spin.cols(); ++b) {
                const cplx s = t.spin(a, b);
                if (s == cplx(0.0)) continue;
                for (int i = 0; i < fd; ++i) {
                    for (int j = 0; j < fd; ++j) {
                        const cplx f = t.fock(i, j);
                        if (f == cplx(0.0)) continue;
                        triplets.emplace_back(a * fd + i, b * fd + j, s * f);
                    }
                }
            }
        }
    }
    Eigen::SparseMatrix<cplx> h(basis_.dim(), basis_.dim());
    h.setFromTriplets(triplets.begin(), triplets.end());
    h.prune(cplx(0.0));
    return h;
}

HermitianOperator CompositeHamiltonian::dense() const {
    Matrix h = Matrix(sparse());
    h = 0.5 * (h + h.adjoint()).eval();
    return HermitianOperator(std::move(h), label_);
}

double CompositeHamiltonian::expectation(const PureState& psi) const {
    require(psi.dim() == dim(), ErrorKind::DimensionMismatch, "state does not match the Hamiltonian");
    const Vector h_psi = sparse() * psi.amplitudes();
    return psi.amplitudes().dot(h_psi).real();
}

CompositeHamiltonian beamsplitter_hamiltonian(const CompositeBasis& basis) {
    std::vector<KronTerm> terms;
    terms.push_back({spin_operator(SpinAxis::x, basis.spin()), mode_operator(ModeOperator::X, basis.fock())});
    terms.push_back({spin_operator(SpinAxis::y, basis.spin()), mode_operator(ModeOperator::Y, basis.fock())});
    return CompositeHamiltonian(basis, std::move(terms), "beam_splitter");
}

CompositeHamiltonian case_hamiltonian(CaseKind which, double beta, const CompositeBasis& basis) {
    require(std::isfinite(beta), ErrorKind::InvalidArgument, "beta must be finite");
    std::vector<KronTerm> terms;
    const int fd = basis.fock().dim();
    if (which == CaseKind::classical_X) {
        terms.push_back({spin_operator(SpinAxis::x, basis.spin()), mode_operator(ModeOperator::X, basis.fock())});
        return CompositeHamiltonian(basis, std::move(terms), "classical_X");
    }
    terms.push_back({2.0 * beta * spin_operator(SpinAxis::x, basis.spin()), Matrix::Identity(fd, fd)});
    terms.push_back({spin_operator(SpinAxis::y, basis.spin()), mode_operator(ModeOperator::Y, basis.fock())});
    return CompositeHamiltonian(basis, std::move(terms), "classical_Y");
}

// ---------------------------------------------------------------------------

Propagator::Propagator(CompositeBasis basis, std::variant<BlockSpectral, QuadratureConditioned> impl, int largest)
    : basis_(basis), impl_(std::move(impl)), largest_block_(largest) {}

Propagator::Strategy Propagator::strategy() const noexcept {
    return std::holds_alternative<QuadratureConditioned>(impl_) ? Strategy::quadrature_conditioned
                                                                : Strategy::block_spectral;
}

namespace {

bool is_identity(const Matrix& m) {
    return m == Matrix::Identity(m.rows(), m.cols());
}

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

}  // namespace

Propagator Propagator::build_blocks(const Eigen::SparseMatrix<cplx>& h, const CompositeBasis& basis) {
    const int d = static_cast<int>(h.rows());
    std::vector<int> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    for (int col = 0; col < h.outerSize(); ++col) {
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(h, col); it; ++it) {
            const int a = find_root(parent, static_cast<int>(it.row()));
            const int b = find_root(parent, static_cast<int>(it.col()));
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < d; ++i) groups[find_root(parent, i)].push_back(i);

    BlockSpectral impl;
    int largest = 0;
    const Eigen::SparseMatrix<cplx, Eigen::RowMajor> rows(h);
    for (auto& [root, indices] : groups) {
        const int n = static_cast<int>(indices.size());
        largest = std::max(largest, n);
        std::map<int, int> local;
        for (int k = 0; k < n; ++k) local[indices[k]] = k;
        Matrix block = Matrix::Zero(n, n);
        for (int k = 0; k < n; ++k) {
            for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(rows, indices[k]); it; ++it) {
                block(k, local.at(static_cast<int>(it.col()))) = it.value();
            }
        }
        block = 0.5 * (block + block.adjoint()).eval();
        impl.blocks.push_back({std::move(indices), hermitian_spectrum(block)});
    }
    return Propagator(basis, std::move(impl), largest);
}

Propagator Propagator::build(const CompositeHamiltonian& h) {
    const Matrix* common = nullptr;
    bool conditioned = !h.terms().empty();
    for (const auto& t : h.terms()) {
        if (is_identity(t.fock)) continue;
        if (common == nullptr) {
            common = &t.fock;
        } else if (t.fock != *common) {
            conditioned = false;
            break;
        }
    }
    if (!conditioned || common == nullptr) return build_blocks(h.sparse(), h.basis());

    const int sd = h.basis().spin().dim();
    Matrix constant = Matrix::Zero(sd, sd);
    Matrix coupled = Matrix::Zero(sd, sd);
    for (const auto& t : h.terms()) {
        if (is_identity(t.fock)) {
            constant += t.spin;
        } else {
            coupled += t.spin;
        }
    }
    const HermitianSpectrum quadrature = hermitian_spectrum(*common);
    QuadratureConditioned impl;
    impl.fock_vectors = quadrature.vectors;
    impl.spin_blocks.reserve(quadrature.values.size());
    for (Eigen::Index k = 0; k < quadrature.values.size(); ++k) {
        Matrix block = constant + quadrature.values[k] * coupled;
        block = 0.5 * (block + block.adjoint()).eval();
        impl.spin_blocks.push_back(hermitian_spectrum(block));
    }
    return Propagator(h.basis(), std::move(impl), sd);
}

Propagator Propagator::build(const HermitianOperator& h, const CompositeBasis& basis) {
    require(h.dim() == basis.dim(), ErrorKind::DimensionMismatch, "Hamiltonian does not match the composite basis");
    return build_blocks(h.matrix().sparseView(), basis);
}

PureState Propagator::evolve(const PureState& psi, double tau) const {
    require(composite_basis_of(psi).dim() == basis_.dim(), ErrorKind::DimensionMismatch,
            "state does not match the propagator basis");
    require(std::isfinite(tau), ErrorKind::InvalidArgument, "tau must be finite");
    Vector out(psi.dim());
    if (const auto* blocks = std::get_if<BlockSpectral>(&impl_)) {
        for (const auto& block : blocks->blocks) {
            const int n = static_cast<int>(block.indices.size());
            Vector local(n);
            for (int k = 0; k < n; ++k) local[k] = psi[block.indices[k]];
            local = spectral_apply(block.spectrum, tau, local);
            for (int k = 0; k < n; ++k) out[block.indices[k]] = local[k];
        }
    } else {
        const auto& q = std::get<QuadratureConditioned>(impl_);
        const int sd = basis_.spin().dim();
        const int fd = basis_.fock().dim();
        const Eigen::Map<const RowMajor> amplitudes(psi.amplitudes().data(), sd, fd);
        Matrix rotated = amplitudes * q.fock_vectors.conjugate();
        for (int k = 0; k < fd; ++k) rotated.col(k) = spectral_apply(q.spin_blocks[k], tau, rotated.col(k));
        Eigen::Map<RowMajor>(out.data(), sd, fd) = rotated * q.fock_vectors.transpose();
    }
    return PureState::normalized(psi.basis(), std::move(out));
}

PureState evolve_full(const CompositeHamiltonian& h, const PureState& psi, double tau) {
    require(psi.dim() == h.dim(), ErrorKind::DimensionMismatch, "state does not match the Hamiltonian");
    return Propagator::build(h).evolve(psi, tau);
}

PureState evolve_full(const HermitianOperator& h, const PureState& psi, double tau) {
    return Propagator::build(h, composite_basis_of(psi)).evolve(psi, tau);
}

std::size_t PropagatorCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

PropagatorCache& PropagatorCache::global() {
    static PropagatorCache cache;
    return cache;
}

std::string propagator_key(HamiltonianKind kind, const CompositeBasis& basis, double beta) {
    std::ostringstream key;
    key.precision(17);
    key << to_string(kind) << '/' << basis.spin().n_atoms() << '/' << basis.fock().n_cut();
    // The beam splitter does not depend on beta; only the classical cases do.
    if (kind == HamiltonianKind::classical_Y_case) key << '/' << beta;
    return key.str();
}

// ---------------------------------------------------------------------------

DensityMatrix partial_trace_B(const PureState& psi) {
    const CompositeBasis& basis = composite_basis_of(psi);
    const Eigen::Map<const RowMajor> amplitudes(psi.amplitudes().data(), basis.spin().dim(), basis.fock().dim());
    return DensityMatrix(amplitudes * amplitudes.adjoint());
}

DensityMatrix partial_trace_B(const DensityMatrix& rho, const CompositeBasis& basis) {
    require(rho.dim() == basis.dim(), ErrorKind::DimensionMismatch, "density matrix does not match the composite basis");
    const int sd = basis.spin().dim();
    const int fd = basis.fock().dim();
    Matrix reduced = Matrix::Zero(sd, sd);
    for (int m = 0; m < sd; ++m) {
        for (int n = 0; n < sd; ++n) reduced(m, n) = rho.matrix().block(m * fd, n * fd, fd, fd).trace();
    }
    return DensityMatrix(std::move(reduced));
}

PureState classical_rotation(const PureState& probe, CartesianAxis axis, double angle) {
    const SpinBasis& basis = spin_basis_of(probe);
    require(std::isfinite(angle), ErrorKind::InvalidArgument, "rotation angle must be finite");
    const Matrix u = expm_hermitian(spin_component(axis, basis).matrix(), angle);
    return PureState::normalized(basis, u * probe.amplitudes());
}

double fock_edge_population(const PureState& psi, int levels) {
    const CompositeBasis& basis = composite_basis_of(psi);
    const int fd = basis.fock().dim();
    double total = 0.0;
    for (int s = 0; s < basis.spin().dim(); ++s) {
        for (int f = std::max(0, fd - levels); f < fd; ++f) total += std::norm(psi[basis.index(s, f)]);
    }
    return total;
}

}  // namespace spincat
