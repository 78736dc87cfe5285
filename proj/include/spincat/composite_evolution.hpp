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

// composite_evolution.hpp: exact probe (x) auxiliary dynamics and the reduced
// probe state.
//
// Two exact routes are provided:
//  * separable Jz (x) n_B coupling, kept as one auxiliary branch per Jz
//    eigenvalue (the composite vector is never formed);
//  * general spin-boson Hamiltonians written as sums of Kronecker terms, evolved
//    through a cached spectral decomposition that exploits whichever block
//    structure the Hamiltonian has.

#pragma once

#include "spincat/spin_algebra.hpp"
#include "spincat/types.hpp"

#include <Eigen/SparseCore>

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spincat {

enum class HamiltonianKind { separable_jz, beam_splitter, classical_rotation, classical_X_case, classical_Y_case };

HamiltonianKind parse_hamiltonian_kind(std::string_view name);
std::string_view to_string(HamiltonianKind kind);

/// tau = g t. For classical_rotation the angle convention is recorded
/// explicitly: theta = 2|beta| tau about x, or phi = N_B tau about z.
struct EvolutionParams {
    double tau = 0.0;
    HamiltonianKind kind = HamiltonianKind::separable_jz;
};

PureState product_state(const PureState& probe, const PureState& aux);

// ---------------------------------------------------------------------------
// Separable Jz (x) n_B evolution

struct SeparableBranch {
    int spin_index;    // Jz basis index of the branch
    double eigenvalue; // m
    cplx coefficient;  // c_m
    PureState state;   // exp(-i m n_B tau)|psi_B(0)>
};

using SeparableBranches = std::vector<SeparableBranch>;

/// One branch per Jz eigenvalue; n_B is diagonal so each branch is an exact
/// elementwise phase e^{-i m n tau}.
SeparableBranches separable_evolve(const PureState& probe, const PureState& aux, double tau);

/// rho_mn = c_m c_n^* <branch_n|branch_m>.
DensityMatrix reduced_density_separable(const SeparableBranches& branches);

/// C_{m,n} = <branch_n|branch_m> (branch states before the c_m weights).
cplx branch_overlap(const SeparableBranches& branches, int m_index, int n_index);

// ---------------------------------------------------------------------------
// Kronecker-sum Hamiltonians

struct KronTerm {
    Matrix spin;
    Matrix fock;
};

class CompositeHamiltonian {
public:
    CompositeHamiltonian(CompositeBasis basis, std::vector<KronTerm> terms, std::string label);

    const CompositeBasis& basis() const noexcept { return basis_; }
    const std::vector<KronTerm>& terms() const noexcept { return terms_; }
    const std::string& label() const noexcept { return label_; }
    int dim() const noexcept { return basis_.dim(); }

    Eigen::SparseMatrix<cplx> sparse() const;
    /// Only sensible for small composite spaces.
    HermitianOperator dense() const;

    double expectation(const PureState& psi) const;

private:
    CompositeBasis basis_;
    std::vector<KronTerm> terms_;
    std::string label_;
};

/// X (x) Jx + Y (x) Jy with g folded into tau. Stored in the Kronecker order
/// of CompositeBasis (spin factor first).
CompositeHamiltonian beamsplitter_hamiltonian(const CompositeBasis& basis);

enum class CaseKind { classical_X, classical_Y };

/// classical_X: X (x) Jx  (Y -> <Y> = 0 for real beta).
/// classical_Y: <X> Jx + Y (x) Jy with <X> = 2 beta.
CompositeHamiltonian case_hamiltonian(CaseKind which, double beta, const CompositeBasis& basis);

/// Spectral decomposition of a composite Hamiltonian, built once and applied to
/// any number of (state, tau) pairs.
///
/// * quadrature-conditioned: every Fock factor is the identity or one common
///   Hermitian matrix Q. Diagonalizing Q leaves one spin-sized block per
///   eigenvalue of Q.
/// * block-spectral: otherwise the sparsity graph is split into connected
///   components and each is diagonalized densely. The beam splitter conserves
///   n_B - m and falls apart into blocks of at most N+1 states.
class Propagator {
public:
    enum class Strategy { quadrature_conditioned, block_spectral };

    static Propagator build(const CompositeHamiltonian& h);
    static Propagator build(const HermitianOperator& h, const CompositeBasis& basis);

    PureState evolve(const PureState& psi, double tau) const;

    Strategy strategy() const noexcept;
    int largest_block() const noexcept { return largest_block_; }
    const CompositeBasis& basis() const noexcept { return basis_; }

private:
    struct Block {
        std::vector<int> indices;
        HermitianSpectrum spectrum;
    };
    struct BlockSpectral {
        std::vector<Block> blocks;
    };
    struct QuadratureConditioned {
        Matrix fock_vectors;                        // columns: eigenvectors of Q
        std::vector<HermitianSpectrum> spin_blocks; // S0 + q_k S1
    };

    Propagator(CompositeBasis basis, std::variant<BlockSpectral, QuadratureConditioned> impl, int largest);

    static Propagator build_blocks(const Eigen::SparseMatrix<cplx>& h, const CompositeBasis& basis);

    CompositeBasis basis_;
    std::variant<BlockSpectral, QuadratureConditioned> impl_;
    int largest_block_;
};

/// exp(-i H tau) psi. Norm is preserved to solver precision.
PureState evolve_full(const CompositeHamiltonian& h, const PureState& psi, double tau);
PureState evolve_full(const HermitianOperator& h, const PureState& psi, double tau);

/// Thread-safe store of propagators: concurrent readers, one writer at a time.
class PropagatorCache {
public:
    template <class Builder>
    std::shared_ptr<const Propagator> get_or_build(const std::string& key, Builder&& builder) {
        {
            std::shared_lock lock(mutex_);
            if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        }
        auto built = std::make_shared<const Propagator>(builder());
        std::unique_lock lock(mutex_);
        auto [it, inserted] = entries_.emplace(key, std::move(built));
        return it->second;
    }

    std::size_t size() const;

    static PropagatorCache& global();

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const Propagator>> entries_;
};

std::string propagator_key(HamiltonianKind kind, const CompositeBasis& basis, double beta);

// ---------------------------------------------------------------------------

/// (rho_A)_mn = sum_k psi_{m,k} psi^*_{n,k}, computed by reshaping the
/// spin-major amplitude vector into an (N+1) x (n_cut+1) matrix.
DensityMatrix partial_trace_B(const PureState& psi);
DensityMatrix partial_trace_B(const DensityMatrix& rho, const CompositeBasis& basis);

/// exp(-i J_axis angle)|psi>, the decoherence-free reference.
PureState classical_rotation(const PureState& probe, CartesianAxis axis, double angle);

/// Population in the top `levels` Fock states of a composite state.
double fock_edge_population(const PureState& psi, int levels);

}  // namespace spincat
