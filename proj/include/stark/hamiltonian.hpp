// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stark/potential.hpp"
#include "stark/sector_basis.hpp"
#include "stark/types.hpp"

namespace stark {

/// Single-particle chain: uniform hopping J on the off-diagonals, site
/// energies V_i on the diagonal. Real symmetric by construction.
struct TridiagonalHamiltonian {
    std::vector<double> diag;     ///< L site energies
    std::vector<double> offdiag;  ///< L-1 hoppings, all equal to J

    int size() const { return static_cast<int>(diag.size()); }

    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    Eigen::MatrixXd dense() const;
};

/// Sector-restricted many-body Hamiltonian. Off-diagonal triples with
/// row < col; the symmetric completion is implied. Every triple connects
/// basis states related by one adjacent spin exchange and carries 2J.
struct SparseHamiltonian {
    struct Triple {
        std::int32_t row;
        std::int32_t col;
        double value;
    };

    std::int64_t dim = 0;
    std::vector<double> diagonal;
    std::vector<Triple> offdiagonal;

    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    Eigen::MatrixXd dense() const;  // tests and small-sector oracles only
};

/// Chain Hamiltonian H = J sum(|i><i+1| + h.c.) + sum V_i |i><i|.
TridiagonalHamiltonian build_single_particle(const ProbeSpec& spec);

/// Half-filling sector matrix: diagonal J*sum s_i s_{i+1} + sum V_i s_i
/// with s = +/-1 read off the basis state, 2J between states related by one
/// adjacent exchange. Never connects states outside the sector.
SparseHamiltonian build_many_body(const ProbeSpec& spec, const SectorBasis& basis);

/// Max-norm of H*M - M*H for the mirror operator M|i_1...i_L> = |i_L...i_1>.
/// Zero (to rounding) iff the potential is mirror-symmetric.
double mirror_commutator_norm(const TridiagonalHamiltonian& h);
double mirror_commutator_norm(const SparseHamiltonian& h, const SectorBasis& basis);

/// Permutation k -> index(mirror_state(states[k])).
std::vector<std::int64_t> mirror_permutation(const SectorBasis& basis);

}  // namespace stark
