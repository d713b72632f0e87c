// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/hamiltonian.hpp"

#include <cmath>
#include <unordered_map>

namespace stark {

void TridiagonalHamiltonian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const int n = size();
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        double acc = diag[static_cast<std::size_t>(i)] * x[i];
        if (i > 0) acc += offdiag[static_cast<std::size_t>(i - 1)] * x[i - 1];
        if (i + 1 < n) acc += offdiag[static_cast<std::size_t>(i)] * x[i + 1];
        y[i] = acc;
    }
}

Eigen::MatrixXd TridiagonalHamiltonian::dense() const {
    const int n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
        m(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
    }
    return m;
}

void SparseHamiltonian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.resize(dim);
    for (std::int64_t i = 0; i < dim; ++i) y[i] = diagonal[static_cast<std::size_t>(i)] * x[i];
    for (const Triple& t : offdiagonal) {
        y[t.row] += t.value * x[t.col];
        y[t.col] += t.value * x[t.row];
    }
}

Eigen::MatrixXd SparseHamiltonian::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (std::int64_t i = 0; i < dim; ++i) m(i, i) = diagonal[static_cast<std::size_t>(i)];
    for (const Triple& t : offdiagonal) {
        m(t.row, t.col) = t.value;
        m(t.col, t.row) = t.value;
    }
    return m;
}

TridiagonalHamiltonian build_single_particle(const ProbeSpec& spec) {
    validate(spec);
    if (spec.family != Family::SingleParticle)
        throw std::invalid_argument("build_single_particle: spec is not a single-particle probe");
    TridiagonalHamiltonian h;
    h.diag = potential_values(spec.potential, spec.L);
    h.offdiag.assign(static_cast<std::size_t>(spec.L - 1), spec.J);
    return h;
}

SparseHamiltonian build_many_body(const ProbeSpec& spec, const SectorBasis& basis) {
    validate(spec);
    if (spec.family != Family::ManyBodyHalfFilling)
        throw std::invalid_argument("build_many_body: spec is not a many-body probe");
    if (basis.L != spec.L) throw DimensionError("build_many_body: basis built for a different L");

    const std::vector<double> v = potential_values(spec.potential, spec.L);
    const int L = spec.L;
    const double J = spec.J;

    SparseHamiltonian h;
    h.dim = basis.size();
    h.diagonal.resize(static_cast<std::size_t>(h.dim));

    for (std::int64_t k = 0; k < h.dim; ++k) {
        const std::uint64_t m = basis.states[static_cast<std::size_t>(k)];
        double e = 0.0;
        for (int i = 1; i <= L; ++i) e += v[static_cast<std::size_t>(i - 1)] * SectorBasis::spin(m, i);
        for (int i = 1; i < L; ++i) e += J * SectorBasis::spin(m, i) * SectorBasis::spin(m, i + 1);
        h.diagonal[static_cast<std::size_t>(k)] = e;

        // Flip-flop terms: anti-aligned adjacent pairs exchange with 2J.
        for (int i = 0; i + 1 < L; ++i) {
            const std::uint64_t pair = 3ull << i;
            const std::uint64_t bits = (m >> i) & 3ull;
            if (bits == 1ull || bits == 2ull) {
                const std::int64_t j = basis.index(m ^ pair);
                if (j > k)
                    h.offdiagonal.push_back({static_cast<std::int32_t>(k),
                                             static_cast<std::int32_t>(j), 2.0 * J});
            }
        }
    }
    return h;
}

double mirror_commutator_norm(const TridiagonalHamiltonian& h) {
    // Uniform hopping commutes with the mirror exactly; the only surviving
    // entries of HM - MH are V_i - V_{L+1-i} on the anti-diagonal.
    const int n = h.size();
    double norm = 0.0;
    for (int i = 0; i < n; ++i)
        norm = std::max(norm, std::abs(h.diag[static_cast<std::size_t>(i)] -
                                       h.diag[static_cast<std::size_t>(n - 1 - i)]));
    return norm;
}

double mirror_commutator_norm(const SparseHamiltonian& h, const SectorBasis& basis) {
    const std::vector<std::int64_t> perm = mirror_permutation(basis);

    // Accumulate C = H*P - P*H entrywise; P is the permutation matrix of the
    // mirror, P e_j = e_perm[j].
    std::unordered_map<std::uint64_t, double> entries;
    const auto key = [&](std::int64_t r, std::int64_t c) {
        return (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint64_t>(c);
    };
    const auto add = [&](std::int64_t r, std::int64_t c, double val) {
        // (H P)_{r c} = H_{r, perm[c]} contributes +; (P H)_{r c} = H_{perm[r], c} contributes -.
        entries[key(r, c)] += val;
    };
    const auto scatter = [&](std::int64_t r, std::int64_t c, double val) {
        // H entry (r, c): appears in H*P at (r, j) for perm[j] = c, i.e. j = perm^{-1}[c] = perm[c]
        // (the mirror is an involution), and in P*H at (perm[r], c) with a minus sign.
        add(r, perm[static_cast<std::size_t>(c)], val);
        add(perm[static_cast<std::size_t>(r)], c, -val);
    };

    for (std::int64_t i = 0; i < h.dim; ++i)
        scatter(i, i, h.diagonal[static_cast<std::size_t>(i)]);
    for (const SparseHamiltonian::Triple& t : h.offdiagonal) {
        scatter(t.row, t.col, t.value);
        scatter(t.col, t.row, t.value);
    }

    double norm = 0.0;
    for (const auto& [k, val] : entries) norm = std::max(norm, std::abs(val));
    return norm;
}

std::vector<std::int64_t> mirror_permutation(const SectorBasis& basis) {
    std::vector<std::int64_t> perm(static_cast<std::size_t>(basis.size()));
    for (std::int64_t k = 0; k < basis.size(); ++k)
        perm[static_cast<std::size_t>(k)] =
            basis.index(mirror_state(basis.states[static_cast<std::size_t>(k)], basis.L));
    return perm;
}

}  // namespace stark
