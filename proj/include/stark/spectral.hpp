// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "stark/hamiltonian.hpp"
#include "stark/types.hpp"

namespace stark {

inline constexpr int kDenseCap = 2048;
inline constexpr double kResidualTol = 1e-10;    // * max(1, |E|)
inline constexpr double kDegeneracyTol = 1e-12;  // * max(1, |E1|)
inline constexpr std::uint64_t kSolverSeed = 0x53746172'6b4c6162ull;

struct EigenPair {
    double energy = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;  ///< ||H v - E v||
};

struct Spectrum {
    std::vector<double> energies;  ///< ascending
    Eigen::MatrixXd vectors;       ///< column k; 0x0 when not computed
    double gap = 0.0;              ///< energies[1] - energies[0]
    double max_residual = 0.0;
};

struct GroundStates {
    std::vector<EigenPair> pairs;  ///< k lowest, ascending
    bool quasi_degenerate = false;
    int iterations = 0;  ///< matvec count (Krylov) or sweep count (direct)
    std::uint64_t seed = kSolverSeed;
};

struct GapRecord {
    double gap = 0.0;
    double E1 = 0.0;
    double E2 = 0.0;
    bool quasi_degenerate = false;
};

/// Deterministic sign gauge: the component of largest magnitude is made
/// positive, ties broken toward the lowest index. Keeps finite-difference
/// derivatives of eigenvectors well defined.
void fix_sign_gauge(Eigen::VectorXd& v);

/// All L eigenpairs via a dense symmetric solve. Throws DimensionError
/// above dense_cap, ConvergenceError if the factorization fails.
Spectrum full_spectrum(const TridiagonalHamiltonian& h, int dense_cap = kDenseCap);

/// Closed-form spectrum of the zero-field chain:
///   E_k = -2J cos(k pi / (L+1)),
///   <j|E_k> = sqrt(2/(L+1)) (-1)^j sin(j k pi / (L+1)),
/// sign-gauged like every other solve.
Spectrum analytic_bloch(int L, double J);

/// k lowest eigenvalues of a tridiagonal matrix, no vectors (Sturm bisection).
std::vector<double> tridiag_eigenvalues(const TridiagonalHamiltonian& h, int k);

/// k lowest eigenpairs. Tridiagonal representations use Sturm bisection plus
/// inverse iteration (deterministic, residual-verified); sector matrices go
/// through the Krylov solver below.
GroundStates ground_pair(const TridiagonalHamiltonian& h, int k);

struct LanczosOptions {
    int max_basis = 200;
    int max_restarts = 80;
    double tol = kResidualTol;
    std::uint64_t seed = kSolverSeed;
    /// Optional warm start; must match the operator dimension. The solver
    /// stays deterministic: the start vector fully determines the run.
    const Eigen::VectorXd* warm_start = nullptr;
};

using MatVec = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Thick-restart Lanczos with full reorthogonalization. The operator is
/// accessed only through matrix-vector products.
GroundStates lanczos_lowest(const MatVec& apply, std::int64_t dim, int k,
                            const LanczosOptions& opts = {});

GroundStates ground_pair(const SparseHamiltonian& h, int k, const LanczosOptions& opts = {});

/// Gap between the two lowest levels of the probe.
GapRecord energy_gap(const ProbeSpec& spec);

}  // namespace stark
