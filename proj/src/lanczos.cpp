// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stark/spectral.hpp"

namespace stark {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void reorthogonalize(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& basis,
                     std::size_t count) {
    // Two classical Gram-Schmidt passes keep the basis orthogonal to ~eps
    // even after many steps ("twice is enough").
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < count; ++i) w -= basis[i].dot(w) * basis[i];
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, std::int64_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (std::int64_t i = 0; i < dim; ++i) v[i] = gauss(rng);
    v.normalize();
    return v;
}

}  // namespace

GroundStates lanczos_lowest(const MatVec& apply, std::int64_t dim, int k,
                            const LanczosOptions& opts) {
    if (k < 1 || k > dim) throw DimensionError("lanczos_lowest: need 1 <= k <= dim");

    const int m_max = static_cast<int>(std::min<std::int64_t>(opts.max_basis, dim));
    if (m_max < k + 2 && dim > m_max)
        throw DimensionError("lanczos_lowest: basis budget too small for pair count");

    std::mt19937_64 rng(opts.seed);
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(static_cast<std::size_t>(m_max) + 1);

    if (opts.warm_start != nullptr) {
        if (opts.warm_start->size() != dim)
            throw DimensionError("lanczos_lowest: warm start has wrong dimension");
        Eigen::VectorXd v0 = *opts.warm_start;
        const double nrm = v0.norm();
        basis.push_back(nrm > 0.0 ? Eigen::VectorXd(v0 / nrm) : random_unit(rng, dim));
    } else {
        basis.push_back(random_unit(rng, dim));
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m_max, m_max);
    Eigen::VectorXd w(dim);
    int locked = 0;
    int matvecs = 0;
    double op_scale = 1.0;

    for (int cycle = 0; cycle <= opts.max_restarts; ++cycle) {
        double beta_res = 0.0;  // coupling of basis[mdim] to the T block
        bool exhausted = false;
        int mdim = locked;

        for (int j = locked; j < m_max; ++j) {
            apply(basis[static_cast<std::size_t>(j)], w);
            ++matvecs;
            const double alpha = basis[static_cast<std::size_t>(j)].dot(w);
            T(j, j) = alpha;
            op_scale = std::max(op_scale, std::abs(alpha));

            w -= alpha * basis[static_cast<std::size_t>(j)];
            if (j == locked && locked > 0) {
                for (int i = 0; i < locked; ++i)
                    w -= T(i, locked) * basis[static_cast<std::size_t>(i)];
            } else if (j > locked) {
                w -= T(j - 1, j) * basis[static_cast<std::size_t>(j - 1)];
            }
            reorthogonalize(w, basis, static_cast<std::size_t>(j) + 1);

            const double beta = w.norm();
            mdim = j + 1;

            if (static_cast<std::int64_t>(mdim) >= dim) {
                exhausted = true;  // Krylov space is the whole space
                break;
            }
            if (beta <= 64.0 * kEps * op_scale) {
                // Invariant subspace hit; continue in a fresh direction.
                Eigen::VectorXd fresh = random_unit(rng, dim);
                reorthogonalize(fresh, basis, static_cast<std::size_t>(mdim));
                const double fn = fresh.norm();
                if (!(fn > 1e-8)) {
                    exhausted = true;
                    break;
                }
                basis.push_back(fresh / fn);
                if (mdim < m_max) {
                    T(j, mdim) = 0.0;
                    T(mdim, j) = 0.0;
                }
                beta_res = 0.0;
                continue;
            }

            basis.push_back(w / beta);
            if (mdim < m_max) {
                T(j, mdim) = beta;
                T(mdim, j) = beta;
            }
            beta_res = beta;

            // Periodic cheap check: residual estimates from the small problem
            // let warm-started solves exit long before the basis fills up.
            if (mdim < m_max && mdim >= locked + k + 2 && (mdim - locked) % 8 == 0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> probe(
                    T.topLeftCorner(mdim, mdim));
                bool promising = probe.info() == Eigen::Success;
                for (int i = 0; promising && i < k; ++i) {
                    const double est = std::abs(beta * probe.eigenvectors()(mdim - 1, i));
                    promising = est <= 0.2 * opts.tol * std::max(1.0, std::abs(probe.eigenvalues()[i]));
                }
                if (promising) break;
            }
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T.topLeftCorner(mdim, mdim));
        if (small.info() != Eigen::Success)
            throw ConvergenceError("lanczos_lowest: small-problem solve failed", matvecs);

        const int keep = std::clamp(std::max(2 * k, k + 4), k, mdim - (exhausted ? 0 : 1));
        const int nritz = std::max(keep, k);
        std::vector<Eigen::VectorXd> ritz;
        ritz.reserve(static_cast<std::size_t>(nritz));
        for (int i = 0; i < nritz && i < mdim; ++i) {
            Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
            for (int j = 0; j < mdim; ++j)
                y += small.eigenvectors()(j, i) * basis[static_cast<std::size_t>(j)];
            y.normalize();
            ritz.push_back(std::move(y));
        }

        std::vector<double> resid(static_cast<std::size_t>(k));
        bool converged = true;
        for (int i = 0; i < k; ++i) {
            apply(ritz[static_cast<std::size_t>(i)], w);
            ++matvecs;
            const double theta = small.eigenvalues()[i];
            resid[static_cast<std::size_t>(i)] =
                (w - theta * ritz[static_cast<std::size_t>(i)]).norm();
            if (resid[static_cast<std::size_t>(i)] > opts.tol * std::max(1.0, std::abs(theta)))
                converged = false;
        }

        if (converged) {
            GroundStates out;
            out.seed = opts.seed;
            out.iterations = matvecs;
            for (int i = 0; i < k; ++i) {
                Eigen::VectorXd v = std::move(ritz[static_cast<std::size_t>(i)]);
                fix_sign_gauge(v);
                out.pairs.push_back(
                    {small.eigenvalues()[i], std::move(v), resid[static_cast<std::size_t>(i)]});
            }
            if (k >= 2)
                out.quasi_degenerate =
                    out.pairs[1].energy - out.pairs[0].energy <
                    kDegeneracyTol * std::max(1.0, std::abs(out.pairs[0].energy));
            return out;
        }
        if (exhausted || cycle == opts.max_restarts)
            throw ConvergenceError("lanczos_lowest: no convergence within restart budget",
                                   matvecs);

        // Thick restart: kept Ritz pairs plus the residual direction.
        Eigen::VectorXd vres = static_cast<std::size_t>(mdim) < basis.size()
                                   ? basis[static_cast<std::size_t>(mdim)]
                                   : random_unit(rng, dim);
        std::vector<double> couplings(static_cast<std::size_t>(keep));
        for (int i = 0; i < keep; ++i)
            couplings[static_cast<std::size_t>(i)] =
                beta_res * small.eigenvectors()(mdim - 1, i);

        ritz.resize(static_cast<std::size_t>(keep));
        basis.clear();
        for (int i = 0; i < keep; ++i)
            basis.push_back(std::move(ritz[static_cast<std::size_t>(i)]));
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) basis[i] -= basis[j].dot(basis[i]) * basis[j];
            basis[i].normalize();
        }
        reorthogonalize(vres, basis, basis.size());
        const double nres = vres.norm();
        if (nres > 1e-10) {
            basis.push_back(vres / nres);
        } else {
            Eigen::VectorXd fresh = random_unit(rng, dim);
            reorthogonalize(fresh, basis, basis.size());
            basis.push_back(fresh.normalized());
        }

        T.setZero(m_max, m_max);
        for (int i = 0; i < keep; ++i) T(i, i) = small.eigenvalues()[i];
        for (int i = 0; i < keep; ++i) {
            T(i, keep) = couplings[static_cast<std::size_t>(i)];
            T(keep, i) = couplings[static_cast<std::size_t>(i)];
        }
        locked = keep;
    }

    throw ConvergenceError("lanczos_lowest: restart loop exit", matvecs);
}

}  // namespace stark
