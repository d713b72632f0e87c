// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Self-contained reference computations for the test suite. Everything here
// is implemented independently of the library under test: a long-double
// bisection eigensolver for tridiagonal matrices, and a dense half-filling
// sector matrix assembled directly from the Pauli algebra.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

/// Number of eigenvalues strictly below x, long-double Sturm sequence.
inline int sturm_count_ld(const std::vector<double>& diag, const std::vector<double>& off,
                          long double x) {
    int count = 0;
    long double q = static_cast<long double>(diag[0]) - x;
    if (q < 0.0L) ++count;
    const long double tiny = std::numeric_limits<long double>::min() * 4.0L;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        if (q > -tiny && q < tiny) q = -tiny;
        const long double b = static_cast<long double>(off[i - 1]);
        q = static_cast<long double>(diag[i]) - x - b * b / q;
        if (q < 0.0L) ++count;
    }
    return count;
}

/// k lowest eigenvalues (1-based count) by long-double bisection.
inline std::vector<long double> tridiag_eigenvalues_ld(const std::vector<double>& diag,
                                                       const std::vector<double>& off, int k) {
    long double lo = std::numeric_limits<long double>::infinity();
    long double hi = -lo;
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        long double r = 0.0L;
        if (i > 0) r += std::abs(static_cast<long double>(off[i - 1]));
        if (i + 1 < n) r += std::abs(static_cast<long double>(off[i]));
        lo = std::min(lo, static_cast<long double>(diag[i]) - r);
        hi = std::max(hi, static_cast<long double>(diag[i]) + r);
    }
    lo -= 1.0L;
    hi += 1.0L;

    std::vector<long double> out;
    for (int target = 1; target <= k; ++target) {
        long double a = lo, b = hi;
        for (int iter = 0; iter < 300; ++iter) {
            const long double mid = 0.5L * (a + b);
            if (mid <= a || mid >= b) break;
            if (sturm_count_ld(diag, off, mid) >= target)
                b = mid;
            else
                a = mid;
        }
        out.push_back(0.5L * (a + b));
    }
    return out;
}

/// Dense half-filling sector Hamiltonian assembled from scratch:
///   H = J sum sigma_i . sigma_{i+1} + sum V_i sigma_i^z,
/// basis = all L-bit masks with L/2 set bits in increasing mask order,
/// bit 1 = spin up, site 1 = least significant bit.
inline Eigen::MatrixXd dense_sector_matrix(int L, const std::vector<double>& v, double J) {
    std::vector<std::uint64_t> states;
    for (std::uint64_t m = 0; m < (1ull << L); ++m)
        if (__builtin_popcountll(m) == L / 2) states.push_back(m);

    const auto spin = [](std::uint64_t m, int site0) { return (m >> site0) & 1ull ? 1.0 : -1.0; };

    const std::size_t dim = states.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) {
            const std::uint64_t ma = states[a];
            const std::uint64_t mb = states[b];
            double val = 0.0;
            if (ma == mb) {
                for (int i = 0; i + 1 < L; ++i) val += J * spin(ma, i) * spin(ma, i + 1);
                for (int i = 0; i < L; ++i) val += v[static_cast<std::size_t>(i)] * spin(ma, i);
            } else {
                // sigma_x sigma_x + sigma_y sigma_y flips one anti-aligned
                // adjacent pair with amplitude 2.
                const std::uint64_t diff = ma ^ mb;
                for (int i = 0; i + 1 < L; ++i) {
                    if (diff == (3ull << i) && spin(ma, i) != spin(ma, i + 1) &&
                        spin(mb, i) != spin(mb, i + 1))
                        val += 2.0 * J;
                }
            }
            h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = val;
        }
    }
    return h;
}

}  // namespace oracle
