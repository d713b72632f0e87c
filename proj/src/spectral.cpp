// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace stark {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSafeMin = std::numeric_limits<double>::min();

// Number of eigenvalues strictly below x (Sturm sequence of the shifted
// leading principal minors).
int sturm_count(const std::vector<double>& a, const std::vector<double>& b, double x,
                double pivmin) {
    int count = 0;
    double q = a[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (std::abs(q) < pivmin) q = -pivmin;
        q = a[i] - x - b[i - 1] * b[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

struct GershgorinBounds {
    double lo, hi;
};

GershgorinBounds gershgorin(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(b[i - 1]);
        if (i + 1 < n) r += std::abs(b[i]);
        lo = std::min(lo, a[i] - r);
        hi = std::max(hi, a[i] + r);
    }
    return {lo, hi};
}

double bisect_kth(const std::vector<double>& a, const std::vector<double>& b, int k,
                  double pivmin) {
    auto [lo, hi] = gershgorin(a, b);
    lo -= kEps * std::abs(lo) + 2.0 * pivmin;
    hi += kEps * std::abs(hi) + 2.0 * pivmin;
    for (int iter = 0; iter < 220; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted in double
        if (sturm_count(a, b, mid, pivmin) >= k)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= kEps * (std::abs(lo) + std::abs(hi)) + 2.0 * kSafeMin) break;
    }
    return 0.5 * (lo + hi);
}

// Partial-pivot LU solve of (T - sigma I) y = rhs, dgttrf/dgtts2 style.
// The matrix is near-singular by construction; tiny pivots are floored.
void solve_shifted(const std::vector<double>& a, const std::vector<double>& b, double sigma,
                   Eigen::VectorXd& rhs, double pivfloor) {
    const int n = static_cast<int>(a.size());
    static thread_local std::vector<double> d, dl, du, du2;
    static thread_local std::vector<char> piv;
    d.resize(n);
    dl.assign(n > 1 ? n - 1 : 0, 0.0);
    du.assign(n > 1 ? n - 1 : 0, 0.0);
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    piv.assign(n > 1 ? n - 1 : 0, 0);

    for (int i = 0; i < n; ++i) d[i] = a[static_cast<std::size_t>(i)] - sigma;
    for (int i = 0; i + 1 < n; ++i) dl[i] = du[i] = b[static_cast<std::size_t>(i)];

    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (std::abs(d[i]) < pivfloor) d[i] = std::copysign(pivfloor, d[i] == 0.0 ? 1.0 : d[i]);
            const double fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
            if (i + 2 < n) du2[i] = 0.0;
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            const double tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - fact * d[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            piv[i] = 1;
        }
    }
    if (std::abs(d[n - 1]) < pivfloor)
        d[n - 1] = std::copysign(pivfloor, d[n - 1] == 0.0 ? 1.0 : d[n - 1]);

    for (int i = 0; i + 1 < n; ++i) {
        if (!piv[i]) {
            rhs[i + 1] -= dl[i] * rhs[i];
        } else {
            const double tmp = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = tmp - dl[i] * rhs[i];
        }
    }
    rhs[n - 1] /= d[n - 1];
    if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    for (int i = n - 3; i >= 0; --i)
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
}

void orthogonalize_against(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& prev) {
    for (int pass = 0; pass < 2; ++pass)
        for (const Eigen::VectorXd& p : prev) v -= p.dot(v) * p;
}

double tridiag_residual(const TridiagonalHamiltonian& h, const Eigen::VectorXd& v, double e) {
    Eigen::VectorXd w;
    h.apply(v, w);
    return (w - e * v).norm();
}

}  // namespace

void fix_sign_gauge(Eigen::VectorXd& v) {
    double best = 0.0;
    for (int i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v[i]));
    // Lowest index whose magnitude ties the maximum within rounding; exact
    // ties (Bloch states have them) must resolve identically for analytic
    // and numeric vectors.
    int idx = 0;
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= best * (1.0 - 1e-9)) {
            idx = i;
            break;
        }
    }
    if (v[idx] < 0.0) v = -v;
}

Spectrum full_spectrum(const TridiagonalHamiltonian& h, int dense_cap) {
    const int n = h.size();
    if (n > dense_cap) throw DimensionError("full_spectrum: size exceeds the dense cap");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("full_spectrum: dense eigensolver did not converge", n);

    Spectrum s;
    s.energies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    s.vectors = solver.eigenvectors();
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd col = s.vectors.col(k);
        fix_sign_gauge(col);
        s.vectors.col(k) = col;
        s.max_residual = std::max(s.max_residual, tridiag_residual(h, col, s.energies[k]));
    }
    s.gap = n > 1 ? s.energies[1] - s.energies[0] : 0.0;
    return s;
}

Spectrum analytic_bloch(int L, double J) {
    if (L < 2) throw DimensionError("analytic_bloch: L must be >= 2");
    Spectrum s;
    s.energies.resize(static_cast<std::size_t>(L));
    s.vectors.resize(L, L);
    const double theta = std::numbers::pi / (L + 1);
    const double norm = std::sqrt(2.0 / (L + 1));
    for (int k = 1; k <= L; ++k) {
        s.energies[static_cast<std::size_t>(k - 1)] = -2.0 * J * std::cos(k * theta);
        Eigen::VectorXd v(L);
        for (int j = 1; j <= L; ++j)
            v[j - 1] = norm * (j % 2 == 0 ? 1.0 : -1.0) * std::sin(j * k * theta);
        fix_sign_gauge(v);
        s.vectors.col(k - 1) = v;
    }
    s.gap = s.energies[1] - s.energies[0];
    return s;
}

std::vector<double> tridiag_eigenvalues(const TridiagonalHamiltonian& h, int k) {
    const int n = h.size();
    if (k < 1 || k > n) throw DimensionError("tridiag_eigenvalues: need 1 <= k <= L");
    double bmax2 = 0.0;
    for (double b : h.offdiag) bmax2 = std::max(bmax2, b * b);
    const double pivmin = std::max(kSafeMin, kSafeMin * bmax2);
    std::vector<double> evs(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i)
        evs[static_cast<std::size_t>(i - 1)] = bisect_kth(h.diag, h.offdiag, i, pivmin);
    return evs;
}

GroundStates ground_pair(const TridiagonalHamiltonian& h, int k) {
    const int n = h.size();
    if (k < 1 || k > n) throw DimensionError("ground_pair: need 1 <= k <= L");

    const std::vector<double> evs = tridiag_eigenvalues(h, k);
    double normT = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = std::abs(h.diag[static_cast<std::size_t>(i)]);
        if (i > 0) r += std::abs(h.offdiag[static_cast<std::size_t>(i - 1)]);
        if (i + 1 < n) r += std::abs(h.offdiag[static_cast<std::size_t>(i)]);
        normT = std::max(normT, r);
    }
    const double pivfloor = kEps * kEps * std::max(1.0, normT);

    GroundStates out;
    out.seed = kSolverSeed;
    std::mt19937_64 rng(kSolverSeed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::VectorXd> accepted;

    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd v(n);
        for (int j = 0; j < n; ++j) v[j] = gauss(rng);
        orthogonalize_against(v, accepted);
        v.normalize();

        double energy = evs[static_cast<std::size_t>(i)];
        double resid = std::numeric_limits<double>::infinity();
        for (int sweep = 0; sweep < 12; ++sweep) {
            ++out.iterations;
            solve_shifted(h.diag, h.offdiag, evs[static_cast<std::size_t>(i)], v, pivfloor);
            orthogonalize_against(v, accepted);
            const double nrm = v.norm();
            if (!(nrm > 0.0) || !std::isfinite(nrm)) {
                for (int j = 0; j < n; ++j) v[j] = gauss(rng);  // restart direction
                orthogonalize_against(v, accepted);
                v.normalize();
                continue;
            }
            v /= nrm;
            Eigen::VectorXd w;
            h.apply(v, w);
            energy = v.dot(w);
            resid = (w - energy * v).norm();
            if (resid <= 0.25 * kResidualTol * std::max(1.0, std::abs(energy))) break;
        }
        if (resid > kResidualTol * std::max(1.0, std::abs(energy)))
            throw ConvergenceError("ground_pair: inverse iteration stalled", out.iterations);
        fix_sign_gauge(v);
        accepted.push_back(v);
        out.pairs.push_back({energy, v, resid});
    }

    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.energy < b.energy; });
    if (k >= 2)
        out.quasi_degenerate = out.pairs[1].energy - out.pairs[0].energy <
                               kDegeneracyTol * std::max(1.0, std::abs(out.pairs[0].energy));
    return out;
}

GroundStates ground_pair(const SparseHamiltonian& h, int k, const LanczosOptions& opts) {
    if (k < 1 || k > h.dim) throw DimensionError("ground_pair: need 1 <= k <= dim");

    if (h.dim <= std::max<std::int64_t>(16, 2 * k + 2)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
        if (solver.info() != Eigen::Success)
            throw ConvergenceError("ground_pair: dense sector solve failed",
                                   static_cast<int>(h.dim));
        GroundStates out;
        out.seed = opts.seed;
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXd v = solver.eigenvectors().col(i);
            fix_sign_gauge(v);
            Eigen::VectorXd w;
            h.apply(v, w);
            const double e = solver.eigenvalues()[i];
            out.pairs.push_back({e, v, (w - e * v).norm()});
        }
        if (k >= 2)
            out.quasi_degenerate = out.pairs[1].energy - out.pairs[0].energy <
                                   kDegeneracyTol * std::max(1.0, std::abs(out.pairs[0].energy));
        return out;
    }

    const MatVec apply = [&h](const Eigen::VectorXd& x, Eigen::VectorXd& y) { h.apply(x, y); };
    return lanczos_lowest(apply, h.dim, k, opts);
}

GapRecord energy_gap(const ProbeSpec& spec) {
    if (spec.family == Family::SingleParticle) {
        const TridiagonalHamiltonian h = build_single_particle(spec);
        const std::vector<double> evs = tridiag_eigenvalues(h, 2);
        GapRecord g{evs[1] - evs[0], evs[0], evs[1], false};
        g.quasi_degenerate = g.gap < kDegeneracyTol * std::max(1.0, std::abs(g.E1));
        return g;
    }
    const SectorBasis basis = enumerate_half_filling(spec.L);
    const SparseHamiltonian h = build_many_body(spec, basis);
    const GroundStates gs = ground_pair(h, 2);
    return {gs.pairs[1].energy - gs.pairs[0].energy, gs.pairs[0].energy, gs.pairs[1].energy,
            gs.quasi_degenerate};
}

}  // namespace stark
