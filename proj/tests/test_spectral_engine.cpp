// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "stark/hamiltonian.hpp"
#include "stark/spectral.hpp"
#include "support/oracles.hpp"

using namespace stark;

namespace {

ProbeSpec single_particle(int L, PotentialSpec pot) {
    ProbeSpec s;
    s.L = L;
    s.potential = pot;
    return s;
}

ProbeSpec many_body(int L, PotentialSpec pot) {
    ProbeSpec s;
    s.L = L;
    s.family = Family::ManyBodyHalfFilling;
    s.potential = pot;
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("spectral-engine");

TEST_CASE("full_spectrum at zero field reproduces -2J cos(k pi/(L+1))") {
    for (int L : {2, 5, 7, 101}) {
        const auto h = build_single_particle(single_particle(L, Parabolic{0.0, 0.0}));
        const auto s = full_spectrum(h);
        const auto bloch = analytic_bloch(L, 1.0);
        for (int k = 0; k < L; ++k) {
            CHECK(std::abs(s.energies[static_cast<std::size_t>(k)] -
                           bloch.energies[static_cast<std::size_t>(k)]) < 1e-10);
            CHECK((s.vectors.col(k) - bloch.vectors.col(k)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("full_spectrum: L=2 zero field has vectors (1, +/-1)/sqrt(2)") {
    const auto h = build_single_particle(single_particle(2, Parabolic{0.0, 0.0}));
    const auto s = full_spectrum(h);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(s.energies[0] == doctest::Approx(-1.0));
    CHECK(s.energies[1] == doctest::Approx(1.0));
    CHECK(s.vectors(0, 0) == doctest::Approx(r));
    CHECK(std::abs(s.vectors(1, 0)) == doctest::Approx(r));
    CHECK(s.vectors(0, 0) * s.vectors(1, 0) < 0.0);  // ground state of +J hopping is staggered
    CHECK(s.vectors(0, 1) == doctest::Approx(r));
    CHECK(s.vectors(1, 1) == doctest::Approx(r));
}

TEST_CASE("full_spectrum matches the extended-precision bisection oracle") {
    const auto h = build_single_particle(single_particle(6, Monomial{1.0, 2.0}));
    const auto s = full_spectrum(h);
    const auto ref = oracle::tridiag_eigenvalues_ld(h.diag, h.offdiag, 6);
    for (int k = 0; k < 6; ++k)
        CHECK(std::abs(s.energies[static_cast<std::size_t>(k)] -
                       static_cast<double>(ref[static_cast<std::size_t>(k)])) < 1e-12);
}

TEST_CASE("full_spectrum: residuals, orthonormality, trace identity") {
    const auto h = build_single_particle(single_particle(57, Monomial{0.3, 1.4}));
    const auto s = full_spectrum(h);
    CHECK(s.max_residual <= 1e-10 * std::max(1.0, std::abs(s.energies.back())));

    const Eigen::MatrixXd g = s.vectors.transpose() * s.vectors;
    CHECK((g - Eigen::MatrixXd::Identity(57, 57)).cwiseAbs().maxCoeff() < 1e-10);

    double trace = 0.0, esum = 0.0, scale = 0.0;
    for (int i = 0; i < 57; ++i) {
        trace += h.diag[static_cast<std::size_t>(i)];
        esum += s.energies[static_cast<std::size_t>(i)];
        scale = std::max(scale, std::abs(h.diag[static_cast<std::size_t>(i)]));
    }
    CHECK(std::abs(trace - esum) <= 1e-8 * 57 * std::max(scale, 1.0));
}

TEST_CASE("full_spectrum refuses sizes above the dense cap") {
    TridiagonalHamiltonian h;
    h.diag.assign(kDenseCap + 1, 0.0);
    h.offdiag.assign(kDenseCap, 1.0);
    CHECK_THROWS_AS((void)full_spectrum(h), DimensionError);
}

TEST_CASE("analytic_bloch: L=2 energies are -J, +J; orthonormal for L=7") {
    CHECK_THROWS_AS((void)analytic_bloch(1, 1.0), DimensionError);
    const auto b2 = analytic_bloch(2, 1.0);
    CHECK(b2.energies[0] == doctest::Approx(-1.0));
    CHECK(b2.energies[1] == doctest::Approx(1.0));

    const auto b7 = analytic_bloch(7, 1.0);
    const Eigen::MatrixXd g = b7.vectors.transpose() * b7.vectors;
    CHECK((g - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ground_pair (tridiagonal) agrees with full_spectrum") {
    for (auto pot : {PotentialSpec{Monomial{1e-6, 2.0}}, PotentialSpec{Monomial{0.3, 0.5}},
                     PotentialSpec{Parabolic{2e-4, 1e-6}}}) {
        const auto h = build_single_particle(single_particle(64, pot));
        const auto s = full_spectrum(h);
        const auto gs = ground_pair(h, 2);
        for (int k = 0; k < 2; ++k) {
            CHECK(gs.pairs[static_cast<std::size_t>(k)].energy ==
                  doctest::Approx(s.energies[static_cast<std::size_t>(k)]).epsilon(1e-12));
            CHECK(std::abs(gs.pairs[static_cast<std::size_t>(k)].vector.dot(s.vectors.col(k))) ==
                  doctest::Approx(1.0).epsilon(1e-9));
            CHECK(gs.pairs[static_cast<std::size_t>(k)].residual <=
                  1e-10 * std::max(1.0, std::abs(gs.pairs[static_cast<std::size_t>(k)].energy)));
        }
    }
}

TEST_CASE("ground_pair: deep-localized parabolic probe has IPR above 0.5") {
    const int L = 501;
    const auto h = build_single_particle(single_particle(L, Parabolic{5.5, 0.01}));
    const auto gs = ground_pair(h, 1);
    const double ipr = gs.pairs[0].vector.array().pow(4).sum();
    CHECK(ipr > 0.5);
}

TEST_CASE("ground_pair (sector) matches the dense sector oracle") {
    // L=8 -> dim 70: exercises the Krylov path against an independent dense solve.
    const auto spec = many_body(8, Monomial{1e-6, 2.0});
    const auto basis = enumerate_half_filling(8);
    const auto h = build_many_body(spec, basis);
    REQUIRE(h.dim == 70);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(
        oracle::dense_sector_matrix(8, potential_values(spec.potential, 8), 1.0));
    const auto gs = ground_pair(h, 2);
    CHECK(gs.pairs[0].energy == doctest::Approx(ref.eigenvalues()[0]).epsilon(1e-11));
    CHECK(gs.pairs[1].energy == doctest::Approx(ref.eigenvalues()[1]).epsilon(1e-11));
    CHECK(std::abs(gs.pairs[0].vector.dot(ref.eigenvectors().col(0))) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lanczos: larger sector against Eigen on the assembled matrix") {
    const auto spec = many_body(10, Parabolic{3e-3, 1e-4});
    const auto basis = enumerate_half_filling(10);
    const auto h = build_many_body(spec, basis);
    REQUIRE(h.dim == 252);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(h.dense());
    const auto gs = ground_pair(h, 2);
    CHECK(gs.pairs[0].energy == doctest::Approx(ref.eigenvalues()[0]).epsilon(1e-11));
    CHECK(gs.pairs[1].energy == doctest::Approx(ref.eigenvalues()[1]).epsilon(1e-11));
    for (const auto& p : gs.pairs)
        CHECK(p.residual <= 1e-10 * std::max(1.0, std::abs(p.energy)));
}

TEST_CASE("lanczos: warm start converges to the same pair bitwise") {
    const auto spec = many_body(10, Monomial{1e-5, 2.0});
    const auto basis = enumerate_half_filling(10);
    const auto h = build_many_body(spec, basis);

    const auto cold = ground_pair(h, 1);
    LanczosOptions opts;
    const Eigen::VectorXd start = cold.pairs[0].vector;
    opts.warm_start = &start;
    const auto warm = ground_pair(h, 1, opts);
    CHECK(warm.pairs[0].energy == doctest::Approx(cold.pairs[0].energy).epsilon(1e-12));
    CHECK(std::abs(warm.pairs[0].vector.dot(cold.pairs[0].vector)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(warm.iterations < cold.iterations);
}

TEST_CASE("gauge determinism: repeated solves return identical vectors") {
    const auto h = build_single_particle(single_particle(33, Monomial{2e-7, 1.5}));
    const auto a = ground_pair(h, 2);
    const auto b = ground_pair(h, 2);
    for (int k = 0; k < 2; ++k) {
        REQUIRE(a.pairs[static_cast<std::size_t>(k)].vector.size() ==
                b.pairs[static_cast<std::size_t>(k)].vector.size());
        for (int i = 0; i < 33; ++i)
            CHECK(a.pairs[static_cast<std::size_t>(k)].vector[i] ==
                  b.pairs[static_cast<std::size_t>(k)].vector[i]);
    }

    const auto spec = many_body(8, Monomial{1e-4, 2.0});
    const auto basis = enumerate_half_filling(8);
    const auto hs = build_many_body(spec, basis);
    const auto ga = ground_pair(hs, 1);
    const auto gb = ground_pair(hs, 1);
    for (int i = 0; i < ga.pairs[0].vector.size(); ++i)
        CHECK(ga.pairs[0].vector[i] == gb.pairs[0].vector[i]);
}

TEST_CASE("variational property: no random state dips below the ground energy") {
    const auto spec = many_body(6, Monomial{0.02, 2.0});
    const auto basis = enumerate_half_filling(6);
    const auto h = build_many_body(spec, basis);
    const auto gs = ground_pair(h, 1);

    std::mt19937_64 rng(1234);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd v(h.dim);
        for (std::int64_t i = 0; i < h.dim; ++i) v[i] = gauss(rng);
        v.normalize();
        Eigen::VectorXd w;
        h.apply(v, w);
        CHECK(v.dot(w) >= gs.pairs[0].energy - 1e-10);
    }
}

TEST_CASE("energy_gap: zero-field single particle and L=2 sector") {
    for (int L : {8, 33, 101}) {
        const auto g = energy_gap(single_particle(L, Parabolic{0.0, 0.0}));
        const double th = std::numbers::pi / (L + 1);
        CHECK(g.gap == doctest::Approx(2.0 * (std::cos(th) - std::cos(2 * th))).epsilon(1e-10));
    }
    const auto g2 = energy_gap(many_body(2, Parabolic{0.0, 0.0}));
    CHECK(g2.gap == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_SUITE_END();
