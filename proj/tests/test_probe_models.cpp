// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "stark/hamiltonian.hpp"
#include "stark/potential.hpp"
#include "stark/sector_basis.hpp"
#include "stark/spectral.hpp"
#include "support/oracles.hpp"

using namespace stark;

TEST_SUITE_BEGIN("probe-models");

TEST_CASE("potential_values: monomial evaluates h*i^gamma on 1-based sites") {
    const auto v = potential_values(Monomial{1.0, 2.0}, 4);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(4.0));
    CHECK(v[2] == doctest::Approx(9.0));
    CHECK(v[3] == doctest::Approx(16.0));

    const auto lin = potential_values(Monomial{0.5, 1.0}, 3);
    CHECK(lin[0] == doctest::Approx(0.5));
    CHECK(lin[1] == doctest::Approx(1.0));
    CHECK(lin[2] == doctest::Approx(1.5));
}

TEST_CASE("potential_values: parabolic with h1 = h2*(L-1) is mirror-symmetric") {
    const auto v = potential_values(Parabolic{0.2, 0.1}, 3);
    CHECK(v[0] == doctest::Approx(0.0));
    CHECK(v[1] == doctest::Approx(0.1));
    CHECK(v[2] == doctest::Approx(0.0));
}

TEST_CASE("potential_values: gamma <= 0 is a degenerate potential") {
    CHECK_THROWS_AS((void)potential_values(Monomial{1.0, 0.0}, 4), DegeneratePotentialError);
    CHECK_THROWS_AS((void)potential_values(Monomial{1.0, -0.5}, 4), DegeneratePotentialError);
    CHECK_THROWS_AS((void)potential_values(Monomial{1.0, 2.0}, 1), DimensionError);
}

TEST_CASE("parabolic mirror symmetry holds exactly iff h1 = h2*(L-1)") {
    for (int L = 3; L <= 8; ++L) {
        for (int k = 1; k <= 5; ++k) {
            const double h2 = 0.1 * k;
            const auto sym = potential_values(Parabolic{h2 * (L - 1), h2}, L);
            for (int i = 0; i < L; ++i)
                CHECK(sym[static_cast<std::size_t>(i)] ==
                      doctest::Approx(sym[static_cast<std::size_t>(L - 1 - i)]).epsilon(1e-14));

            const auto skew = potential_values(Parabolic{h2 * (L - 1) * 1.05, h2}, L);
            double asym = 0.0;
            for (int i = 0; i < L; ++i)
                asym = std::max(asym, std::abs(skew[static_cast<std::size_t>(i)] -
                                               skew[static_cast<std::size_t>(L - 1 - i)]));
            CHECK(asym > 1e-6);
        }
    }
}

TEST_CASE("build_single_particle: L=2 zero field has eigenvalues -J, +J") {
    ProbeSpec spec;
    spec.L = 2;
    spec.potential = Parabolic{0.0, 0.0};
    const auto h = build_single_particle(spec);
    const auto s = full_spectrum(h);
    CHECK(s.energies[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(s.energies[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_single_particle: strong linear field localizes on site 1") {
    ProbeSpec spec;
    spec.L = 3;
    spec.potential = Monomial{1e3, 1.0};
    const auto h = build_single_particle(spec);
    const auto gs = ground_pair(h, 1);
    CHECK(gs.pairs[0].vector[0] * gs.pairs[0].vector[0] > 0.999);
}

TEST_CASE("hamiltonian dense assembly is exactly symmetric") {
    ProbeSpec sp;
    sp.L = 7;
    sp.potential = Monomial{0.37, 1.6};
    const Eigen::MatrixXd m = build_single_particle(sp).dense();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) CHECK(m(i, j) == m(j, i));

    ProbeSpec mb;
    mb.L = 6;
    mb.family = Family::ManyBodyHalfFilling;
    mb.potential = Parabolic{0.21, 0.05};
    const auto basis = enumerate_half_filling(mb.L);
    const Eigen::MatrixXd n = build_many_body(mb, basis).dense();
    for (int i = 0; i < n.rows(); ++i)
        for (int j = 0; j < n.cols(); ++j) CHECK(n(i, j) == n(j, i));
}

TEST_CASE("enumerate_half_filling: sizes and canonical order") {
    const auto b2 = enumerate_half_filling(2);
    REQUIRE(b2.size() == 2);
    CHECK(b2.states[0] == 0b01);
    CHECK(b2.states[1] == 0b10);

    CHECK(enumerate_half_filling(4).size() == 6);
    CHECK(enumerate_half_filling(16).size() == 12870);

    CHECK_THROWS_AS((void)enumerate_half_filling(5), SectorError);
    CHECK_THROWS_AS((void)enumerate_half_filling(0), SectorError);
}

TEST_CASE("enumerate_half_filling: index lookup roundtrips and order is strict") {
    for (int L : {4, 8, 10}) {
        const auto basis = enumerate_half_filling(L);
        for (std::int64_t k = 0; k < basis.size(); ++k) {
            CHECK(basis.index(basis.states[static_cast<std::size_t>(k)]) == k);
            if (k > 0)
                CHECK(basis.states[static_cast<std::size_t>(k)] >
                      basis.states[static_cast<std::size_t>(k - 1)]);
        }
        CHECK_THROWS_AS((void)basis.index(0), DimensionError);
    }
}

TEST_CASE("build_many_body: L=2 zero field gives the Pauli singlet at -3J") {
    ProbeSpec spec;
    spec.L = 2;
    spec.family = Family::ManyBodyHalfFilling;
    spec.potential = Parabolic{0.0, 0.0};
    const auto basis = enumerate_half_filling(2);
    const auto h = build_many_body(spec, basis);

    const Eigen::MatrixXd m = h.dense();
    CHECK(m(0, 0) == doctest::Approx(-1.0));
    CHECK(m(1, 1) == doctest::Approx(-1.0));
    CHECK(m(0, 1) == doctest::Approx(2.0));

    const auto gs = ground_pair(h, 2);
    CHECK(gs.pairs[0].energy == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(gs.pairs[1].energy == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_many_body: L=2 with a field, diagonal and gap identities") {
    const double h_field = 0.3;
    const double gamma = 1.7;
    ProbeSpec spec;
    spec.L = 2;
    spec.family = Family::ManyBodyHalfFilling;
    spec.potential = Monomial{h_field, gamma};
    const double v1 = h_field;
    const double v2 = h_field * std::pow(2.0, gamma);

    const auto basis = enumerate_half_filling(2);
    const auto h = build_many_body(spec, basis);
    const Eigen::MatrixXd m = h.dense();
    // state 0b01: site 1 up, site 2 down.
    CHECK(m(0, 0) == doctest::Approx(-1.0 + (v1 - v2)).epsilon(1e-14));
    CHECK(m(1, 1) == doctest::Approx(-1.0 + (v2 - v1)).epsilon(1e-14));

    const auto gs = ground_pair(h, 2);
    const double gap = gs.pairs[1].energy - gs.pairs[0].energy;
    const double expected_sq = 4.0 * (v1 - v2) * (v1 - v2) + 16.0;
    CHECK(gap * gap == doctest::Approx(expected_sq).epsilon(1e-12));
}

TEST_CASE("build_many_body: ground energy matches the dense sector oracle") {
    for (int L : {4, 6, 8}) {
        ProbeSpec spec;
        spec.L = L;
        spec.family = Family::ManyBodyHalfFilling;
        spec.potential = L == 4 ? PotentialSpec{Parabolic{0.0, 0.0}}
                                : PotentialSpec{Monomial{0.05, 2.0}};
        const auto basis = enumerate_half_filling(L);
        const auto h = build_many_body(spec, basis);

        const Eigen::MatrixXd ref = oracle::dense_sector_matrix(
            L, potential_values(spec.potential, L), spec.J);
        CHECK((h.dense() - ref).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ref);
        const auto gs = ground_pair(h, 1);
        CHECK(gs.pairs[0].energy == doctest::Approx(solver.eigenvalues()[0]).epsilon(1e-11));
    }
}

TEST_CASE("build_many_body: basis/spec mismatch raises a dimension error") {
    ProbeSpec spec;
    spec.L = 6;
    spec.family = Family::ManyBodyHalfFilling;
    spec.potential = Monomial{0.1, 2.0};
    const auto wrong = enumerate_half_filling(4);
    CHECK_THROWS_AS((void)build_many_body(spec, wrong), DimensionError);
}

TEST_CASE("sector closure: off-diagonal triples stay inside the sector") {
    for (int L : {4, 6, 8, 10}) {
        ProbeSpec spec;
        spec.L = L;
        spec.family = Family::ManyBodyHalfFilling;
        spec.potential = Monomial{0.2, 1.3};
        const auto basis = enumerate_half_filling(L);
        const auto h = build_many_body(spec, basis);
        for (const auto& t : h.offdiagonal) {
            REQUIRE(t.row < t.col);
            const std::uint64_t a = basis.states[static_cast<std::size_t>(t.row)];
            const std::uint64_t b = basis.states[static_cast<std::size_t>(t.col)];
            const std::uint64_t diff = a ^ b;
            CHECK(t.value == doctest::Approx(2.0 * spec.J));
            // exactly one adjacent exchange
            bool adjacent = false;
            for (int i = 0; i + 1 < L; ++i)
                if (diff == (3ull << i)) adjacent = true;
            CHECK(adjacent);
            CHECK(__builtin_popcountll(a) == L / 2);
            CHECK(__builtin_popcountll(b) == L / 2);
        }
    }
}

TEST_CASE("off-diagonal count equals adjacent anti-aligned pairs over 2") {
    for (int L : {4, 6, 8}) {
        ProbeSpec spec;
        spec.L = L;
        spec.family = Family::ManyBodyHalfFilling;
        spec.potential = Monomial{0.01, 2.0};
        const auto basis = enumerate_half_filling(L);
        const auto h = build_many_body(spec, basis);

        std::int64_t anti = 0;
        for (const std::uint64_t m : basis.states)
            for (int i = 0; i + 1 < L; ++i)
                if (SectorBasis::spin(m, i + 1) != SectorBasis::spin(m, i + 2)) ++anti;
        CHECK(static_cast<std::int64_t>(h.offdiagonal.size()) == anti / 2);
    }
}

TEST_CASE("mirror_commutator_norm: symmetric parabola commutes, monomial does not") {
    for (int L : {3, 5, 101}) {
        const double h2 = 0.01;
        ProbeSpec spec;
        spec.L = L;
        spec.potential = Parabolic{h2 * (L - 1), h2};
        CHECK(mirror_commutator_norm(build_single_particle(spec)) <= 1e-12);
    }
    ProbeSpec lin;
    lin.L = 9;
    lin.potential = Monomial{0.4, 1.0};
    CHECK(mirror_commutator_norm(build_single_particle(lin)) > 1e-3);
}

TEST_CASE("mirror_commutator_norm: many-body sector version") {
    const int L = 8;
    const double h2 = 0.05;
    const auto basis = enumerate_half_filling(L);

    ProbeSpec sym;
    sym.L = L;
    sym.family = Family::ManyBodyHalfFilling;
    sym.potential = Parabolic{h2 * (L - 1), h2};
    CHECK(mirror_commutator_norm(build_many_body(sym, basis), basis) <= 1e-12);

    ProbeSpec skew;
    skew.L = L;
    skew.family = Family::ManyBodyHalfFilling;
    skew.potential = Monomial{0.3, 1.0};
    CHECK(mirror_commutator_norm(build_many_body(skew, basis), basis) > 1e-3);
}

TEST_CASE("mirror_state: applying the mirror twice is the identity") {
    std::mt19937_64 rng(7);
    for (int L : {2, 5, 9, 16, 31}) {
        for (int trial = 0; trial < 50; ++trial) {
            const std::uint64_t m = rng() & ((1ull << L) - 1);
            CHECK(mirror_state(mirror_state(m, L), L) == m);
        }
    }
}

TEST_CASE("validate: family and parameter preconditions") {
    ProbeSpec odd;
    odd.L = 5;
    odd.family = Family::ManyBodyHalfFilling;
    odd.potential = Monomial{0.1, 1.0};
    CHECK_THROWS_AS(validate(odd), SectorError);

    ProbeSpec badJ;
    badJ.L = 4;
    badJ.J = 0.0;
    CHECK_THROWS_AS(validate(badJ), std::invalid_argument);

    ProbeSpec negative;
    negative.L = 4;
    negative.potential = Monomial{-0.2, 1.0};
    CHECK(has_negative_field(negative.potential));
    CHECK_NOTHROW(validate(negative));  // permitted, flagged downstream
}

TEST_SUITE_END();
