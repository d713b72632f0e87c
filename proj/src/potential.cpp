// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/potential.hpp"

#include <cmath>

namespace stark {

std::vector<double> potential_values(const PotentialSpec& potential, int L) {
    if (L < 2) throw DimensionError("potential_values: L must be >= 2");
    std::vector<double> v(static_cast<std::size_t>(L));
    if (const auto* mono = std::get_if<Monomial>(&potential)) {
        if (!(mono->gamma > 0.0))
            throw DegeneratePotentialError(
                "monomial potential requires gamma > 0 (uniform shift carries no signal)");
        if (!std::isfinite(mono->h) || !std::isfinite(mono->gamma))
            throw std::invalid_argument("monomial potential: non-finite parameter");
        for (int i = 1; i <= L; ++i)
            v[static_cast<std::size_t>(i - 1)] = mono->h * std::pow(static_cast<double>(i), mono->gamma);
    } else {
        const auto& par = std::get<Parabolic>(potential);
        if (!std::isfinite(par.h1) || !std::isfinite(par.h2))
            throw std::invalid_argument("parabolic potential: non-finite parameter");
        for (int i = 0; i < L; ++i) {
            const double x = static_cast<double>(i);
            v[static_cast<std::size_t>(i)] = par.h1 * x - par.h2 * x * x;
        }
    }
    return v;
}

bool has_negative_field(const PotentialSpec& potential) {
    if (const auto* mono = std::get_if<Monomial>(&potential)) return mono->h < 0.0;
    const auto& par = std::get<Parabolic>(potential);
    return par.h1 < 0.0 || par.h2 < 0.0;
}

void validate(const ProbeSpec& spec) {
    if (spec.L < 2) throw DimensionError("ProbeSpec: L must be >= 2");
    if (!(spec.J > 0.0) || !std::isfinite(spec.J))
        throw std::invalid_argument("ProbeSpec: J must be positive and finite");
    if (spec.family == Family::ManyBodyHalfFilling && spec.L % 2 != 0)
        throw SectorError("half-filling sector requires even L");
    (void)potential_values(spec.potential, spec.L);  // parameter checks
}

}  // namespace stark
