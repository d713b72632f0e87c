// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "stark/types.hpp"

namespace stark {

/// Site energies V_1..V_L. The monomial form uses 1-based site indices,
/// the parabolic form counts offsets from zero; both formulas are applied
/// literally, so a gamma=1 monomial and an (h1, h2=0) parabola differ by
/// the constant h1 — a gauge shift that leaves all Fisher data unchanged.
std::vector<double> potential_values(const PotentialSpec& potential, int L);

/// True when any field parameter is negative. Permitted by the types, but
/// outside the regime production sweeps scan; sweep rows carry a flag.
bool has_negative_field(const PotentialSpec& potential);

/// Throws unless the probe configuration is well formed: L >= 2, J > 0,
/// finite fields, even L for the half-filling family, gamma > 0 for
/// monomials.
void validate(const ProbeSpec& spec);

}  // namespace stark
