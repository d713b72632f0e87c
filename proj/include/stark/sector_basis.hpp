// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "stark/types.hpp"

namespace stark {

/// Ordered half-filling sector basis.
///
/// Conventions (pinned by tests, stated once here):
///   bit 1 = spin up (s = +1), bit 0 = spin down (s = -1),
///   site 1 = least significant bit.
/// States are listed in strictly increasing bit-mask value, so dumps and
/// CSV outputs are reproducible across runs and platforms.
struct SectorBasis {
    int L = 0;
    std::vector<std::uint64_t> states;
    std::unordered_map<std::uint64_t, std::int64_t> index_of;

    std::int64_t size() const { return static_cast<std::int64_t>(states.size()); }

    /// Ordinal of a bit-mask; throws DimensionError if outside the sector.
    std::int64_t index(std::uint64_t mask) const;

    /// Spin s = +/-1 at 1-based site i of basis state mask.
    static int spin(std::uint64_t mask, int site) {
        return (mask >> (site - 1)) & 1u ? +1 : -1;
    }
};

/// All bit-masks over L sites with exactly L/2 set bits, size binomial(L, L/2).
/// Throws SectorError for odd L.
SectorBasis enumerate_half_filling(int L);

/// Bit-reversal of the low L bits (site i <-> site L+1-i).
std::uint64_t mirror_state(std::uint64_t mask, int L);

}  // namespace stark
