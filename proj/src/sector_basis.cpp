// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/sector_basis.hpp"

#include <stdexcept>

namespace stark {

std::int64_t SectorBasis::index(std::uint64_t mask) const {
    auto it = index_of.find(mask);
    if (it == index_of.end()) throw DimensionError("SectorBasis::index: state outside sector");
    return it->second;
}

SectorBasis enumerate_half_filling(int L) {
    if (L < 2 || L % 2 != 0) throw SectorError("enumerate_half_filling: L must be even and >= 2");
    if (L > 62) throw SectorError("enumerate_half_filling: L > 62 not representable");

    SectorBasis basis;
    basis.L = L;
    const std::uint64_t limit = 1ull << L;
    std::uint64_t m = (1ull << (L / 2)) - 1;  // lowest mask with L/2 bits
    while (m < limit) {
        basis.index_of.emplace(m, basis.size());
        basis.states.push_back(m);
        // Gosper's hack: next larger integer with the same popcount.
        const std::uint64_t c = m & (~m + 1);
        const std::uint64_t r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    return basis;
}

std::uint64_t mirror_state(std::uint64_t mask, int L) {
    std::uint64_t out = 0;
    for (int i = 0; i < L; ++i)
        if (mask >> i & 1u) out |= 1ull << (L - 1 - i);
    return out;
}

}  // namespace stark
