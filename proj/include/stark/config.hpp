// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stark/types.hpp"

namespace stark {

enum class Scenario {
    Spectrum,
    QfiSweep,
    QfiMatrixGrid,
    CfiSweep,
    GapSweep,
    Collapse,
    BetaGamma,
    MultiParamTrace,
    Reproduce,
};

enum class MethodSelector { FiniteDifference, Perturbative };

/// Log- or linearly-spaced field grid.
struct Grid {
    bool log = true;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    std::vector<double> values() const;
};

/// h1 specification for parabolic sweeps: an explicit grid, or tied to the
/// mirror-symmetric line h1 = factor * h2 * (L-1).
struct H1Spec {
    bool tied = false;
    double tie_factor = 1.0;
    Grid grid{false, 0.0, 0.0, 1};
};

struct SweepConfig {
    Scenario scenario = Scenario::QfiSweep;
    Family family = Family::SingleParticle;
    bool parabolic = false;
    std::vector<double> gammas{2.0};
    std::vector<int> sizes{101, 201, 301, 401, 501};
    double coupling = 1.0;
    Grid h{true, 1e-14, 1e-1, 521};  // 40 points per decade over 13 decades
    H1Spec h1;
    Grid h2{true, 1e-14, 1e-1, 521};
    std::optional<Povm> povm;
    MethodSelector method = MethodSelector::FiniteDifference;
    std::string figure;  // reproduce target: fig1, fig2, fig3, fig5, fig6, fig7
    std::string out = "out";
    int workers = 1;
    std::uint64_t seed = 1;
    bool quick = false;
    bool full = false;
    /// beta-gamma protocol: peak-tracked (single-particle) or fixed-field
    /// (many-body); defaulted per family when unset.
    std::optional<bool> beta_at_peak;
    double fixed_h = 1e-6;
};

struct ParseOutcome {
    std::optional<SweepConfig> config;
    std::vector<std::string> errors;  // all of them, not just the first
};

/// Flat key = value format, '#' comments, comma-separated lists, grids as
/// log:start:stop:count or lin:start:stop:count.
ParseOutcome parse_config(const std::string& text);

/// Canonical serialization; parse(serialize(c)) reproduces c.
std::string serialize_config(const SweepConfig& config);

/// FNV-1a over the canonical serialization minus the output-location and
/// worker-count lines (neither may influence results).
std::uint64_t config_hash(const SweepConfig& config);

std::string scenario_name(Scenario s);
std::optional<Scenario> scenario_from_name(const std::string& name);

}  // namespace stark
