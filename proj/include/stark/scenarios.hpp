// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "stark/collapse.hpp"
#include "stark/config.hpp"
#include "stark/fisher.hpp"
#include "stark/fits.hpp"
#include "stark/sweep.hpp"

namespace stark {

struct ScenarioOutcome {
    int exit_code = 0;  ///< 0 ok, 2 nothing to do, 3 solver failures in output
    std::vector<std::string> outputs;
    SweepStats stats;
};

/// Executes one configured scenario, writing its CSV/JSON artifacts under
/// config.out. Deterministic: identical config and seed give byte-identical
/// files up to the '# generated:' header line.
ScenarioOutcome run_scenario(const SweepConfig& config);

/// Quick/full adjustments applied before execution: --quick halves grid
/// densities and caps sizes for CI, L = 18 many-body runs sit behind --full.
SweepConfig effective_config(SweepConfig config);

namespace protocols {

/// Finite-difference QFI of the single-parameter monomial probe.
double scalar_qfi(const ProbeSpec& spec, const StepPolicy& policy = {});

/// Peak of the monomial QFI over a log-spaced field grid with golden-section
/// refinement; extends the grid downward (up to four decades) when the
/// maximum sits on the lower boundary, as plateau-topped families do.
PeakResult monomial_peak(Family family, double J, double gamma, int L,
                         int points_per_decade = 200);

/// Transition peak along the mirror-symmetric line h1 = h2 (L-1), located on
/// the symmetry-preserving path derivative (which never couples the
/// quasi-degenerate partner). The scan stops at the first established
/// descent or at the resolvability wall.
struct LinePeakResult {
    double h2max = 0.0;
    double f_line = 0.0;
    bool ok = false;
};
LinePeakResult line_peak(Family family, double J, int L, int points_per_decade = 20);

/// QFI-vs-field family for collapse and decay analysis; points that fail to
/// differentiate are skipped.
CurveFamily qfi_family(Family family, double J, double gamma, const std::vector<int>& sizes,
                       const Grid& grid, int workers = 1);

}  // namespace protocols

}  // namespace stark
