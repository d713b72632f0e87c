// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace stark {

struct ReportOutcome {
    int exit_code = 0;  ///< 0 ok, 2 nothing to report
    std::string text;
};

/// Scans an output directory for fit artifacts (fits.json, collapse.json,
/// decay_fit.json, beta_gamma.csv), prints fitted exponents with their
/// uncertainties and compares them against the reference values where one is
/// on file. Also writes <out>/report.txt; regeneration from unchanged
/// outputs is byte-identical.
ReportOutcome emit_report(const std::string& out_dir);

}  // namespace stark
