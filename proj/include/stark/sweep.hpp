// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "stark/config.hpp"

namespace stark {

struct SweepStats {
    std::size_t total = 0;
    std::size_t computed = 0;
    std::size_t skipped = 0;  ///< resumed rows, no new solve
    std::size_t failed = 0;   ///< rows carrying a non-empty flag
};

/// One output row: the key columns identify the point, compute() returns the
/// value columns plus an optional flag ("degenerate", ...). A throwing
/// compute() yields fail_fill plus the error text in the flag column; the
/// sweep itself never aborts on solver failures.
struct RowValues {
    std::string values;
    std::string flag;
};

struct PointTask {
    std::string key;
    std::function<RowValues()> compute;
};

struct SweepSpec {
    std::filesystem::path path;  ///< final CSV location
    std::string name;            ///< short name for the header
    std::string schema;          ///< pinned header line
    int key_fields = 1;          ///< leading columns forming the row key
    std::string fail_fill;       ///< value columns emitted when compute() throws
    bool flag_column = true;     ///< schemas without a flag column omit failed rows
    std::vector<PointTask> tasks;
};

/// Executes pending tasks on a worker pool, appending each finished row to a
/// .part journal so interrupted runs resume by key. On completion rows are
/// sorted by key columns (numeric-aware) and written atomically; output is
/// byte-identical across runs and worker counts except the '# generated:'
/// header line. Existing files with a different config hash are refused.
SweepStats run_sweep(const SweepSpec& spec, const SweepConfig& config);

/// Rows (without header) of a previously produced sweep file; returns false
/// when the file does not exist. Hash mismatches throw.
bool read_sweep_rows(const std::filesystem::path& path, const SweepConfig& config,
                     std::vector<std::string>* rows);

/// Split one CSV row into fields.
std::vector<std::string> csv_fields(const std::string& row);

std::string format_double(double v);

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace stark
