// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/sweep.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace stark {

namespace fs = std::filesystem;

namespace {

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string header_block(const std::string& name, const SweepConfig& cfg, bool with_timestamp) {
    std::ostringstream out;
    out << "# starklab " << name << " v" << kVersion << "\n";
    if (with_timestamp) out << "# generated: " << timestamp_utc() << "\n";
    out << "# config_hash: " << hash_hex(config_hash(cfg)) << "\n";
    std::istringstream cfg_lines(serialize_config(cfg));
    std::string line;
    while (std::getline(cfg_lines, line)) {
        // The hash-excluded environment fields stay out of the echo too, so
        // outputs are byte-comparable across hosts and worker counts.
        if (line.rfind("out = ", 0) == 0 || line.rfind("workers = ", 0) == 0) continue;
        out << "# config: " << line << "\n";
    }
    return out.str();
}

// Reads hash + data rows of a CSV (final or journal). Returns false when the
// file is absent.
bool read_csv(const fs::path& path, std::string* hash, std::vector<std::string>* rows) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    bool schema_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# config_hash: ", 0) == 0) *hash = line.substr(15);
            continue;
        }
        if (!schema_seen) {
            schema_seen = true;  // schema line
            continue;
        }
        rows->push_back(line);
    }
    return true;
}

std::string key_prefix(const std::string& row, int key_fields) {
    int commas = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] == ',' && ++commas == key_fields) return row.substr(0, i);
    }
    return row;
}

std::string sanitize_flag(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    if (s.size() > 120) s.resize(120);
    return s;
}

// Field-wise comparison, numeric where both sides parse as doubles.
bool row_less(const std::string& a, const std::string& b, int key_fields) {
    const auto fa = csv_fields(key_prefix(a, key_fields));
    const auto fb = csv_fields(key_prefix(b, key_fields));
    for (std::size_t i = 0; i < std::min(fa.size(), fb.size()); ++i) {
        double da, db;
        const auto ra = std::from_chars(fa[i].data(), fa[i].data() + fa[i].size(), da);
        const auto rb = std::from_chars(fb[i].data(), fb[i].data() + fb[i].size(), db);
        const bool na = ra.ec == std::errc{} && ra.ptr == fa[i].data() + fa[i].size();
        const bool nb = rb.ec == std::errc{} && rb.ptr == fb[i].data() + fb[i].size();
        if (na && nb) {
            if (da != db) return da < db;
        } else if (fa[i] != fb[i]) {
            return fa[i] < fb[i];
        }
    }
    return fa.size() < fb.size();
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> csv_fields(const std::string& row) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(row);
    while (std::getline(in, item, ',')) out.push_back(item);
    return out;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (n == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

bool read_sweep_rows(const fs::path& path, const SweepConfig& config,
                     std::vector<std::string>* rows) {
    std::string hash;
    if (!read_csv(path, &hash, rows)) return false;
    if (hash != hash_hex(config_hash(config)))
        throw std::runtime_error(path.string() + ": config hash mismatch (" + hash +
                                 "); refusing to mix results from different configurations");
    return true;
}

SweepStats run_sweep(const SweepSpec& spec, const SweepConfig& cfg) {
    SweepStats stats;
    stats.total = spec.tasks.size();

    fs::create_directories(spec.path.parent_path().empty() ? fs::path(".")
                                                           : spec.path.parent_path());
    const fs::path part = spec.path.string() + ".part";
    const std::string expect_hash = hash_hex(config_hash(cfg));

    // Collect rows already produced by a finished or interrupted run.
    std::unordered_map<std::string, std::string> rows_by_key;
    for (const fs::path& p : {spec.path, part}) {
        std::string hash;
        std::vector<std::string> rows;
        if (!read_csv(p, &hash, &rows)) continue;
        if (hash != expect_hash)
            throw std::runtime_error(p.string() +
                                     ": config hash mismatch; move or remove stale outputs");
        for (std::string& r : rows) rows_by_key.emplace(key_prefix(r, spec.key_fields), std::move(r));
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < spec.tasks.size(); ++i)
        if (!rows_by_key.count(spec.tasks[i].key)) pending.push_back(i);
    stats.skipped = stats.total - pending.size();

    std::mutex io_mutex;
    std::ofstream journal;
    if (!pending.empty()) {
        const bool fresh = !fs::exists(part);
        journal.open(part, std::ios::app);
        if (!journal) throw std::runtime_error("cannot open journal " + part.string());
        if (fresh) journal << header_block(spec.name, cfg, true) << spec.schema << "\n";
    }

    std::atomic<std::size_t> done{0};
    std::atomic<std::size_t> failures{0};
    const bool show_progress = isatty(fileno(stderr)) != 0;

    parallel_for(pending.size(), cfg.workers, [&](std::size_t i) {
        const PointTask& task = spec.tasks[pending[i]];
        RowValues rv;
        bool threw = false;
        try {
            rv = task.compute();
        } catch (const std::exception& e) {
            rv.values = spec.fail_fill;
            rv.flag = sanitize_flag(e.what());
            threw = true;
        }
        if (!rv.flag.empty()) failures.fetch_add(1);
        std::string row;
        if (spec.flag_column)
            row = task.key + "," + rv.values + "," + sanitize_flag(rv.flag);
        else if (!threw)
            row = task.key + "," + rv.values;
        {
            std::lock_guard<std::mutex> lock(io_mutex);
            if (!row.empty()) {
                journal << row << "\n";
                journal.flush();
                rows_by_key.emplace(task.key, row);
            }
        }
        const std::size_t d = done.fetch_add(1) + 1;
        if (show_progress && (d % 16 == 0 || d == pending.size()))
            std::fprintf(stderr, "\r%s: %zu/%zu", spec.name.c_str(), d, pending.size());
    });
    if (show_progress && !pending.empty()) std::fprintf(stderr, "\n");
    if (journal.is_open()) journal.close();

    stats.computed = pending.size();
    if (spec.flag_column) {
        for (const auto& [key, row] : rows_by_key)
            if (!row.empty() && row.back() != ',') ++stats.failed;  // flag column non-empty
    } else {
        stats.failed = failures.load();  // failed rows are omitted from flagless schemas
    }

    std::vector<std::string> rows;
    rows.reserve(rows_by_key.size());
    for (const auto& [key, row] : rows_by_key) rows.push_back(row);
    std::sort(rows.begin(), rows.end(),
              [&](const std::string& a, const std::string& b) {
                  return row_less(a, b, spec.key_fields);
              });

    const fs::path tmp = spec.path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << header_block(spec.name, cfg, true) << spec.schema << "\n";
        for (const std::string& r : rows) out << r << "\n";
    }
    fs::rename(tmp, spec.path);
    fs::remove(part);
    return stats;
}

}  // namespace stark
