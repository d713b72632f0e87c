// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "stark/report.hpp"
#include "stark/scenarios.hpp"

using namespace stark;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// File contents with the sole nondeterministic header line removed.
std::string stable_content(const fs::path& p) {
    std::istringstream in(read_file(p));
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("# generated:", 0) != 0) out << line << "\n";
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

SweepConfig small_sweep_config(const std::string& out) {
    SweepConfig cfg;
    cfg.scenario = Scenario::QfiSweep;
    cfg.gammas = {2.0};
    cfg.sizes = {21, 41};
    cfg.h = Grid{true, 1e-10, 1e-4, 13};
    cfg.out = out;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("stark-cli");

TEST_CASE("parse_config: documented example round-trips") {
    const std::string text =
        "scenario = qfi-sweep\n"
        "gamma = 2\n"
        "L = 101,201,301,401,501\n"
        "h = log:1e-14:1e-2:240\n";
    const ParseOutcome out = parse_config(text);
    REQUIRE(out.config.has_value());
    CHECK(out.errors.empty());
    CHECK(out.config->h.count == 240);
    CHECK(out.config->h.values().size() == 240);
    CHECK(out.config->sizes == std::vector<int>{101, 201, 301, 401, 501});

    const std::string canon = serialize_config(*out.config);
    const ParseOutcome again = parse_config(canon);
    REQUIRE(again.config.has_value());
    CHECK(serialize_config(*again.config) == canon);
}

TEST_CASE("parse_config: log grids demand positive endpoints") {
    const ParseOutcome out = parse_config("h = log:-1:1:10\n");
    REQUIRE(!out.config.has_value());
    REQUIRE(out.errors.size() == 1);
    CHECK(out.errors[0].find("log grid requires positive endpoints") != std::string::npos);
}

TEST_CASE("parse_config: every error is reported, not just the first") {
    const ParseOutcome out = parse_config(
        "scenario = warp\n"
        "gamma = -2\n"
        "L = 7\n"
        "family = many-body\n"
        "unknown_key = 3\n");
    REQUIRE(!out.config.has_value());
    CHECK(out.errors.size() >= 4);
}

TEST_CASE("parse_config: scenario/family cross checks") {
    CHECK(!parse_config("povm = spin-configuration\n").config.has_value());
    CHECK(parse_config("family = many-body\npovm = spin-configuration\n").config.has_value());
    CHECK(!parse_config("method = perturbative\nfamily = many-body\n").config.has_value());
    CHECK(!parse_config("scenario = reproduce\n").config.has_value());
    CHECK(parse_config("scenario = reproduce\nfigure = fig1\n").config.has_value());
}

TEST_CASE("config_hash ignores the output directory and worker count") {
    SweepConfig a = small_sweep_config("x");
    SweepConfig b = a;
    b.out = "elsewhere";
    b.workers = 12;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 99;
    CHECK(config_hash(a) != config_hash(b));
    SweepConfig c = a;
    c.gammas = {2.5};
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("run_scenario: row count, resume idempotence, tamper detection") {
    TempDir tmp("stark_cli_resume");
    const SweepConfig cfg = small_sweep_config((tmp.path / "run").string());

    const ScenarioOutcome first = run_scenario(cfg);
    CHECK(first.exit_code == 0);
    CHECK(first.stats.total == 2 * 13);
    CHECK(first.stats.computed == 2 * 13);

    std::vector<std::string> rows;
    REQUIRE(read_sweep_rows(tmp.path / "run" / "qfi_sweep.csv", cfg, &rows));
    CHECK(rows.size() == 2 * 13);
    for (const std::string& row : rows) {
        const auto fields = csv_fields(row);
        REQUIRE(fields.size() >= 7);
        CHECK(std::isfinite(std::stod(fields[4])));
    }

    // A completed sweep resumes with zero new solves.
    const ScenarioOutcome second = run_scenario(cfg);
    CHECK(second.stats.computed == 0);
    CHECK(second.stats.skipped == 2 * 13);

    // A different config must not silently reuse the artifacts.
    SweepConfig tampered = cfg;
    tampered.seed = 7;
    CHECK_THROWS_AS((void)run_scenario(tampered), std::runtime_error);
}

TEST_CASE("run_scenario: identical rows for 1 worker and 8 workers") {
    TempDir tmp("stark_cli_sched");
    SweepConfig one = small_sweep_config((tmp.path / "one").string());
    SweepConfig eight = small_sweep_config((tmp.path / "eight").string());
    eight.workers = 8;

    (void)run_scenario(one);
    (void)run_scenario(eight);
    CHECK(stable_content(tmp.path / "one" / "qfi_sweep.csv") ==
          stable_content(tmp.path / "eight" / "qfi_sweep.csv"));
}

TEST_CASE("interrupted runs resume from the journal") {
    TempDir tmp("stark_cli_journal");
    const SweepConfig cfg = small_sweep_config((tmp.path / "run").string());
    (void)run_scenario(cfg);

    // Simulate an interruption: demote the finished file to a journal.
    fs::rename(tmp.path / "run" / "qfi_sweep.csv", tmp.path / "run" / "qfi_sweep.csv.part");
    const ScenarioOutcome resumed = run_scenario(cfg);
    CHECK(resumed.stats.computed == 0);
    CHECK(resumed.stats.skipped == 2 * 13);
    CHECK(fs::exists(tmp.path / "run" / "qfi_sweep.csv"));
    CHECK(!fs::exists(tmp.path / "run" / "qfi_sweep.csv.part"));
}

TEST_CASE("qfi-matrix sweep flags unresolvable points instead of aborting") {
    TempDir tmp("stark_cli_flags");
    SweepConfig cfg;
    cfg.scenario = Scenario::QfiMatrixGrid;
    cfg.parabolic = true;
    cfg.sizes = {41};
    // walk the mirror line into the degenerate regime
    cfg.h1 = H1Spec{true, 1.0, {}};
    cfg.h2 = Grid{true, 1e-6, 1e-1, 11};
    cfg.out = (tmp.path / "run").string();

    const ScenarioOutcome out = run_scenario(cfg);
    std::vector<std::string> rows;
    REQUIRE(read_sweep_rows(tmp.path / "run" / "qfi_matrix.csv", cfg, &rows));
    CHECK(rows.size() == 11);

    std::size_t flagged = 0;
    for (const std::string& row : rows) {
        const auto fields = csv_fields(row);
        const bool has_flag = fields.size() >= 9 && !fields[8].empty();
        if (has_flag) ++flagged;
        // every value finite, or the row carries a non-empty flag
        for (std::size_t i = 3; i < std::min<std::size_t>(8, fields.size()); ++i)
            if (!has_flag) CHECK(std::isfinite(std::stod(fields[i])));
    }
    CHECK(flagged > 0);
    CHECK(out.exit_code == 3);
}

TEST_CASE("gap sweep emits the pinned flagless schema") {
    TempDir tmp("stark_cli_gap");
    SweepConfig cfg;
    cfg.scenario = Scenario::GapSweep;
    cfg.parabolic = true;
    cfg.sizes = {21, 41};
    cfg.h1 = H1Spec{true, 1.1, {}};
    cfg.h2 = Grid{true, 1e-8, 1e-4, 5};
    cfg.out = (tmp.path / "run").string();
    (void)run_scenario(cfg);

    const std::string content = read_file(tmp.path / "run" / "gap.csv");
    CHECK(content.find("family,L,h1,h2,gap\n") != std::string::npos);
    std::vector<std::string> rows;
    read_sweep_rows(tmp.path / "run" / "gap.csv", cfg, &rows);
    CHECK(rows.size() == 2 * 5);
}

TEST_CASE("beta-gamma scenario emits fits and the report grades them") {
    TempDir tmp("stark_cli_beta");
    SweepConfig cfg;
    cfg.scenario = Scenario::BetaGamma;
    cfg.gammas = {1.0, 2.0, 3.0};
    cfg.sizes = {41, 61, 81, 101};
    cfg.quick = true;
    cfg.out = (tmp.path / "run").string();

    const ScenarioOutcome out = run_scenario(cfg);
    CHECK(out.exit_code == 0);
    CHECK(fs::exists(tmp.path / "run" / "fits.json"));
    CHECK(fs::exists(tmp.path / "run" / "beta_gamma.csv"));

    nlohmann::json fits;
    std::ifstream(tmp.path / "run" / "fits.json") >> fits;
    REQUIRE(fits.is_array());
    bool found_line = false;
    for (const auto& f : fits)
        if (f["scenario"] == "beta-gamma:single-particle") {
            found_line = true;
            CHECK(std::abs(f["slope"].get<double>() - 2.0) < 0.4);  // small-size smoke value
        }
    CHECK(found_line);

    const ReportOutcome report = emit_report((tmp.path / "run").string());
    CHECK(report.exit_code == 0);
    CHECK(report.text.find("beta-gamma:single-particle") != std::string::npos);
    CHECK(report.text.find("reference") != std::string::npos);

    // regeneration from unchanged outputs is byte-identical
    const ReportOutcome again = emit_report((tmp.path / "run").string());
    CHECK(report.text == again.text);
    CHECK(read_file(tmp.path / "run" / "report.txt") == report.text);
}

TEST_CASE("report: empty directory means nothing to do") {
    TempDir tmp("stark_cli_empty");
    const ReportOutcome out = emit_report((tmp.path / "empty").string());
    CHECK(out.exit_code == 2);
    const ReportOutcome out2 = emit_report(tmp.path.string());
    CHECK(out2.exit_code == 2);
    CHECK(out2.text.find("nothing to report") != std::string::npos);
}

TEST_CASE("spectrum scenario writes ascending levels") {
    TempDir tmp("stark_cli_spectrum");
    SweepConfig cfg;
    cfg.scenario = Scenario::Spectrum;
    cfg.sizes = {11};
    cfg.h = Grid{false, 0.0, 0.0, 1};
    cfg.gammas = {1.0};
    cfg.out = (tmp.path / "run").string();
    // h = 0 through a monomial is invalid (gamma needs h > 0 to matter), use
    // the parabolic zero-field form instead
    cfg.parabolic = true;
    cfg.h1 = H1Spec{false, 1.0, Grid{false, 0.0, 0.0, 1}};
    cfg.h2 = Grid{false, 0.0, 0.0, 1};
    (void)run_scenario(cfg);

    std::vector<std::string> rows;
    REQUIRE(read_sweep_rows(tmp.path / "run" / "spectrum.csv", cfg, &rows));
    REQUIRE(rows.size() == 11);
    double prev = -1e300;
    for (const std::string& row : rows) {
        const double e = std::stod(csv_fields(row)[3]);
        CHECK(e >= prev);
        prev = e;
    }
}

TEST_SUITE_END();
