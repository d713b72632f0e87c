// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0
//
// stark - batch driver for Stark-probe sensing sweeps.
//
//   stark <scenario> [--config FILE] [--out DIR] [--workers N] [--seed S]
//         [--quick] [--full]
//   stark reproduce <figure-id> ...
//   stark report --out DIR
//
// Exit codes: 0 success, 1 invalid configuration, 2 nothing to do,
// 3 solver failures recorded in the output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stark/report.hpp"
#include "stark/scenarios.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out;
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quick = false;
    bool full = false;
};

void add_common(CLI::App* cmd, CliOptions* opts) {
    cmd->add_option("--config", opts->config_path, "flat key = value configuration file");
    cmd->add_option("--out", opts->out, "output directory");
    cmd->add_option("--workers", opts->workers, "worker threads for grid points");
    cmd->add_option("--seed", opts->seed, "solver seed recorded in output metadata")
        ->each([opts](const std::string&) { opts->seed_set = true; });
    cmd->add_flag("--quick", opts->quick, "halved grids and capped sizes for CI");
    cmd->add_flag("--full", opts->full, "enable the L = 18 many-body sizes");
}

int run(stark::Scenario scenario, const CliOptions& opts, const std::string& figure) {
    stark::SweepConfig cfg;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) {
            std::cerr << "cannot read config file: " << opts.config_path << "\n";
            return 1;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        const stark::ParseOutcome parsed = stark::parse_config(buf.str());
        if (!parsed.config) {
            for (const std::string& e : parsed.errors) std::cerr << "config: " << e << "\n";
            return 1;
        }
        cfg = *parsed.config;
    }

    cfg.scenario = scenario;
    if (!figure.empty()) cfg.figure = figure;
    if (scenario == stark::Scenario::QfiMatrixGrid || scenario == stark::Scenario::CfiSweep ||
        scenario == stark::Scenario::GapSweep || scenario == stark::Scenario::MultiParamTrace)
        cfg.parabolic = true;
    if (cfg.family == stark::Family::ManyBodyHalfFilling && cfg.sizes == std::vector<int>{101, 201, 301, 401, 501})
        cfg.sizes = {6, 8, 10, 12, 14, 16};
    if (!opts.out.empty()) cfg.out = opts.out;
    if (opts.workers > 0) cfg.workers = opts.workers;
    if (opts.seed_set) cfg.seed = opts.seed;
    cfg.quick = cfg.quick || opts.quick;
    cfg.full = cfg.full || opts.full;

    const stark::ScenarioOutcome outcome = stark::run_scenario(cfg);
    for (const std::string& path : outcome.outputs) std::cout << "wrote " << path << "\n";
    std::cout << "points: " << outcome.stats.total << " total, " << outcome.stats.computed
              << " computed, " << outcome.stats.skipped << " resumed, " << outcome.stats.failed
              << " flagged\n";
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stark-probe sensing toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string figure;

    struct Sub {
        const char* name;
        stark::Scenario scenario;
        const char* help;
    };
    const Sub subs[] = {
        {"spectrum", stark::Scenario::Spectrum, "eigenvalues of the configured probes"},
        {"qfi-sweep", stark::Scenario::QfiSweep, "scalar QFI over a field grid"},
        {"qfi-matrix", stark::Scenario::QfiMatrixGrid, "QFI matrix over an (h1, h2) grid"},
        {"cfi-sweep", stark::Scenario::CfiSweep, "classical Fisher matrix sweeps"},
        {"gap-sweep", stark::Scenario::GapSweep, "ground-state energy gaps"},
        {"collapse", stark::Scenario::Collapse, "finite-size scaling collapse of a QFI family"},
        {"fit-beta-gamma", stark::Scenario::BetaGamma, "QFI size-scaling exponents vs gamma"},
        {"multiparam-trace", stark::Scenario::MultiParamTrace,
         "peak-point Fisher matrices, Tr[F^-1] and time-normalized scaling"},
    };
    for (const Sub& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, &opts);
        cmd->callback([&, scenario = s.scenario] { std::exit(run(scenario, opts, "")); });
    }

    CLI::App* rep = app.add_subcommand("reproduce", "run a figure recipe end to end");
    rep->add_option("figure", figure, "fig1, fig2, fig3, fig5, fig6 or fig7")->required();
    add_common(rep, &opts);
    rep->callback([&] {
        if (figure != "fig1" && figure != "fig2" && figure != "fig3" && figure != "fig5" &&
            figure != "fig6" && figure != "fig7") {
            std::cerr << "unknown figure id: " << figure << "\n";
            std::exit(1);
        }
        std::exit(run(stark::Scenario::Reproduce, opts, figure));
    });

    CLI::App* report = app.add_subcommand("report", "summarize fits against reference values");
    add_common(report, &opts);
    report->callback([&] {
        const stark::ReportOutcome outcome =
            stark::emit_report(opts.out.empty() ? "out" : opts.out);
        std::cout << outcome.text;
        std::exit(outcome.exit_code);
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
