// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace stark {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Parser {
    std::vector<std::string> errors;

    bool to_double(const std::string& s, const std::string& key, double* out) {
        try {
            std::size_t pos = 0;
            *out = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return true;
        } catch (...) {
            errors.push_back(key + ": not a number: '" + s + "'");
            return false;
        }
    }

    bool to_int(const std::string& s, const std::string& key, int* out) {
        try {
            std::size_t pos = 0;
            *out = std::stoi(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return true;
        } catch (...) {
            errors.push_back(key + ": not an integer: '" + s + "'");
            return false;
        }
    }

    bool to_grid(const std::string& s, const std::string& key, Grid* out) {
        const auto parts = split(s, ':');
        if (parts.size() == 1) {
            double v;
            if (!to_double(parts[0], key, &v)) return false;
            *out = Grid{false, v, v, 1};
            return true;
        }
        if (parts.size() != 4 || (parts[0] != "log" && parts[0] != "lin")) {
            errors.push_back(key + ": grid must be log:start:stop:count or lin:start:stop:count");
            return false;
        }
        Grid g;
        g.log = parts[0] == "log";
        int count = 0;
        if (!to_double(parts[1], key, &g.start) || !to_double(parts[2], key, &g.stop) ||
            !to_int(parts[3], key, &count))
            return false;
        g.count = count;
        if (g.count < 1) {
            errors.push_back(key + ": grid count must be positive");
            return false;
        }
        if (g.log && (!(g.start > 0.0) || !(g.stop > 0.0))) {
            errors.push_back(key + ": log grid requires positive endpoints");
            return false;
        }
        if (g.stop < g.start) {
            errors.push_back(key + ": grid stop below start");
            return false;
        }
        *out = g;
        return true;
    }
};

}  // namespace

std::vector<double> Grid::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        out.push_back(start);
        return out;
    }
    if (log) {
        const double l0 = std::log10(start), l1 = std::log10(stop);
        for (int i = 0; i < count; ++i)
            out.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (count - 1)));
    } else {
        for (int i = 0; i < count; ++i)
            out.push_back(start + (stop - start) * i / (count - 1));
    }
    return out;
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Spectrum: return "spectrum";
        case Scenario::QfiSweep: return "qfi-sweep";
        case Scenario::QfiMatrixGrid: return "qfi-matrix";
        case Scenario::CfiSweep: return "cfi-sweep";
        case Scenario::GapSweep: return "gap-sweep";
        case Scenario::Collapse: return "collapse";
        case Scenario::BetaGamma: return "beta-gamma";
        case Scenario::MultiParamTrace: return "multiparam-trace";
        case Scenario::Reproduce: return "reproduce";
    }
    return "?";
}

std::optional<Scenario> scenario_from_name(const std::string& name) {
    for (Scenario s : {Scenario::Spectrum, Scenario::QfiSweep, Scenario::QfiMatrixGrid,
                       Scenario::CfiSweep, Scenario::GapSweep, Scenario::Collapse,
                       Scenario::BetaGamma, Scenario::MultiParamTrace, Scenario::Reproduce})
        if (scenario_name(s) == name) return s;
    return std::nullopt;
}

ParseOutcome parse_config(const std::string& text) {
    Parser p;
    SweepConfig cfg;
    std::map<std::string, std::string> seen;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            p.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (seen.count(key))
            p.errors.push_back("duplicate key: " + key);
        seen[key] = value;

        if (key == "scenario") {
            const auto s = scenario_from_name(value);
            if (!s)
                p.errors.push_back("scenario: unknown '" + value + "'");
            else
                cfg.scenario = *s;
        } else if (key == "family") {
            if (value == "single-particle")
                cfg.family = Family::SingleParticle;
            else if (value == "many-body")
                cfg.family = Family::ManyBodyHalfFilling;
            else
                p.errors.push_back("family: expected single-particle or many-body");
        } else if (key == "potential") {
            if (value == "monomial")
                cfg.parabolic = false;
            else if (value == "parabolic")
                cfg.parabolic = true;
            else
                p.errors.push_back("potential: expected monomial or parabolic");
        } else if (key == "gamma") {
            cfg.gammas.clear();
            for (const std::string& item : split(value, ',')) {
                double v;
                if (p.to_double(item, key, &v)) cfg.gammas.push_back(v);
            }
            if (cfg.gammas.empty()) p.errors.push_back("gamma: empty list");
        } else if (key == "L") {
            cfg.sizes.clear();
            for (const std::string& item : split(value, ',')) {
                int v;
                if (p.to_int(item, key, &v)) cfg.sizes.push_back(v);
            }
            if (cfg.sizes.empty()) p.errors.push_back("L: empty list");
        } else if (key == "J") {
            p.to_double(value, key, &cfg.coupling);
        } else if (key == "h") {
            p.to_grid(value, key, &cfg.h);
        } else if (key == "h1") {
            if (value.rfind("tied:", 0) == 0) {
                cfg.h1.tied = true;
                p.to_double(value.substr(5), key, &cfg.h1.tie_factor);
            } else {
                cfg.h1.tied = false;
                p.to_grid(value, key, &cfg.h1.grid);
            }
        } else if (key == "h2") {
            p.to_grid(value, key, &cfg.h2);
        } else if (key == "povm") {
            if (value == "position")
                cfg.povm = Povm::PositionBasis;
            else if (value == "spin-configuration")
                cfg.povm = Povm::SpinConfigurationBasis;
            else
                p.errors.push_back("povm: expected position or spin-configuration");
        } else if (key == "method") {
            if (value == "finite-difference")
                cfg.method = MethodSelector::FiniteDifference;
            else if (value == "perturbative")
                cfg.method = MethodSelector::Perturbative;
            else
                p.errors.push_back("method: expected finite-difference or perturbative");
        } else if (key == "figure") {
            static const std::vector<std::string> known{"fig1", "fig2", "fig3",
                                                        "fig5", "fig6", "fig7"};
            if (std::find(known.begin(), known.end(), value) == known.end())
                p.errors.push_back("figure: expected one of fig1, fig2, fig3, fig5, fig6, fig7");
            cfg.figure = value;
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "workers") {
            int w = 1;
            if (p.to_int(value, key, &w)) {
                if (w < 1)
                    p.errors.push_back("workers: must be >= 1");
                else
                    cfg.workers = w;
            }
        } else if (key == "seed") {
            try {
                cfg.seed = std::stoull(value);
            } catch (...) {
                p.errors.push_back("seed: not an unsigned integer");
            }
        } else if (key == "quick") {
            cfg.quick = value == "true" || value == "1";
        } else if (key == "full") {
            cfg.full = value == "true" || value == "1";
        } else if (key == "beta-mode") {
            if (value == "peak")
                cfg.beta_at_peak = true;
            else if (value == "fixed-h")
                cfg.beta_at_peak = false;
            else
                p.errors.push_back("beta-mode: expected peak or fixed-h");
        } else if (key == "fixed-h") {
            p.to_double(value, key, &cfg.fixed_h);
        } else {
            p.errors.push_back("unknown key: " + key);
        }
    }

    // cross-field validation
    if (cfg.family == Family::ManyBodyHalfFilling && !seen.count("L"))
        cfg.sizes = {6, 8, 10, 12, 14, 16};
    if (cfg.family == Family::ManyBodyHalfFilling)
        for (int L : cfg.sizes)
            if (L % 2 != 0)
                p.errors.push_back("L: many-body sizes must be even (got " + std::to_string(L) +
                                   ")");
    for (int L : cfg.sizes)
        if (L < 2) p.errors.push_back("L: sizes must be >= 2");
    for (double g : cfg.gammas)
        if (!(g > 0.0)) p.errors.push_back("gamma: must be positive");
    if (!(cfg.coupling > 0.0)) p.errors.push_back("J: must be positive");
    if (cfg.povm) {
        const bool match =
            (*cfg.povm == Povm::PositionBasis && cfg.family == Family::SingleParticle) ||
            (*cfg.povm == Povm::SpinConfigurationBasis &&
             cfg.family == Family::ManyBodyHalfFilling);
        if (!match) p.errors.push_back("povm: does not match family");
    }
    if (cfg.scenario == Scenario::CfiSweep && !cfg.povm)
        cfg.povm = cfg.family == Family::SingleParticle ? Povm::PositionBasis
                                                        : Povm::SpinConfigurationBasis;
    if (cfg.scenario == Scenario::Reproduce && cfg.figure.empty())
        p.errors.push_back("reproduce scenario requires figure = figN");
    if (cfg.method == MethodSelector::Perturbative &&
        (cfg.family != Family::SingleParticle || cfg.parabolic))
        p.errors.push_back("method: perturbative applies to single-particle monomial probes only");

    ParseOutcome out;
    out.errors = std::move(p.errors);
    if (out.errors.empty()) out.config = cfg;
    return out;
}

std::string serialize_config(const SweepConfig& c) {
    std::ostringstream out;
    const auto grid = [](const Grid& g) {
        if (g.count == 1) return fmt(g.start);
        return std::string(g.log ? "log:" : "lin:") + fmt(g.start) + ":" + fmt(g.stop) + ":" +
               std::to_string(g.count);
    };
    out << "scenario = " << scenario_name(c.scenario) << "\n";
    out << "family = "
        << (c.family == Family::SingleParticle ? "single-particle" : "many-body") << "\n";
    out << "potential = " << (c.parabolic ? "parabolic" : "monomial") << "\n";
    out << "gamma = ";
    for (std::size_t i = 0; i < c.gammas.size(); ++i)
        out << (i ? "," : "") << fmt(c.gammas[i]);
    out << "\n";
    out << "L = ";
    for (std::size_t i = 0; i < c.sizes.size(); ++i) out << (i ? "," : "") << c.sizes[i];
    out << "\n";
    out << "J = " << fmt(c.coupling) << "\n";
    out << "h = " << grid(c.h) << "\n";
    if (c.h1.tied)
        out << "h1 = tied:" << fmt(c.h1.tie_factor) << "\n";
    else
        out << "h1 = " << grid(c.h1.grid) << "\n";
    out << "h2 = " << grid(c.h2) << "\n";
    if (c.povm)
        out << "povm = "
            << (*c.povm == Povm::PositionBasis ? "position" : "spin-configuration") << "\n";
    out << "method = "
        << (c.method == MethodSelector::Perturbative ? "perturbative" : "finite-difference")
        << "\n";
    if (!c.figure.empty()) out << "figure = " << c.figure << "\n";
    out << "out = " << c.out << "\n";
    out << "workers = " << c.workers << "\n";
    out << "seed = " << c.seed << "\n";
    out << "quick = " << (c.quick ? "true" : "false") << "\n";
    out << "full = " << (c.full ? "true" : "false") << "\n";
    if (c.beta_at_peak) out << "beta-mode = " << (*c.beta_at_peak ? "peak" : "fixed-h") << "\n";
    out << "fixed-h = " << fmt(c.fixed_h) << "\n";
    return out.str();
}

std::uint64_t config_hash(const SweepConfig& c) {
    const std::string canon = serialize_config(c);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    std::istringstream in(canon);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("out = ", 0) == 0 || line.rfind("workers = ", 0) == 0) continue;
        for (const char ch : line) {
            hash ^= static_cast<unsigned char>(ch);
            hash *= 0x100000001b3ull;
        }
        hash ^= '\n';
        hash *= 0x100000001b3ull;
    }
    return hash;
}

}  // namespace stark
