// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace stark {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Reference {
    double value;
    double tolerance;
};

// Reference exponents and the acceptance tolerances they are checked at.
const std::map<std::string, std::pair<Reference, Reference>> kLineReferences = {
    // tag -> (slope reference, intercept reference); tolerance 0 = not gated
    {"beta-gamma:single-particle", {{1.99, 0.15}, {3.97, 0.30}}},
    {"beta-gamma:many-body", {{3.69, 0.50}, {-0.45, 0.80}}},
    {"inverse-nu:single-particle", {{1.01, 0.15}, {1.97, 0.20}}},
};

const std::map<std::string, Reference> kSlopeReferences = {
    {"power-law:single-particle:gamma=2", {7.95, 0.15}},
    {"multiparam:single-particle:f11", {6.47, 0.20}},
    {"multiparam:single-particle:f22", {8.47, 0.20}},
    {"multiparam:single-particle:f12", {7.47, 0.20}},
    {"multiparam:single-particle:c11", {6.37, 0.25}},
    {"multiparam:single-particle:c22", {8.38, 0.25}},
    {"multiparam:single-particle:c12", {7.36, 0.25}},
    {"multiparam:single-particle:trace-inv", {-6.30, 0.30}},
    {"multiparam:single-particle:tn11", {4.37, 0.30}},
    {"multiparam:single-particle:tn22", {6.37, 0.30}},
    {"multiparam:single-particle:tn12", {5.37, 0.30}},
    {"multiparam:single-particle:gap", {-2.10, 0.20}},
    {"multiparam:many-body:trace-inv", {-3.20, 0.50}},
    {"multiparam:many-body:tn11", {2.47, 0.60}},
    {"multiparam:many-body:tn22", {5.00, 0.60}},
    {"multiparam:many-body:tn12", {3.73, 0.60}},
    {"multiparam:many-body:gap", {-0.76, 0.20}},
    {"gap:extended", {-1.99, 0.10}},
    {"gap:near-transition", {-2.10, 0.20}},
    {"gap:localized", {0.77, 0.10}},
    {"gap:many-body", {-0.76, 0.20}},
    {"decay:single-particle", {2.00, 0.05}},
    {"decay:many-body", {4.00, 0.50}},
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string verdict(double value, const Reference& ref) {
    return std::abs(value - ref.value) <= ref.tolerance ? "PASS" : "FAIL";
}

void report_fits(const fs::path& path, std::ostringstream& out) {
    std::ifstream in(path);
    json j;
    try {
        in >> j;
    } catch (...) {
        return;
    }
    if (!j.is_array()) return;
    for (const json& e : j) {
        const std::string tag = e.value("scenario", "");
        const double slope = e.value("slope", 0.0);
        const double ds = e.value("stderr_slope", 0.0);
        const double intercept = e.value("intercept", 0.0);
        const double di = e.value("stderr_intercept", 0.0);
        out << path.string() << ": " << tag << ": ";
        if (const auto it = kLineReferences.find(tag); it != kLineReferences.end()) {
            out << "a = " << num(slope) << " +- " << num(ds) << ", b = " << num(intercept)
                << " +- " << num(di) << ", reference (" << num(it->second.first.value) << ", "
                << num(it->second.second.value) << "): "
                << (verdict(slope, it->second.first) == "PASS" &&
                            verdict(intercept, it->second.second) == "PASS"
                        ? "PASS"
                        : "FAIL")
                << "\n";
        } else if (const auto is = kSlopeReferences.find(tag); is != kSlopeReferences.end()) {
            out << "slope = " << num(slope) << " +- " << num(ds) << ", reference "
                << num(is->second.value) << " +- " << num(is->second.tolerance) << ": "
                << verdict(slope, is->second) << "\n";
        } else {
            out << "slope = " << num(slope) << " +- " << num(ds)
                << ", intercept = " << num(intercept) << " +- " << num(di) << "\n";
        }
    }
}

void report_collapse(const fs::path& path, std::ostringstream& out) {
    std::ifstream in(path);
    json j;
    try {
        in >> j;
    } catch (...) {
        return;
    }
    const double alpha = j.value("alpha", 0.0);
    const double nu = j.value("nu", 0.0);
    const double hc = j.value("h_c", 0.0);
    out << path.string() << ": collapse: h_c = " << num(hc) << ", alpha = " << num(alpha)
        << ", nu = " << num(nu) << ", quality = " << num(j.value("quality", 0.0))
        << "; gamma=2 single-particle reference (alpha 2.0 +- 0.1, nu 0.25 +- 0.05): "
        << (std::abs(alpha - 2.0) <= 0.1 && std::abs(nu - 0.25) <= 0.05 ? "PASS" : "FAIL")
        << "\n";
}

void report_decay(const fs::path& path, std::ostringstream& out) {
    std::ifstream in(path);
    json j;
    try {
        in >> j;
    } catch (...) {
        return;
    }
    const std::string tag = j.value("scenario", "");
    const double alpha = j.value("alpha", 0.0);
    out << path.string() << ": " << tag << ": alpha = " << num(alpha);
    if (const auto it = kSlopeReferences.find(tag); it != kSlopeReferences.end())
        out << ", reference " << num(it->second.value) << " +- " << num(it->second.tolerance)
            << ": " << verdict(alpha, it->second);
    out << "\n";
}

}  // namespace

ReportOutcome emit_report(const std::string& out_dir) {
    ReportOutcome outcome;
    std::ostringstream text;

    if (!fs::exists(out_dir)) {
        outcome.exit_code = 2;
        outcome.text = "nothing to report: no such directory " + out_dir + "\n";
        return outcome;
    }

    std::vector<fs::path> fits, collapses, decays;
    for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "fits.json") fits.push_back(entry.path());
        if (name == "collapse.json") collapses.push_back(entry.path());
        if (name == "decay_fit.json") decays.push_back(entry.path());
    }
    std::sort(fits.begin(), fits.end());
    std::sort(collapses.begin(), collapses.end());
    std::sort(decays.begin(), decays.end());

    for (const fs::path& p : collapses) report_collapse(p, text);
    for (const fs::path& p : decays) report_decay(p, text);
    for (const fs::path& p : fits) report_fits(p, text);

    outcome.text = text.str();
    if (outcome.text.empty()) {
        outcome.exit_code = 2;
        outcome.text = "nothing to report: no fit artifacts under " + out_dir + "\n";
        return outcome;
    }

    std::ofstream report_file(fs::path(out_dir) / "report.txt", std::ios::trunc);
    report_file << outcome.text;
    return outcome;
}

}  // namespace stark
