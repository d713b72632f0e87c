// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "stark/fits.hpp"

namespace stark {

/// One size's sweep: h strictly increasing, values positive.
struct CurveSamples {
    double size = 0.0;  ///< L
    Points samples;     ///< (h, y)
};

struct CurveFamily {
    std::vector<CurveSamples> members;
};

struct CollapseInit {
    double h_c = 0.0;
    double alpha = 2.0;
    double nu = 0.3;
};

struct CollapseResult {
    double h_c = 0.0;
    double alpha = 0.0;
    double nu = 0.0;
    double quality = 0.0;   ///< mean squared inter-curve deviation after scaling
    double baseline = 0.0;  ///< same objective without any scaling
    int iterations = 0;     ///< objective evaluations across restarts
    bool stagnated = false; ///< optimizer returned best-so-far without meeting tolerance
    double stderr_h_c = 0.0;   ///< bootstrap errors; zero when not requested
    double stderr_alpha = 0.0;
    double stderr_nu = 0.0;
};

/// Mean squared deviation of log10(L^(-alpha/nu) y) from the running master
/// curve in log-log coordinates, where each point is validated against the
/// piecewise-linear interpolation of every *other* curve covering its scaled
/// abscissa log10(L^(1/nu) (h - h_c)). Points outside all other curves'
/// ranges carry zero weight. Returns +inf when fewer than a quarter of the
/// points can be cross-validated (no usable overlap).
double collapse_quality(const CurveFamily& family, double h_c, double alpha, double nu);

/// The same objective with the scaling turned off (raw log-log curves).
double collapse_baseline(const CurveFamily& family);

/// Data-driven starting point: alpha from the largest size's tail, 1/nu from
/// the drift of the decay onset with L, h_c = 0.
CollapseInit estimate_init(const CurveFamily& family);

/// Derivative-free simplex descent over (h_c, alpha, nu) with three restarts
/// from perturbed inits. Deterministic.
CollapseResult collapse(const CurveFamily& family, CollapseInit init);

/// collapse() followed by a point-resampling bootstrap for the stderr fields.
CollapseResult collapse_with_errors(const CurveFamily& family, CollapseInit init,
                                    int resamples = kBootstrapResamples,
                                    std::uint64_t seed = kBootstrapSeed);

/// Scaled coordinates of every sample under the fitted parameters, for
/// plot-data output: tuples (L, x_scaled, y_scaled).
struct ScaledPoint {
    double size;
    double x;
    double y;
};
std::vector<ScaledPoint> scaled_family(const CurveFamily& family, const CollapseResult& fit);

}  // namespace stark
