// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "stark/types.hpp"

namespace stark {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double stderr_intercept = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

using Points = std::vector<std::pair<double, double>>;

/// Ordinary least squares y = slope*x + intercept with the usual residual
/// standard errors.
FitResult fit_linear(const Points& points);

/// Least-squares line on (ln x, ln y); the slope is the power-law exponent.
/// Throws on nonpositive coordinates or fewer than 3 points.
FitResult fit_power_law(const Points& points);

/// beta = a*gamma + b across the nonlinearity grid.
FitResult fit_beta_gamma(const Points& gamma_beta);

/// 1/nu = a*gamma + b across the nonlinearity grid.
FitResult fit_inverse_nu(const Points& gamma_inv_nu);

struct DecayFit {
    FitResult fit;        ///< power law of F vs (h - h_max)
    double alpha = 0.0;   ///< decay exponent, = -fit.slope
    double window_lo = 0.0;
    double window_hi = 0.0;
    int n_tail = 0;
};

inline constexpr double kTailFraction = 3e-2;
inline constexpr double kTailWindowCap = 0.5;  ///< fields in units of J

/// Algebraic tail F ~ |h - h_max|^(-alpha) of a localized-phase curve.
/// The fit window starts at the measured decay onset (where F has fallen to
/// kTailFraction of the curve maximum, and at least 3*h_max) and spans up to
/// three decades, clipped at window_cap: anchoring at the onset keeps
/// crossover curvature out, the cap keeps lattice-scale fields (h ~ J) out.
/// Throws when fewer than 5 tail points remain.
DecayFit fit_decay_exponent(const Points& curve, double h_max,
                            double window_cap = kTailWindowCap);

/// Smallest h at which the curve has dropped to `fraction` of its maximum
/// (log-interpolated); the operational transition-scale of monotone
/// plateau-then-decay families.
double decay_onset(const Points& curve, double fraction = 0.5);

struct PeakResult {
    double h_max = 0.0;
    double f_max = 0.0;
    bool boundary = false;  ///< argmax sat on the grid edge; caller must extend
};

/// Grid argmax, ties toward smaller h.
PeakResult find_peak(const Points& curve);

/// Coarse grid argmax followed by golden-section refinement of the
/// evaluator on log-spaced abscissae. grid_lo/grid_hi bound the coarse
/// scan; points_per_decade controls its density.
PeakResult find_peak(const std::function<double(double)>& evaluate, double grid_lo,
                     double grid_hi, int points_per_decade = 200);

struct BootstrapErrors {
    double stderr_slope = 0.0;
    double stderr_intercept = 0.0;
    int resamples = 0;
};

inline constexpr int kBootstrapResamples = 200;
inline constexpr std::uint64_t kBootstrapSeed = 0x626f6f'74737472ull;

/// Point-resampling bootstrap of a fit; `fit` maps resampled points to a
/// FitResult (fit_power_law, fit_linear, ...). Fixed seed, deterministic.
BootstrapErrors bootstrap_fit(const Points& points,
                              const std::function<FitResult(const Points&)>& fit,
                              int resamples = kBootstrapResamples,
                              std::uint64_t seed = kBootstrapSeed);

}  // namespace stark
