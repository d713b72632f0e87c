// Copyright 2026 The StarkLab Authors
// SPDX-License-Identifier: Apache-2.0

#include "stark/fits.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace stark {

FitResult fit_linear(const Points& points) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("fit_linear: need at least 2 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_linear: degenerate abscissae");

    FitResult f;
    f.n_points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - (f.slope * x + f.intercept);
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    if (n > 2) {
        const double var = ss_res / (n - 2);
        f.stderr_slope = std::sqrt(var / sxx);
        f.stderr_intercept = std::sqrt(var * (1.0 / n + mx * mx / sxx));
    }
    return f;
}

FitResult fit_power_law(const Points& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    Points logs;
    logs.reserve(points.size());
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::invalid_argument("fit_power_law: coordinates must be positive");
        logs.emplace_back(std::log(x), std::log(y));
    }
    return fit_linear(logs);
}

FitResult fit_beta_gamma(const Points& gamma_beta) {
    if (gamma_beta.size() < 3) throw std::invalid_argument("fit_beta_gamma: need >= 3 points");
    return fit_linear(gamma_beta);
}

FitResult fit_inverse_nu(const Points& gamma_inv_nu) {
    if (gamma_inv_nu.size() < 3) throw std::invalid_argument("fit_inverse_nu: need >= 3 points");
    return fit_linear(gamma_inv_nu);
}

double decay_onset(const Points& curve, double fraction) {
    if (curve.size() < 2) throw std::invalid_argument("decay_onset: need at least 2 points");
    double fmax = 0.0;
    for (const auto& [h, f] : curve) fmax = std::max(fmax, f);
    const double target = fraction * fmax;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto& [h0, f0] = curve[i - 1];
        const auto& [h1, f1] = curve[i];
        if (f0 >= target && f1 < target) {
            // log-log interpolation between the bracketing samples
            const double t = (std::log(target) - std::log(f0)) / (std::log(f1) - std::log(f0));
            return std::exp(std::log(h0) + t * (std::log(h1) - std::log(h0)));
        }
    }
    throw std::invalid_argument("decay_onset: curve never falls below the requested fraction");
}

DecayFit fit_decay_exponent(const Points& curve, double h_max, double window_cap) {
    if (curve.size() < 5) throw std::invalid_argument("fit_decay_exponent: need >= 5 samples");

    double onset;
    try {
        onset = decay_onset(curve, kTailFraction);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("fit_decay_exponent: no algebraic tail in the sampled range");
    }
    const double lo = std::max(onset, 3.0 * h_max);
    const double hi = std::min(1e3 * lo, window_cap);

    DecayFit out;
    out.window_lo = lo;
    out.window_hi = hi;
    Points tail;
    for (const auto& [h, f] : curve)
        if (h >= lo && h <= hi && h > h_max && f > 0.0) tail.emplace_back(h - h_max, f);
    out.n_tail = static_cast<int>(tail.size());
    if (out.n_tail < 5)
        throw std::invalid_argument("fit_decay_exponent: fewer than 5 points in the tail window");
    out.fit = fit_power_law(tail);
    out.alpha = -out.fit.slope;
    return out;
}

PeakResult find_peak(const Points& curve) {
    if (curve.empty()) throw std::invalid_argument("find_peak: empty curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].second > curve[best].second) best = i;
    PeakResult p{curve[best].first, curve[best].second,
                 best == 0 || best + 1 == curve.size()};
    return p;
}

PeakResult find_peak(const std::function<double(double)>& evaluate, double grid_lo,
                     double grid_hi, int points_per_decade) {
    if (!(grid_lo > 0.0) || !(grid_hi > grid_lo))
        throw std::invalid_argument("find_peak: need 0 < grid_lo < grid_hi");

    const double llo = std::log10(grid_lo), lhi = std::log10(grid_hi);
    const int n = std::max(2, static_cast<int>(std::ceil((lhi - llo) * points_per_decade)) + 1);
    std::size_t best = 0;
    std::vector<double> lg(static_cast<std::size_t>(n)), fv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        lg[static_cast<std::size_t>(i)] = llo + (lhi - llo) * i / (n - 1);
        fv[static_cast<std::size_t>(i)] = evaluate(std::pow(10.0, lg[static_cast<std::size_t>(i)]));
        if (fv[static_cast<std::size_t>(i)] > fv[best]) best = static_cast<std::size_t>(i);
    }
    if (best == 0 || best + 1 == static_cast<std::size_t>(n))
        return {std::pow(10.0, lg[best]), fv[best], true};

    // Golden-section refinement on the log abscissa inside the bracket.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lg[best - 1], b = lg[best + 1];
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = evaluate(std::pow(10.0, x1)), f2 = evaluate(std::pow(10.0, x2));
    for (int iter = 0; iter < 60 && (b - a) > 1e-6; ++iter) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = evaluate(std::pow(10.0, x2));
        } else {
            // ties move toward smaller h
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = evaluate(std::pow(10.0, x1));
        }
    }
    const double xm = 0.5 * (a + b);
    const double hm = std::pow(10.0, xm);
    return {hm, evaluate(hm), false};
}

BootstrapErrors bootstrapFitImpl(const Points& points,
                                 const std::function<FitResult(const Points&)>& fit,
                                 int resamples, std::uint64_t seed) {
    const std::size_t n = points.size();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    double s1 = 0.0, s2 = 0.0, i1 = 0.0, i2 = 0.0;
    int used = 0;
    Points sample(n);
    for (int r = 0; r < resamples; ++r) {
        for (std::size_t k = 0; k < n; ++k) sample[k] = points[pick(rng)];
        try {
            const FitResult f = fit(sample);
            s1 += f.slope;
            s2 += f.slope * f.slope;
            i1 += f.intercept;
            i2 += f.intercept * f.intercept;
            ++used;
        } catch (const std::invalid_argument&) {
            // degenerate resample (all identical abscissae); skip
        }
    }
    BootstrapErrors out;
    out.resamples = used;
    if (used > 1) {
        out.stderr_slope = std::sqrt(std::max(0.0, (s2 - s1 * s1 / used) / (used - 1)));
        out.stderr_intercept = std::sqrt(std::max(0.0, (i2 - i1 * i1 / used) / (used - 1)));
    }
    return out;
}

BootstrapErrors bootstrap_fit(const Points& points,
                              const std::function<FitResult(const Points&)>& fit, int resamples,
                              std::uint64_t seed) {
    if (points.size() < 3) throw std::invalid_argument("bootstrap_fit: need >= 3 points");
    return bootstrapFitImpl(points, fit, resamples, seed);
}

}  // namespace stark
