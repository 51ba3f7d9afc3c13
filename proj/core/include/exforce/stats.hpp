#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace exforce {

/// Sample Pearson product-moment correlation. Throws std::invalid_argument on
/// length mismatch or fewer than two points, std::domain_error when either
/// argument has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation: Pearson of the rank vectors, ties receiving
/// average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

std::vector<double> average_ranks(std::span<const double> x);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Confidence interval for a Pearson correlation via the Fisher z-transform.
Interval fisher_confidence(double r, std::size_t n, double level = 0.95);

/// Gamma distribution summary fitted by the method of moments:
/// shape = mean^2/variance, rate = mean/variance (sample variance, n-1).
/// A zero-variance sample yields a degenerate fit with infinite shape/rate
/// and the mean preserved.
struct GammaFit {
    double shape = 0.0;
    double rate = 0.0;
    double mean = 0.0;

    bool degenerate() const;
};

GammaFit fit_gamma_moments(std::span<const double> samples);

}  // namespace exforce
