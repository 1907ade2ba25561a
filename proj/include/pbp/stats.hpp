#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pbp {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    bool pass = false;
};

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_sf(double x);

/// One-sample KS test against `cdf` with the asymptotic p-value
/// Q((sqrt(n) + 0.12 + 0.11/sqrt(n)) D_n). Requires n >= 30.
TestResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf, double alpha = 0.01);

struct MeanCI {
    double mean = 0.0;
    double half_width = 0.0;
};

/// Sample mean and normal-approximation half-width at confidence `level`.
MeanCI mean_ci(std::span<const double> samples, double level);

struct Bin {
    double lo = 0.0;
    double hi = 0.0;
    double center = 0.0;
    double mean = 0.0;
    std::size_t count = 0;
    bool usable = false;
};

/// Mean of ys over xs in each half-open bin [edges[i], edges[i+1]). Bins with
/// fewer than `min_count` points are marked unusable.
std::vector<Bin> binned_conditional_mean(std::span<const double> xs, std::span<const double> ys,
                                         std::span<const double> edges, std::size_t min_count = 500);

/// Median of a copy of `values`; throws on empty input.
double median(std::span<const double> values);

} // namespace pbp
