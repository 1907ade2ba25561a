#include "pbp/stats.hpp"

#include "pbp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbp {

double kolmogorov_sf(double x) {
    if (x < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) {
            break;
        }
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf, double alpha) {
    if (sample.empty()) {
        throw std::invalid_argument("ks_test: empty sample");
    }
    if (sample.size() < 30) {
        throw std::invalid_argument("ks_test: asymptotic p-value needs n >= 30");
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double root = std::sqrt(n);
    TestResult out;
    out.statistic = d;
    out.p_value = kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
    out.n = sorted.size();
    out.pass = out.p_value > alpha;
    return out;
}

MeanCI mean_ci(std::span<const double> samples, double level) {
    if (samples.size() < 2) {
        throw std::invalid_argument("mean_ci: need at least two samples");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("mean_ci: level must lie in (0, 1)");
    }
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double v : samples) {
        sum += v;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : samples) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, normal_quantile(0.5 + 0.5 * level) * sd / std::sqrt(n)};
}

std::vector<Bin> binned_conditional_mean(std::span<const double> xs, std::span<const double> ys,
                                         std::span<const double> edges, std::size_t min_count) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("binned_conditional_mean: xs and ys differ in length");
    }
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw std::invalid_argument("binned_conditional_mean: edges must be strictly increasing");
    }
    std::vector<Bin> bins(edges.size() - 1);
    std::vector<double> sums(bins.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), xs[i]);
        if (it == edges.begin() || it == edges.end()) {
            continue;
        }
        const auto b = static_cast<std::size_t>(it - edges.begin()) - 1;
        sums[b] += ys[i];
        ++bins[b].count;
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
        bins[b].lo = edges[b];
        bins[b].hi = edges[b + 1];
        bins[b].center = 0.5 * (edges[b] + edges[b + 1]);
        bins[b].mean = bins[b].count > 0 ? sums[b] / static_cast<double>(bins[b].count) : 0.0;
        bins[b].usable = bins[b].count >= min_count && bins[b].count > 0;
    }
    return bins;
}

double median(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("median: empty input");
    }
    std::vector<double> v(values.begin(), values.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) {
        return hi;
    }
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

} // namespace pbp
