#include "pbp/oracles.hpp"

#include "pbp/drift.hpp"
#include "pbp/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pbp {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr std::uint32_t kSamplerComponents = 3;

template <class F>
double integrate(F f, double a, double b) {
    double error = 0.0;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12, &error);
}

} // namespace

double bes3_bridge_density(double t, double r) {
    if (!(t > 0.0 && t < 1.0)) {
        throw std::invalid_argument("bes3_bridge_density: need 0 < t < 1");
    }
    if (r <= 0.0) {
        return 0.0;
    }
    const double mu = t;
    const double var = t * (1.0 - t);
    const double sigma = std::sqrt(var);
    // e^{-(r-mu)^2/2v} - e^{-(r+mu)^2/2v}, factored to avoid cancellation near r = 0.
    const double diff = std::exp(-(r - mu) * (r - mu) / (2.0 * var)) * -std::expm1(-2.0 * r * mu / var);
    return r / (mu * sigma * std::sqrt(2.0 * std::numbers::pi)) * diff;
}

MarginalLaw bes3_bridge_marginal(double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw std::invalid_argument("bes3_bridge_marginal: need 0 < t < 1");
    }
    const double sigma = std::sqrt(t * (1.0 - t));
    const double upper = t + 40.0 * sigma;
    auto density = [t](double r) { return bes3_bridge_density(t, r); };

    MarginalLaw law;
    law.description = "bes3_bridge(0 -> 1) at t=" + format_full(t);
    law.cdf = [density, upper](double r) {
        if (r <= 0.0) {
            return 0.0;
        }
        if (r >= upper) {
            return 1.0;
        }
        return std::clamp(integrate(density, 0.0, r), 0.0, 1.0);
    };
    law.sample = [t, sigma](std::uint64_t seed, std::uint32_t stream, std::uint32_t index) {
        double sq = 0.0;
        for (std::uint32_t c = 0; c < kSamplerComponents; ++c) {
            const double z = sigma * standard_normal({seed, stream, c, 0, index}) + (c == 0 ? t : 0.0);
            sq += z * z;
        }
        return std::sqrt(sq);
    };
    law.mean = integrate([density](double r) { return r * density(r); }, 0.0, upper);
    return law;
}

double heat_sgn(double x) { return std::erf(x); }

double heat_sgn_quadrature(double x, double t) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("heat_sgn_quadrature: need t > 0");
    }
    const double s = std::sqrt(t);
    auto kernel = [x, t, s](double y) {
        return std::exp(-(x - y) * (x - y) / (2.0 * t)) / (s * std::sqrt(2.0 * std::numbers::pi));
    };
    const double span = 40.0 * s;
    const double pos = x < span ? integrate(kernel, 0.0, x + span) : 1.0;
    const double neg = x > -span ? integrate(kernel, x - span, 0.0) : 1.0;
    return pos - neg;
}

double girsanov_density(const BrownianPath& path, double T) {
    if (!(T < 1.0)) {
        throw std::invalid_argument("girsanov_density: need T < 1");
    }
    if (path.dim() != 1) {
        throw std::invalid_argument("girsanov_density: path must be one-dimensional");
    }
    const auto& grid = path.grid();
    const std::size_t last = grid.index_of(T, 1e-12 * std::max(1.0, T));
    const auto w = path.component(0);
    double stochastic = 0.0;
    double quadratic = 0.0;
    for (std::size_t k = 0; k < last; ++k) {
        const double theta = 1.0 / (1.0 - grid[k]);
        stochastic += theta * (w[k + 1] - w[k]);
        quadratic += theta * theta * (grid[k + 1] - grid[k]);
    }
    return std::exp(-stochastic - 0.5 * quadratic);
}

double girsanov_reweighted_target(const TimeGrid& grid, double T) {
    if (!(T < 1.0)) {
        throw std::invalid_argument("girsanov_reweighted_target: need T < 1");
    }
    const std::size_t last = grid.index_of(T, 1e-12 * std::max(1.0, T));
    double sum = 0.0;
    for (std::size_t k = 0; k < last; ++k) {
        sum += (grid[k + 1] - grid[k]) / (1.0 - grid[k]);
    }
    return -sum;
}

double sign_corr_constant(double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) {
        throw std::invalid_argument("sign_corr_constant: need |rho| <= 1");
    }
    return 2.0 / std::numbers::pi * std::asin(rho);
}

double sign_corr_bruteforce(double rho, std::uint64_t n, std::uint64_t seed) {
    if (n == 0) {
        throw std::invalid_argument("sign_corr_bruteforce: need n >= 1");
    }
    const double tail = std::sqrt(1.0 - rho * rho);
    std::int64_t agree = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto index = static_cast<std::uint32_t>(i);
        const auto level = static_cast<std::uint32_t>(i >> 32);
        const double u = standard_normal({seed, 0, 0, level, index});
        const double v = rho * u + tail * standard_normal({seed, 0, 1, level, index});
        agree += sign_of(u) * sign_of(v);
    }
    return static_cast<double>(agree) / static_cast<double>(n);
}

} // namespace pbp
