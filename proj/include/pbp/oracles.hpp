#pragma once

#include "pbp/brownian.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace pbp {

/// A one-dimensional law with an exact cdf and an independent sampler.
struct MarginalLaw {
    std::string description;
    std::function<double(double)> cdf;
    /// Draw number `index` from stream `stream` of `seed`.
    std::function<double(std::uint64_t seed, std::uint32_t stream, std::uint32_t index)> sample;
    double mean = 0.0;
};

/// Time-t marginal of the 3-dimensional Bessel bridge from 0 to 1 on [0, 1]:
/// the law of |Z| with Z ~ N(t e, t(1-t) I_3), |e| = 1. Throws
/// std::invalid_argument unless 0 < t < 1.
MarginalLaw bes3_bridge_marginal(double t);

/// Radial density of the law above.
double bes3_bridge_density(double t, double r);

/// [P_{1/2} sgn](x) = erf(x).
double heat_sgn(double x);

/// The same quantity by Gauss-Kronrod quadrature of sgn against the heat
/// kernel of variance t, used to validate heat_sgn.
double heat_sgn_quadrature(double x, double t = 0.5);

/// exp(-sum theta_k dB_k - 1/2 sum theta_k^2 dt_k), theta(t) = 1/(1-t), over
/// the grid intervals of the first component of `path` up to T. T must be a
/// grid node with T < 1.
double girsanov_density(const BrownianPath& path, double T);

/// -sum theta(t_k) dt_k up to T: the mean of B(T) under the reweighted measure.
double girsanov_reweighted_target(const TimeGrid& grid, double T);

/// (2/pi) asin(rho): E[sgn U sgn V] for a standard bivariate normal pair with
/// correlation rho.
double sign_corr_constant(double rho = 0.70710678118654752440);

/// Monte Carlo estimate of the same expectation from `n` pairs.
double sign_corr_bruteforce(double rho, std::uint64_t n, std::uint64_t seed);

} // namespace pbp
