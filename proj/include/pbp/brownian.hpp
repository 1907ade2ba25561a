#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pbp {

/// Strictly increasing time nodes starting at 0.
class TimeGrid {
public:
    /// Validates and adopts `nodes`; throws std::invalid_argument on a
    /// non-monotone grid, a grid not starting at 0, or fewer than two nodes.
    explicit TimeGrid(std::vector<double> nodes);

    /// `steps_per_unit` equal steps per unit time on [0, t_end]; node k is
    /// k / steps_per_unit so dyadic and decimal landmarks (1/2, 1, 2) are exact.
    static TimeGrid uniform(double t_end, std::size_t steps_per_unit);

    /// Uniform base step h = 1/steps_per_unit, graded towards `singular_time`
    /// so that each step is at most gamma * (singular_time - t). Stops at
    /// singular_time - delta_end, then places singular_time itself, then
    /// continues uniformly to t_end.
    static TimeGrid graded(double t_end, std::size_t steps_per_unit, double singular_time,
                           double gamma, double delta_end);

    /// Union of two grids; nodes closer than `merge_tol` collapse onto the
    /// node from `a`.
    static TimeGrid merged(const TimeGrid& a, const TimeGrid& b, double merge_tol = 1e-12);

    std::size_t size() const noexcept { return nodes_.size(); }
    double operator[](std::size_t k) const noexcept { return nodes_[k]; }
    double t_end() const noexcept { return nodes_.back(); }
    std::span<const double> nodes() const noexcept { return nodes_; }

    /// Index of the node equal to t within `tol`; throws std::out_of_range.
    std::size_t index_of(double t, double tol = 1e-12) const;
    bool contains(double t, double tol = 1e-12) const noexcept;

    bool operator==(const TimeGrid&) const = default;

private:
    std::vector<double> nodes_;
};

/// A multi-component Brownian trajectory sampled on a TimeGrid.
///
/// Values are a pure function of (seed, stream_id, grid, refinement level):
/// each increment is drawn from the counter-based field keyed by
/// (seed, stream_id, component, level, interval index).
class BrownianPath {
public:
    BrownianPath(TimeGrid grid, std::vector<std::vector<double>> values, std::uint64_t seed,
                 std::uint32_t stream_id, std::uint32_t level);

    std::size_t dim() const noexcept { return values_.size(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint32_t stream_id() const noexcept { return stream_id_; }
    std::uint32_t level() const noexcept { return level_; }

    std::span<const double> component(std::size_t c) const { return values_.at(c); }
    double value(std::size_t c, std::size_t node) const { return values_.at(c).at(node); }

    bool operator==(const BrownianPath&) const = default;

private:
    TimeGrid grid_;
    std::vector<std::vector<double>> values_;
    std::uint64_t seed_;
    std::uint32_t stream_id_;
    std::uint32_t level_;
};

BrownianPath generate(std::size_t dim, const TimeGrid& grid, std::uint64_t seed, std::uint32_t stream_id);

/// Inserts the midpoint of every interval, drawn from the Brownian-bridge law
/// given the two neighbours (mean = their average, variance = h/4).
BrownianPath refine_midpoints(const BrownianPath& path);

/// Values at the nodes of `coarse`, which must be a subset of the path grid.
BrownianPath restrict_to(const BrownianPath& path, const TimeGrid& coarse);

/// W(t) - W(s) for grid nodes s <= t.
double increment(const BrownianPath& path, std::size_t component, double s, double t);

/// -W on the same grid.
BrownianPath negate(const BrownianPath& path);

/// Brownian scaling: t -> lambda * t, W -> sqrt(lambda) * W(t / lambda).
BrownianPath rescale(const BrownianPath& path, double lambda);

/// `t,W1,...,Wd` with 17 significant digits.
void write_csv(std::ostream& os, const BrownianPath& path);

/// Formats a double with 17 significant digits.
std::string format_full(double v);

} // namespace pbp
