#pragma once

#include "pbp/brownian.hpp"
#include "pbp/drift.hpp"

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbp {

struct SchemeOptions {
    double h = 1e-4;
    /// Steps near the bridge time satisfy step <= gamma * (t_bridge - t).
    double gamma = 0.5;
    /// Bridge pieces are integrated up to t_bridge - delta_end, then pinned.
    double delta_end = 1e-4;
    bool implicit_singular = true;
    /// Explicit 1/x evaluation closer than this to a pole aborts integration.
    double explicit_guard = 1e-6;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
    std::size_t steps_per_unit() const;
};

/// The grid the scheme would use for `drift`: graded towards the bridge time
/// when the drift has one, uniform otherwise.
TimeGrid scheme_grid(const DriftField& drift, const SchemeOptions& opts);

/// Raised when an explicit singular evaluation enters the guard band.
class SingularityError : public std::runtime_error {
public:
    SingularityError(std::size_t node, std::size_t component, double distance);
    std::size_t node;
    std::size_t component;
};

/// Raised on NaN or overflow during integration.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(std::size_t node, std::size_t component);
    std::size_t node;
    std::size_t component;
};

enum class Construction { generic, strong3d, nonadapted3d, pbp2d, bridge_pos, bridge_neg, probe };

std::string to_string(Construction c);

struct PinnedNode {
    double time;
    std::size_t component;
    double value;
};

struct Diagnostics {
    double residual = std::numeric_limits<double>::quiet_NaN();
    /// Per component: min |X_j - pole| over steps where a singular term was
    /// active; +inf when none was.
    std::vector<double> min_pole_distance;
    std::size_t implicit_steps = 0;
    std::size_t explicit_singular_steps = 0;
};

/// Candidate solution of X_t = x0 + int_0^t b(s, X_s) ds + W_t on a grid.
class SolutionPath {
public:
    SolutionPath(TimeGrid grid, std::vector<std::vector<double>> values, std::vector<double> x0,
                 std::vector<int> sign_selection, Construction construction);

    std::size_t dim() const noexcept { return values_.size(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> component(std::size_t c) const { return values_.at(c); }
    double value(std::size_t c, std::size_t node) const { return values_.at(c).at(node); }
    /// Value at grid time t; throws std::out_of_range when t is not a node.
    double value_at(std::size_t c, double t) const;

    const std::vector<double>& x0() const noexcept { return x0_; }
    /// Per component: -1/+1 when a branch was selected, 0 otherwise.
    const std::vector<int>& sign_selection() const noexcept { return sign_selection_; }
    Construction construction() const noexcept { return construction_; }
    void set_construction(Construction c) noexcept { construction_ = c; }

    std::vector<PinnedNode> pinned_nodes;
    Diagnostics diagnostics;

private:
    TimeGrid grid_;
    std::vector<std::vector<double>> values_;
    std::vector<double> x0_;
    std::vector<int> sign_selection_;
    Construction construction_;
};

/// Root of x = a + c*h/x on the side `branch` (+1 or -1), i.e.
/// branch * (branch*a + sqrt(a^2 + 4ch)) / 2, computed without cancellation.
double bessel_implicit_step(double a, double h, double c, int branch);

/// Integrates on the grid of `path`. `sign_selection` (empty, or one entry per
/// component, each -1/0/+1) fixes the sign region and implicit branch of the
/// selected components.
SolutionPath integrate(const DriftField& drift, const BrownianPath& path, std::span<const double> x0,
                       const SchemeOptions& opts, std::span<const int> sign_selection = {});

/// Integrates on `grid`, whose nodes must all be nodes of the path grid.
SolutionPath integrate_on(const DriftField& drift, const BrownianPath& path, const TimeGrid& grid,
                          std::span<const double> x0, const SchemeOptions& opts,
                          std::span<const int> sign_selection = {});

/// Max over eval-grid nodes of |X(t) - x0 - sum b(s_i, X(s_i)) ds_i - W(t)|,
/// with X linearly interpolated between solution nodes and W read from
/// `eval_path`. Intervals overlapping (t_bridge - delta_end, t_bridge] count
/// as exact and nodes inside that window are skipped.
/// `eval_path` must refine `path` (every node of `path` present with equal
/// values), and the solution grid must be a subset of the `path` grid.
double residual(const SolutionPath& sol, const DriftField& drift, const BrownianPath& path,
                const BrownianPath& eval_path, const SchemeOptions& opts);

/// `t,X1,...,Xd`, optionally followed by `B1,...,Bd` from `path`.
void write_csv(std::ostream& os, const SolutionPath& sol, const BrownianPath* path = nullptr);

} // namespace pbp
