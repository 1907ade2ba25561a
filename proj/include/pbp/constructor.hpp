#pragma once

#include "pbp/brownian.hpp"
#include "pbp/drift.hpp"
#include "pbp/integrator.hpp"

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbp {

/// The construction needs sgn(B_1) at the bridge time and it is exactly 0.
class ConstructionRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adapted solution of the 3-d system: X_3 is the negative bridge continued
/// as a negative Bessel(3) process, which switches the first two drift
/// components off so X_1 = B_1 and X_2 = B_2.
SolutionPath build_strong_3d(const BrownianPath& B, const SchemeOptions& opts);

/// Non-adapted solution of the 3-d system: X_3 is the positive bridge, and
/// X_2 is the bridge with sign -sgn(B_1(1)), which depends on the future of B_1.
SolutionPath build_nonadapted_3d(const BrownianPath& B, const SchemeOptions& opts);

/// Solution of the 2-d system selected by sgn(B_1(1)). `drift` may be any
/// rescaled block of the 2-d system; its bridge time replaces 1.
SolutionPath build_2d_pathbypath(const BrownianPath& B, const SchemeOptions& opts,
                                 const DriftField& drift = DriftField::sys2d());

/// Sup over grid nodes of the max-norm distance; the grids must agree.
double sup_distance(const SolutionPath& a, const SolutionPath& b);

/// Distance between the strong and non-adapted 3-d solutions driven by B.
double duplicate_distance(const BrownianPath& B, const SchemeOptions& opts);

/// Solutions sharing one Brownian path, with features read from the stored paths.
struct ConstructionOutput {
    std::shared_ptr<const BrownianPath> path;
    std::vector<SolutionPath> solutions;

    /// sgn(B_1(t_bridge)); t_bridge = 1 unless given.
    int sign_b1(double t_bridge = 1.0) const;
    int sign_x2(std::size_t solution, double t) const;
    double x2(std::size_t solution, double t) const;
    /// Distance between the first two solutions; 0 with a single solution.
    double sup_distance() const;
    std::vector<std::string> branch_labels() const;
};

/// Strong and non-adapted 3-d solutions on one path.
ConstructionOutput duplicate_pair(std::shared_ptr<const BrownianPath> B, const SchemeOptions& opts);

/// One row of the no-solution probe.
struct ProbeRow {
    double eps = 0.0;
    double step = 0.0;
    /// sum |b(X_k)| dt_k
    double accumulated = 0.0;
    /// Fraction of time with |X| <= 2 eps.
    double near_fraction = 0.0;
    std::size_t sign_changes = 0;
};

struct ProbeOptions {
    /// Drift coeff / x gated to |x| > eps; -1/2 is the no-solution drift,
    /// +1/2 the Bessel(2) control.
    double coeff = -0.5;
    /// The path is midpoint-refined until its step is at most eps^step_exponent.
    double step_exponent = 1.5;
};

/// Explicit Euler for the regularized drift coeff/x 1{|x| > eps}, x0 = 0, for
/// each cutoff. `B` is one-dimensional on a uniform grid.
std::vector<ProbeRow> probe_nosolution(const BrownianPath& B, std::span<const double> cutoffs,
                                       const ProbeOptions& opts = {});

} // namespace pbp
