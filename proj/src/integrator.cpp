#include "pbp/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace pbp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double node_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

std::vector<std::size_t> embed(const TimeGrid& sub, const TimeGrid& super) {
    std::vector<std::size_t> idx(sub.size());
    std::size_t from = 0;
    for (std::size_t k = 0; k < sub.size(); ++k) {
        while (from < super.size() && super[from] < sub[k] - node_tol(sub[k])) {
            ++from;
        }
        if (from == super.size() || std::abs(super[from] - sub[k]) > node_tol(sub[k])) {
            throw std::invalid_argument("grid node " + format_full(sub[k]) + " is not a node of the path grid");
        }
        idx[k] = from;
    }
    return idx;
}

std::vector<int> checked_selection(std::span<const int> sel, std::size_t dim) {
    if (sel.empty()) {
        return std::vector<int>(dim, 0);
    }
    if (sel.size() != dim) {
        throw std::invalid_argument("sign_selection size must match drift dimension");
    }
    for (int s : sel) {
        if (s < -1 || s > 1) {
            throw std::invalid_argument("sign_selection entries must be -1, 0 or +1");
        }
    }
    return {sel.begin(), sel.end()};
}

} // namespace

void SchemeOptions::validate() const {
    if (!(h > 0.0) || !(delta_end > 0.0) || !(explicit_guard > 0.0)) {
        throw std::invalid_argument("SchemeOptions: h, delta_end and explicit_guard must be > 0");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("SchemeOptions: gamma must lie in (0, 1]");
    }
}

std::size_t SchemeOptions::steps_per_unit() const {
    validate();
    return static_cast<std::size_t>(std::llround(1.0 / h));
}

TimeGrid scheme_grid(const DriftField& drift, const SchemeOptions& opts) {
    const auto per = opts.steps_per_unit();
    if (const auto tb = drift.bridge_time()) {
        // Rescaled drifts keep the same number of steps per bridge interval.
        const double scale = *tb;
        const auto scaled_per = static_cast<std::size_t>(std::llround(static_cast<double>(per) / scale));
        return TimeGrid::graded(drift.t_end(), scaled_per, *tb, opts.gamma, opts.delta_end * scale);
    }
    return TimeGrid::uniform(drift.t_end(), per);
}

SingularityError::SingularityError(std::size_t node_, std::size_t component_, double distance)
    : std::runtime_error("explicit singular evaluation inside guard band at node " + std::to_string(node_) +
                         ", component " + std::to_string(component_) + " (distance " + format_full(distance) +
                         ")"),
      node(node_), component(component_) {}

IntegrationError::IntegrationError(std::size_t node_, std::size_t component_)
    : std::runtime_error("non-finite value at node " + std::to_string(node_) + ", component " +
                         std::to_string(component_)),
      node(node_), component(component_) {}

std::string to_string(Construction c) {
    switch (c) {
    case Construction::generic: return "generic";
    case Construction::strong3d: return "strong3d";
    case Construction::nonadapted3d: return "nonadapted3d";
    case Construction::pbp2d: return "pbp2d";
    case Construction::bridge_pos: return "bridge+";
    case Construction::bridge_neg: return "bridge-";
    case Construction::probe: return "probe";
    }
    return "unknown";
}

SolutionPath::SolutionPath(TimeGrid grid, std::vector<std::vector<double>> values, std::vector<double> x0,
                           std::vector<int> sign_selection, Construction construction)
    : grid_(std::move(grid)), values_(std::move(values)), x0_(std::move(x0)),
      sign_selection_(std::move(sign_selection)), construction_(construction) {
    for (const auto& v : values_) {
        if (v.size() != grid_.size()) {
            throw std::invalid_argument("SolutionPath: values not aligned with grid");
        }
    }
}

double SolutionPath::value_at(std::size_t c, double t) const {
    return value(c, grid_.index_of(t, node_tol(t)));
}

double bessel_implicit_step(double a, double h, double c, int branch) {
    if (!(h > 0.0) || !(c > 0.0) || (branch != 1 && branch != -1)) {
        throw std::invalid_argument("bessel_implicit_step: need h > 0, c > 0, branch = +-1");
    }
    const double ab = branch * a;
    const double ch = c * h;
    const double disc = std::sqrt(ab * ab + 4.0 * ch);
    const double y = ab >= 0.0 ? 0.5 * (ab + disc) : 2.0 * ch / (disc - ab);
    return branch * y;
}

SolutionPath integrate(const DriftField& drift, const BrownianPath& path, std::span<const double> x0,
                       const SchemeOptions& opts, std::span<const int> sign_selection) {
    return integrate_on(drift, path, path.grid(), x0, opts, sign_selection);
}

SolutionPath integrate_on(const DriftField& drift, const BrownianPath& path, const TimeGrid& grid,
                          std::span<const double> x0, const SchemeOptions& opts, std::span<const int> sign_selection) {
    opts.validate();
    const std::size_t d = drift.dim();
    if (path.dim() != d || x0.size() != d) {
        throw std::invalid_argument("integrate: drift, path and x0 dimensions differ");
    }
    for (double v : x0) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("integrate: x0 must be finite");
        }
    }
    if (grid.t_end() > drift.t_end() + node_tol(drift.t_end())) {
        throw std::invalid_argument("integrate: grid extends beyond the drift time domain");
    }
    const auto sel = checked_selection(sign_selection, d);
    const auto idx = embed(grid, path.grid());
    const std::size_t n = grid.size();

    std::size_t bridge_node = n;
    if (const auto tb = drift.bridge_time(); tb && *tb <= grid.t_end() + node_tol(*tb)) {
        if (!grid.contains(*tb, node_tol(*tb))) {
            throw std::invalid_argument("integrate: grid must contain the bridge time " + format_full(*tb));
        }
        bridge_node = grid.index_of(*tb, node_tol(*tb));
    }
    const double magnitude = drift.bridge_magnitude();

    std::vector<std::vector<double>> values(d, std::vector<double>(n));
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> next(d);
    std::vector<double> drift_part(d, 0.0);
    std::vector<int> signs(d);
    Diagnostics diag;
    diag.min_pole_distance.assign(d, kInf);
    std::vector<PinnedNode> pinned;

    for (std::size_t j = 0; j < d; ++j) {
        values[j][0] = x[j];
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double t = grid[k];
        const double dt = grid[k + 1] - t;
        for (std::size_t j = 0; j < d; ++j) {
            signs[j] = sel[j] != 0 ? sel[j] : sign_of(x[j]);
        }
        for (std::size_t j = 0; j < d; ++j) {
            const auto w = path.component(j);
            const double w_next = w[idx[k + 1]];
            const double dw = w_next - w[idx[k]];
            const auto terms = drift.terms(t, x, signs, j, true);
            double xn;
            if (k + 1 == bridge_node && terms.bridge) {
                int s = signs[j];
                if (s == 0) {
                    s = sign_of(x[j] + dw) != 0 ? sign_of(x[j] + dw) : 1;
                }
                xn = s * magnitude;
                pinned.push_back({grid[k + 1], j, xn});
                drift_part[j] = xn - x0[j] - w_next;
            } else if (terms.singular) {
                const double c = terms.singular->coeff;
                const double pole = terms.singular->pole;
                const double predictor = x[j] + dt * terms.regular + dw;
                if (opts.implicit_singular && c > 0.0) {
                    int branch = sel[j];
                    if (branch == 0) {
                        branch = sign_of(predictor - pole);
                    }
                    if (branch == 0) {
                        branch = sign_of(x[j] - pole) != 0 ? sign_of(x[j] - pole) : 1;
                    }
                    const double y = bessel_implicit_step(predictor - pole, dt, c, branch);
                    xn = pole + y;
                    diag.min_pole_distance[j] = std::min(diag.min_pole_distance[j], std::abs(y));
                    ++diag.implicit_steps;
                } else {
                    const double dist = x[j] - pole;
                    if (dist == 0.0) {
                        xn = predictor;
                    } else {
                        if (std::abs(dist) < opts.explicit_guard) {
                            throw SingularityError(k, j, std::abs(dist));
                        }
                        xn = predictor + dt * c / dist;
                        diag.min_pole_distance[j] = std::min(diag.min_pole_distance[j], std::abs(dist));
                    }
                    ++diag.explicit_singular_steps;
                }
                drift_part[j] = xn - x0[j] - w_next;
            } else {
                drift_part[j] += dt * terms.regular;
                xn = x0[j] + w_next + drift_part[j];
            }
            if (!std::isfinite(xn)) {
                throw IntegrationError(k + 1, j);
            }
            next[j] = xn;
        }
        x.swap(next);
        for (std::size_t j = 0; j < d; ++j) {
            values[j][k + 1] = x[j];
        }
    }

    SolutionPath sol(grid, std::move(values), {x0.begin(), x0.end()}, sel, Construction::generic);
    sol.pinned_nodes = std::move(pinned);
    sol.diagnostics = std::move(diag);
    return sol;
}

double residual(const SolutionPath& sol, const DriftField& drift, const BrownianPath& path,
                const BrownianPath& eval_path, const SchemeOptions& opts) {
    const std::size_t d = sol.dim();
    if (drift.dim() != d || path.dim() != d || eval_path.dim() != d) {
        throw std::invalid_argument("residual: dimension mismatch");
    }
    const auto& eg = eval_path.grid();
    const auto coarse = embed(path.grid(), eg);
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            if (path.value(c, k) != eval_path.value(c, coarse[k])) {
                throw std::invalid_argument("residual: eval_path does not refine path");
            }
        }
    }
    const auto& sg = sol.grid();
    const auto sol_idx = embed(sg, eg);
    embed(sg, path.grid());

    // Linear interpolation of X onto every eval node up to the solution's end.
    const std::size_t m = sol_idx.back() + 1;
    std::vector<std::vector<double>> xs(d, std::vector<double>(m));
    for (std::size_t k = 0; k + 1 < sg.size(); ++k) {
        const double t0 = sg[k], t1 = sg[k + 1];
        for (std::size_t e = sol_idx[k]; e <= sol_idx[k + 1]; ++e) {
            const double w = (eg[e] - t0) / (t1 - t0);
            for (std::size_t c = 0; c < d; ++c) {
                const double a = sol.value(c, k), b = sol.value(c, k + 1);
                xs[c][e] = e == sol_idx[k + 1] ? b : a + w * (b - a);
            }
        }
    }

    const auto tb = drift.bridge_time();
    const double window_lo = tb ? *tb - opts.delta_end * *tb : kInf;
    const double window_hi = tb ? *tb : kInf;
    auto in_window = [&](double t) { return t > window_lo + node_tol(window_lo) && t <= window_hi; };

    const auto& sel = sol.sign_selection();
    std::vector<double> integral(d, 0.0);
    std::vector<double> x(d);
    std::vector<int> signs(d);
    double worst = 0.0;
    for (std::size_t e = 0; e + 1 < m; ++e) {
        const double t = eg[e];
        const double ds = eg[e + 1] - t;
        const bool window_interval = tb && eg[e + 1] > window_lo + node_tol(window_lo) && t < window_hi;
        for (std::size_t c = 0; c < d; ++c) {
            x[c] = xs[c][e];
            signs[c] = sel[c] != 0 ? sel[c] : sign_of(x[c]);
        }
        for (std::size_t c = 0; c < d; ++c) {
            const auto w = eval_path.component(c);
            if (window_interval) {
                integral[c] += (xs[c][e + 1] - xs[c][e]) - (w[e + 1] - w[e]);
            } else {
                integral[c] += ds * DriftField::value_of(drift.terms(t, x, signs, c, true), x[c]);
            }
        }
        if (in_window(eg[e + 1])) {
            continue;
        }
        for (std::size_t c = 0; c < d; ++c) {
            const double r = xs[c][e + 1] - sol.x0()[c] - integral[c] - eval_path.value(c, e + 1);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

void write_csv(std::ostream& os, const SolutionPath& sol, const BrownianPath* path) {
    std::vector<std::size_t> idx;
    if (path != nullptr) {
        if (path->dim() != sol.dim()) {
            throw std::invalid_argument("write_csv: path dimension mismatch");
        }
        idx = embed(sol.grid(), path->grid());
    }
    os << "t";
    for (std::size_t c = 0; c < sol.dim(); ++c) {
        os << ",X" << (c + 1);
    }
    if (path != nullptr) {
        for (std::size_t c = 0; c < sol.dim(); ++c) {
            os << ",B" << (c + 1);
        }
    }
    os << '\n';
    for (std::size_t k = 0; k < sol.grid().size(); ++k) {
        os << format_full(sol.grid()[k]);
        for (std::size_t c = 0; c < sol.dim(); ++c) {
            os << ',' << format_full(sol.value(c, k));
        }
        if (path != nullptr) {
            for (std::size_t c = 0; c < sol.dim(); ++c) {
                os << ',' << format_full(path->value(c, idx[k]));
            }
        }
        os << '\n';
    }
}

} // namespace pbp
