#include "pbp/constructor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pbp {

namespace {

int bridge_sign(const BrownianPath& B, double t_bridge) {
    const std::size_t k = B.grid().index_of(t_bridge, 1e-12 * std::max(1.0, t_bridge));
    const int s = sign_of(B.value(0, k));
    if (s == 0) {
        throw ConstructionRejected("sgn(B_1) tie: B_1(" + format_full(t_bridge) + ") == 0");
    }
    return s;
}

void require_dim(const BrownianPath& B, std::size_t dim, const char* who) {
    if (B.dim() != dim) {
        throw std::invalid_argument(std::string(who) + ": path has dimension " + std::to_string(B.dim()) +
                                    ", expected " + std::to_string(dim));
    }
}

double max_step(const TimeGrid& g) {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        m = std::max(m, g[k + 1] - g[k]);
    }
    return m;
}

} // namespace

SolutionPath build_strong_3d(const BrownianPath& B, const SchemeOptions& opts) {
    require_dim(B, 3, "build_strong_3d");
    const std::array<double, 3> x0{0.0, 0.0, 0.0};
    const std::array<int, 3> sel{0, 0, -1};
    auto sol = integrate(DriftField::sys3d(), B, x0, opts, sel);
    sol.set_construction(Construction::strong3d);
    return sol;
}

SolutionPath build_nonadapted_3d(const BrownianPath& B, const SchemeOptions& opts) {
    require_dim(B, 3, "build_nonadapted_3d");
    const int s = bridge_sign(B, 1.0);
    const std::array<double, 3> x0{0.0, 0.0, 0.0};
    const std::array<int, 3> sel{s, -s, 1};
    auto sol = integrate(DriftField::sys3d(), B, x0, opts, sel);
    sol.set_construction(Construction::nonadapted3d);
    return sol;
}

SolutionPath build_2d_pathbypath(const BrownianPath& B, const SchemeOptions& opts, const DriftField& drift) {
    require_dim(B, 2, "build_2d_pathbypath");
    if (drift.dim() != 2 || !drift.bridge_time()) {
        throw std::invalid_argument("build_2d_pathbypath: drift must be a 2-d system with a bridge time");
    }
    const int s = bridge_sign(B, *drift.bridge_time());
    const std::array<double, 2> x0{0.0, 0.0};
    const std::array<int, 2> sel{s, -s};
    auto sol = integrate(drift, B, x0, opts, sel);
    sol.set_construction(Construction::pbp2d);
    return sol;
}

double sup_distance(const SolutionPath& a, const SolutionPath& b) {
    if (a.dim() != b.dim() || !(a.grid() == b.grid())) {
        throw std::invalid_argument("sup_distance: solutions live on different grids");
    }
    double d = 0.0;
    for (std::size_t c = 0; c < a.dim(); ++c) {
        const auto x = a.component(c);
        const auto y = b.component(c);
        for (std::size_t k = 0; k < x.size(); ++k) {
            d = std::max(d, std::abs(x[k] - y[k]));
        }
    }
    return d;
}

double duplicate_distance(const BrownianPath& B, const SchemeOptions& opts) {
    return sup_distance(build_strong_3d(B, opts), build_nonadapted_3d(B, opts));
}

int ConstructionOutput::sign_b1(double t_bridge) const {
    return sign_of(path->value(0, path->grid().index_of(t_bridge, 1e-12 * std::max(1.0, t_bridge))));
}

int ConstructionOutput::sign_x2(std::size_t solution, double t) const { return sign_of(x2(solution, t)); }

double ConstructionOutput::x2(std::size_t solution, double t) const {
    return solutions.at(solution).value_at(1, t);
}

double ConstructionOutput::sup_distance() const {
    return solutions.size() < 2 ? 0.0 : pbp::sup_distance(solutions[0], solutions[1]);
}

std::vector<std::string> ConstructionOutput::branch_labels() const {
    std::vector<std::string> labels;
    labels.reserve(solutions.size());
    for (const auto& sol : solutions) {
        std::string label = to_string(sol.construction()) + "[";
        for (std::size_t j = 0; j < sol.sign_selection().size(); ++j) {
            const int s = sol.sign_selection()[j];
            label += (j ? "," : "") + std::string(s > 0 ? "+" : s < 0 ? "-" : "0");
        }
        labels.push_back(label + "]");
    }
    return labels;
}

ConstructionOutput duplicate_pair(std::shared_ptr<const BrownianPath> B, const SchemeOptions& opts) {
    if (!B) {
        throw std::invalid_argument("duplicate_pair: null path");
    }
    ConstructionOutput out;
    out.solutions.push_back(build_strong_3d(*B, opts));
    out.solutions.push_back(build_nonadapted_3d(*B, opts));
    out.path = std::move(B);
    return out;
}

std::vector<ProbeRow> probe_nosolution(const BrownianPath& B, std::span<const double> cutoffs,
                                       const ProbeOptions& opts) {
    require_dim(B, 1, "probe_nosolution");
    if (!(opts.step_exponent > 0.0)) {
        throw std::invalid_argument("probe_nosolution: step_exponent must be > 0");
    }
    std::vector<BrownianPath> levels{B};
    std::vector<ProbeRow> rows;
    rows.reserve(cutoffs.size());
    for (double eps : cutoffs) {
        if (!(eps > 0.0)) {
            throw std::invalid_argument("probe_nosolution: cutoffs must be > 0");
        }
        const double target = std::pow(eps, opts.step_exponent);
        std::size_t level = 0;
        while (max_step(levels[level].grid()) > target) {
            if (++level == levels.size()) {
                levels.push_back(refine_midpoints(levels.back()));
            }
        }
        const auto& path = levels[level];
        const auto& g = path.grid();
        const auto w = path.component(0);

        ProbeRow row;
        row.eps = eps;
        row.step = max_step(g);
        double x = 0.0;
        double near = 0.0;
        int last_sign = 0;
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
            const double dt = g[k + 1] - g[k];
            const double b = std::abs(x) > eps ? opts.coeff / x : 0.0;
            row.accumulated += std::abs(b) * dt;
            if (std::abs(x) <= 2.0 * eps) {
                near += dt;
            }
            x += b * dt + (w[k + 1] - w[k]);
            const int s = sign_of(x);
            if (s != 0) {
                row.sign_changes += last_sign != 0 && s != last_sign;
                last_sign = s;
            }
        }
        row.near_fraction = near / g.t_end();
        rows.push_back(row);
    }
    return rows;
}

} // namespace pbp
