#include "pbp/brownian.hpp"

#include "pbp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace pbp {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) {
        throw std::invalid_argument("TimeGrid: need at least two nodes");
    }
    if (nodes_.front() != 0.0) {
        throw std::invalid_argument("TimeGrid: first node must be 0");
    }
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
        if (!(nodes_[k] > nodes_[k - 1]) || !std::isfinite(nodes_[k])) {
            throw std::invalid_argument("TimeGrid: nodes not strictly increasing at index " +
                                        std::to_string(k));
        }
    }
}

TimeGrid TimeGrid::uniform(double t_end, std::size_t steps_per_unit) {
    if (steps_per_unit == 0 || !(t_end > 0.0)) {
        throw std::invalid_argument("TimeGrid::uniform: need t_end > 0 and steps_per_unit >= 1");
    }
    const auto n = static_cast<std::size_t>(std::llround(t_end * static_cast<double>(steps_per_unit)));
    std::vector<double> nodes(n + 1);
    const double per = static_cast<double>(steps_per_unit);
    for (std::size_t k = 0; k <= n; ++k) {
        nodes[k] = static_cast<double>(k) / per;
    }
    nodes.back() = t_end;
    return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::graded(double t_end, std::size_t steps_per_unit, double singular_time, double gamma,
                          double delta_end) {
    if (steps_per_unit == 0 || !(gamma > 0.0 && gamma <= 1.0) || !(delta_end > 0.0) ||
        !(singular_time > delta_end) || singular_time > t_end) {
        throw std::invalid_argument("TimeGrid::graded: invalid parameters");
    }
    const double per = static_cast<double>(steps_per_unit);
    const double h = 1.0 / per;
    const double stop = singular_time - delta_end;
    std::vector<double> nodes{0.0};

    std::size_t k = 1;
    for (;; ++k) {
        const double t = static_cast<double>(k) / per;
        const double prev = nodes.back();
        if (gamma * (singular_time - prev) < h || t >= stop) {
            break;
        }
        nodes.push_back(t);
    }
    for (;;) {
        const double prev = nodes.back();
        const double step = std::min(h, gamma * (singular_time - prev));
        const double next = prev + step;
        // Snap to the stop node instead of leaving a sliver interval.
        if (next >= stop - 1e-3 * step) {
            nodes.push_back(stop);
            break;
        }
        nodes.push_back(next);
    }
    nodes.push_back(singular_time);

    if (t_end > singular_time) {
        const auto first = static_cast<std::size_t>(std::floor(singular_time * per)) + 1;
        const auto last = static_cast<std::size_t>(std::llround(t_end * per));
        for (std::size_t j = first; j <= last; ++j) {
            const double t = static_cast<double>(j) / per;
            if (t > nodes.back() + 1e-3 * h) {
                nodes.push_back(t);
            }
        }
        if (nodes.back() < t_end - 1e-3 * h) {
            nodes.push_back(t_end);
        } else {
            nodes.back() = t_end;
        }
    }
    return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::merged(const TimeGrid& a, const TimeGrid& b, double merge_tol) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        double next;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j] + merge_tol)) {
            next = a[i];
            if (j < b.size() && std::abs(b[j] - a[i]) <= merge_tol) {
                ++j;
            }
            ++i;
        } else {
            next = b[j++];
        }
        if (out.empty() || next > out.back() + merge_tol) {
            out.push_back(next);
        }
    }
    return TimeGrid(std::move(out));
}

std::size_t TimeGrid::index_of(double t, double tol) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
    if (it == nodes_.end() || std::abs(*it - t) > tol) {
        throw std::out_of_range("TimeGrid: time " + format_full(t) + " is not a grid node");
    }
    return static_cast<std::size_t>(it - nodes_.begin());
}

bool TimeGrid::contains(double t, double tol) const noexcept {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
    return it != nodes_.end() && std::abs(*it - t) <= tol;
}

BrownianPath::BrownianPath(TimeGrid grid, std::vector<std::vector<double>> values, std::uint64_t seed,
                           std::uint32_t stream_id, std::uint32_t level)
    : grid_(std::move(grid)), values_(std::move(values)), seed_(seed), stream_id_(stream_id), level_(level) {
    if (values_.empty()) {
        throw std::invalid_argument("BrownianPath: dim must be >= 1");
    }
    for (const auto& v : values_) {
        if (v.size() != grid_.size()) {
            throw std::invalid_argument("BrownianPath: values not aligned with grid");
        }
    }
}

BrownianPath generate(std::size_t dim, const TimeGrid& grid, std::uint64_t seed, std::uint32_t stream_id) {
    if (dim == 0) {
        throw std::invalid_argument("generate: dim must be >= 1");
    }
    std::vector<std::vector<double>> values(dim, std::vector<double>(grid.size()));
    for (std::size_t c = 0; c < dim; ++c) {
        auto& w = values[c];
        w[0] = 0.0;
        DrawKey key{seed, stream_id, static_cast<std::uint32_t>(c), 0, 0};
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
            key.index = static_cast<std::uint32_t>(k);
            w[k + 1] = w[k] + std::sqrt(grid[k + 1] - grid[k]) * standard_normal(key);
        }
    }
    return BrownianPath(grid, std::move(values), seed, stream_id, 0);
}

BrownianPath refine_midpoints(const BrownianPath& path) {
    const auto& g = path.grid();
    const std::uint32_t level = path.level() + 1;
    std::vector<double> nodes(2 * g.size() - 1);
    for (std::size_t k = 0; k < g.size(); ++k) {
        nodes[2 * k] = g[k];
        if (k + 1 < g.size()) {
            nodes[2 * k + 1] = 0.5 * (g[k] + g[k + 1]);
        }
    }
    std::vector<std::vector<double>> values(path.dim(), std::vector<double>(nodes.size()));
    for (std::size_t c = 0; c < path.dim(); ++c) {
        const auto w = path.component(c);
        auto& out = values[c];
        DrawKey key{path.seed(), path.stream_id(), static_cast<std::uint32_t>(c), level, 0};
        for (std::size_t k = 0; k < g.size(); ++k) {
            out[2 * k] = w[k];
            if (k + 1 < g.size()) {
                key.index = static_cast<std::uint32_t>(k);
                const double h = g[k + 1] - g[k];
                out[2 * k + 1] = 0.5 * (w[k] + w[k + 1]) + 0.5 * std::sqrt(h) * standard_normal(key);
            }
        }
    }
    return BrownianPath(TimeGrid(std::move(nodes)), std::move(values), path.seed(), path.stream_id(), level);
}

BrownianPath restrict_to(const BrownianPath& path, const TimeGrid& coarse) {
    std::vector<std::size_t> idx(coarse.size());
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        idx[k] = path.grid().index_of(coarse[k]);
    }
    std::vector<std::vector<double>> values(path.dim(), std::vector<double>(coarse.size()));
    for (std::size_t c = 0; c < path.dim(); ++c) {
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            values[c][k] = path.value(c, idx[k]);
        }
    }
    return BrownianPath(coarse, std::move(values), path.seed(), path.stream_id(), path.level());
}

double increment(const BrownianPath& path, std::size_t component, double s, double t) {
    if (s > t) {
        throw std::invalid_argument("increment: need s <= t");
    }
    const auto& g = path.grid();
    return path.value(component, g.index_of(t)) - path.value(component, g.index_of(s));
}

BrownianPath negate(const BrownianPath& path) {
    std::vector<std::vector<double>> values(path.dim());
    for (std::size_t c = 0; c < path.dim(); ++c) {
        const auto w = path.component(c);
        values[c].resize(w.size());
        std::transform(w.begin(), w.end(), values[c].begin(), [](double v) { return -v; });
    }
    return BrownianPath(path.grid(), std::move(values), path.seed(), path.stream_id(), path.level());
}

BrownianPath rescale(const BrownianPath& path, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("rescale: lambda must be > 0");
    }
    const double root = std::sqrt(lambda);
    std::vector<double> nodes(path.grid().nodes().begin(), path.grid().nodes().end());
    for (auto& t : nodes) {
        t *= lambda;
    }
    std::vector<std::vector<double>> values(path.dim());
    for (std::size_t c = 0; c < path.dim(); ++c) {
        const auto w = path.component(c);
        values[c].resize(w.size());
        std::transform(w.begin(), w.end(), values[c].begin(), [root](double v) { return root * v; });
    }
    return BrownianPath(TimeGrid(std::move(nodes)), std::move(values), path.seed(), path.stream_id(),
                        path.level());
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const BrownianPath& path) {
    os << "t";
    for (std::size_t c = 0; c < path.dim(); ++c) {
        os << ",W" << (c + 1);
    }
    os << '\n';
    for (std::size_t k = 0; k < path.grid().size(); ++k) {
        os << format_full(path.grid()[k]);
        for (std::size_t c = 0; c < path.dim(); ++c) {
            os << ',' << format_full(path.value(c, k));
        }
        os << '\n';
    }
}

} // namespace pbp
