#include <catch2/catch_amalgamated.hpp>

#include "pbp/brownian.hpp"
#include "pbp/rng.hpp"
#include "pbp/stats.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace pbp;
using Catch::Approx;

TEST_CASE("Philox4x32-10 known-answer vectors", "[rng]") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) == C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniform draws are open-interval and addressable", "[rng]") {
    for (std::uint32_t i = 0; i < 10000; ++i) {
        const double u = uniform_open({7, 1, 0, 0, i});
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
    CHECK(uniform_open({1, 2, 3, 4, 5}) == uniform_open({1, 2, 3, 4, 5}));
    CHECK(uniform_open({1, 2, 3, 4, 5}) != uniform_open({1, 3, 3, 4, 5}));
    CHECK(uniform_open({1, 2, 3, 4, 5}) != uniform_open({1ull << 32 | 1, 2, 3, 4, 5}));
}

TEST_CASE("normal quantile agrees with boost erfc_inv", "[rng]") {
    double worst = 0.0;
    for (int i = 1; i < 20000; ++i) {
        for (double p : {i / 20000.0, std::pow(10.0, -300.0 * i / 20000.0)}) {
            const double ref = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
            worst = std::max(worst, std::abs(normal_quantile(p) - ref) / std::max(1.0, std::abs(ref)));
        }
    }
    CHECK(worst < 1e-14);
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(std::isinf(normal_quantile(0.0)));
    CHECK(std::isnan(normal_quantile(1.5)));
}

TEST_CASE("time grids", "[brownian]") {
    SECTION("validation") {
        CHECK_THROWS_AS(TimeGrid({0.0}), std::invalid_argument);
        CHECK_THROWS_AS(TimeGrid({0.1, 0.5}), std::invalid_argument);
        CHECK_THROWS_AS(TimeGrid({0.0, 0.5, 0.5}), std::invalid_argument);
        CHECK_THROWS_AS(TimeGrid({0.0, 0.6, 0.5}), std::invalid_argument);
    }
    SECTION("uniform landmarks are exact nodes") {
        const auto g = TimeGrid::uniform(2.0, 10000);
        CHECK(g.size() == 20001);
        CHECK(g[g.index_of(0.5, 0.0)] == 0.5);
        CHECK(g[g.index_of(1.0, 0.0)] == 1.0);
        CHECK(g.t_end() == 2.0);
        CHECK_THROWS_AS(g.index_of(0.50005), std::out_of_range);
    }
    SECTION("graded grid respects the grading bound") {
        const double gamma = 0.5, delta = 1e-6;
        const auto g = TimeGrid::graded(2.0, 1000, 1.0, gamma, delta);
        const std::size_t k_stop = g.index_of(1.0 - delta);
        for (std::size_t k = 0; k < k_stop; ++k) {
            REQUIRE(g[k + 1] - g[k] <= gamma * (1.0 - g[k]) * (1.0 + 1e-9));
        }
        CHECK(g[k_stop + 1] == 1.0);
        CHECK(g.contains(1.5));
        CHECK(g.t_end() == 2.0);
    }
    SECTION("merged grid is the union") {
        const auto m = TimeGrid::merged(TimeGrid::uniform(1.0, 2), TimeGrid::uniform(1.0, 3));
        CHECK(m.size() == 5);
        CHECK(m.contains(1.0 / 3.0));
        CHECK(m.contains(0.5));
    }
}

TEST_CASE("generate", "[brownian]") {
    const auto grid = TimeGrid::uniform(1.0, 64);
    SECTION("starts at zero and is deterministic") {
        const auto a = generate(3, grid, 42, 0);
        const auto b = generate(3, grid, 42, 0);
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(a.value(c, 0) == 0.0);
        }
        std::ostringstream sa, sb;
        write_csv(sa, a);
        write_csv(sb, b);
        CHECK(sa.str() == sb.str());
        CHECK(a == b);
        CHECK_FALSE(a == generate(3, grid, 42, 1));
    }
    SECTION("B(1) has unit variance over 1e4 seeds") {
        const auto coarse = TimeGrid::uniform(1.0, 16);
        double sum = 0.0, sq = 0.0;
        const int n = 10000;
        for (int s = 0; s < n; ++s) {
            const double v = generate(1, coarse, s, 0).value(0, 16);
            sum += v;
            sq += v * v;
        }
        const double mean = sum / n;
        CHECK(std::abs((sq - n * mean * mean) / (n - 1) - 1.0) <= 0.03);
    }
    SECTION("B(t)/sqrt(t) passes KS against N(0,1)") {
        const auto coarse = TimeGrid::uniform(1.0, 4);
        std::vector<double> z;
        for (int s = 0; s < 10000; ++s) {
            z.push_back(generate(1, coarse, s, 5).value(0, 1) / std::sqrt(0.25));
        }
        const auto r = ks_test(z, [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); });
        CHECK(r.p_value > 0.01);
    }
}

TEST_CASE("midpoint refinement", "[brownian]") {
    const auto path = generate(2, TimeGrid::uniform(1.0, 100), 3, 1);
    const auto fine = refine_midpoints(path);
    CHECK(fine.grid().size() == 201);
    CHECK(fine.level() == 1);
    const auto back = restrict_to(fine, path.grid());
    CHECK(back.grid() == path.grid());
    for (std::size_t c = 0; c < 2; ++c) {
        CHECK(std::ranges::equal(back.component(c), path.component(c)));
    }
    CHECK(refine_midpoints(path) == fine);

    SECTION("midpoint law is the Brownian bridge: mean 0, variance h/4") {
        const double h = 1e-2;
        std::vector<double> dev;
        for (std::uint64_t s = 0; s < 1000; ++s) {
            const auto p = generate(1, TimeGrid::uniform(1.0, 100), s, 2);
            const auto f = refine_midpoints(p);
            for (std::size_t k = 0; k < 100; ++k) {
                dev.push_back(f.value(0, 2 * k + 1) - 0.5 * (p.value(0, k) + p.value(0, k + 1)));
            }
        }
        const auto ci = mean_ci(dev, 0.997);
        CHECK(std::abs(ci.mean) <= ci.half_width);
        double sq = 0.0;
        for (double d : dev) {
            sq += (d - ci.mean) * (d - ci.mean);
        }
        const double var = sq / static_cast<double>(dev.size() - 1);
        CHECK(var == Approx(h / 4.0).epsilon(0.03));
    }
}

TEST_CASE("increments", "[brownian]") {
    const auto path = generate(1, TimeGrid::uniform(1.0, 1000), 11, 0);
    CHECK(increment(path, 0, 0.3, 0.3) == 0.0);
    CHECK(increment(path, 0, 0.0, 0.7) == path.value(0, 700));
    double sum = 0.0;
    for (std::size_t k = 0; k < 1000; ++k) {
        sum += increment(path, 0, path.grid()[k], path.grid()[k + 1]);
    }
    CHECK(std::abs(sum - path.value(0, 1000)) <= 1e-12);
    CHECK_THROWS_AS(increment(path, 0, 0.5, 0.4), std::invalid_argument);
    CHECK_THROWS(increment(path, 0, 0.0, 0.00051));
}

TEST_CASE("negation, rescaling and export", "[brownian]") {
    const auto path = generate(2, TimeGrid::uniform(1.0, 8), 5, 0);
    const auto neg = negate(path);
    CHECK(neg.value(1, 3) == -path.value(1, 3));
    const auto sc = rescale(path, 0.25);
    CHECK(sc.grid().t_end() == 0.25);
    CHECK(sc.value(0, 8) == 0.5 * path.value(0, 8));
    CHECK_THROWS_AS(rescale(path, 0.0), std::invalid_argument);

    std::ostringstream os;
    write_csv(os, path);
    std::string header;
    std::istringstream is(os.str());
    std::getline(is, header);
    CHECK(header == "t,W1,W2");
    CHECK(format_full(0.1) == "0.10000000000000001");
}
