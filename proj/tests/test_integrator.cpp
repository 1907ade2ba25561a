#include <catch2/catch_amalgamated.hpp>

#include "pbp/integrator.hpp"
#include "pbp/rng.hpp"
#include "pbp/stats.hpp"

#include <cmath>
#include <sstream>

using namespace pbp;
using Catch::Approx;

namespace {

const double kZero[1] = {0.0};
const int kPlus[1] = {1};
const int kMinus[1] = {-1};

SchemeOptions with_h(double h) {
    SchemeOptions o;
    o.h = h;
    return o;
}

} // namespace

TEST_CASE("implicit Bessel step", "[integrator]") {
    CHECK(bessel_implicit_step(0.0, 1.0, 1.0, 1) == 1.0);
    CHECK(bessel_implicit_step(1.0, 1e-300, 1.0, 1) == Approx(1.0));
    CHECK(bessel_implicit_step(0.0, 1.0, 1.0, -1) == -1.0);

    SECTION("root residual and requested sign over a wide parameter range") {
        for (std::uint32_t i = 0; i < 20000; ++i) {
            const double a = (uniform_open({1, 0, 0, 0, i}) - 0.5) * std::pow(10.0, 8.0 * uniform_open({1, 0, 1, 0, i}) - 4.0);
            const double h = std::pow(10.0, -8.0 * uniform_open({1, 0, 2, 0, i}));
            const double c = std::pow(10.0, 2.0 * uniform_open({1, 0, 3, 0, i}) - 1.0);
            for (int branch : {1, -1}) {
                const double x = bessel_implicit_step(a, h, c, branch);
                REQUIRE(branch * x > 0.0);
                REQUIRE(std::abs(x - a - c * h / x) <= 1e-12 * std::max(1.0, std::abs(x)));
            }
        }
    }
    SECTION("invalid arguments") {
        CHECK_THROWS_AS(bessel_implicit_step(0.0, 0.0, 1.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(bessel_implicit_step(0.0, 1.0, -1.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(bessel_implicit_step(0.0, 1.0, 1.0, 0), std::invalid_argument);
    }
}

TEST_CASE("scheme options and grids", "[integrator]") {
    SchemeOptions bad;
    bad.gamma = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SchemeOptions{};
    bad.h = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const SchemeOptions opts;
    const auto g = scheme_grid(DriftField::sys3d(), opts);
    CHECK(g.contains(0.5));
    CHECK(g.contains(1.0 - opts.delta_end));
    CHECK(g.contains(1.0));
    CHECK(g.t_end() == 2.0);
    CHECK(scheme_grid(DriftField::bessel(3), opts).size() == 10001);
}

TEST_CASE("zero drift reproduces x0 + W exactly", "[integrator]") {
    const auto path = generate(2, TimeGrid::uniform(1.0, 1000), 4, 0);
    const double x0[2] = {0.3, -1.7};
    const auto sol = integrate(DriftField::zero(2, 1.0), path, x0, SchemeOptions{});
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t k = 0; k < path.grid().size(); ++k) {
            REQUIRE(sol.value(c, k) == x0[c] + path.value(c, k));
        }
    }
}

TEST_CASE("Bessel(3) from 1 stays positive", "[integrator]") {
    const SchemeOptions opts = with_h(1e-3);
    const auto drift = DriftField::bessel(3);
    const double x0[1] = {1.0};
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto path = generate(1, scheme_grid(drift, opts), s, 0);
        const auto sol = integrate(drift, path, x0, opts, kPlus);
        const auto v = sol.component(0);
        REQUIRE(*std::min_element(v.begin(), v.end()) > 0.0);
    }
}

TEST_CASE("helper bridge: terminal value, pinning and positivity", "[integrator]") {
    const SchemeOptions opts;
    const auto drift = DriftField::helper_f();
    const auto grid = scheme_grid(drift, opts);
    const std::size_t late = grid.index_of(1.0 - opts.delta_end);
    std::size_t near_one = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto sol = integrate(drift, generate(1, grid, s, 1), kZero, opts, kPlus);
        near_one += std::abs(sol.value(0, late) - 1.0) <= 0.05;
        REQUIRE(sol.value(0, grid.size() - 1) == 1.0);
        REQUIRE(sol.pinned_nodes.size() == 1);
        const auto v = sol.component(0);
        REQUIRE(*std::min_element(v.begin() + 1, v.end()) > 0.0);
    }
    CHECK(near_one >= 990);
}

TEST_CASE("negative branch is the mirror image bit for bit", "[integrator]") {
    const SchemeOptions opts = with_h(1e-3);
    const auto drift = DriftField::helper_f();
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto path = generate(1, scheme_grid(drift, opts), s, 1);
        const auto neg = integrate(drift, path, kZero, opts, kMinus);
        const auto pos = integrate(drift, negate(path), kZero, opts, kPlus);
        for (std::size_t k = 0; k < path.grid().size(); ++k) {
            REQUIRE(neg.value(0, k) == -pos.value(0, k));
        }
    }
}

TEST_CASE("integration errors", "[integrator]") {
    const auto grid = TimeGrid::uniform(1.0, 100);
    SECTION("explicit singular step inside the guard band") {
        SchemeOptions opts;
        opts.implicit_singular = false;
        const double x0[1] = {1e-7};
        const auto path = generate(1, grid, 0, 0);
        CHECK_THROWS_AS(integrate(DriftField::bessel(3), path, x0, opts), SingularityError);
    }
    SECTION("non-finite noise reports the node") {
        std::vector<double> w(grid.size(), 0.0);
        w[37] = std::numeric_limits<double>::quiet_NaN();
        const BrownianPath path(grid, {w}, 0, 0, 0);
        try {
            integrate(DriftField::zero(1, 1.0), path, kZero, SchemeOptions{});
            FAIL("expected IntegrationError");
        } catch (const IntegrationError& e) {
            CHECK(e.node == 37);
        }
    }
    SECTION("input validation") {
        const auto path = generate(1, grid, 0, 0);
        const double x0[1] = {std::numeric_limits<double>::infinity()};
        CHECK_THROWS_AS(integrate(DriftField::zero(1, 1.0), path, x0, SchemeOptions{}), std::invalid_argument);
        CHECK_THROWS_AS(integrate(DriftField::zero(2, 1.0), path, kZero, SchemeOptions{}), std::invalid_argument);
        const int bad[1] = {2};
        CHECK_THROWS_AS(integrate(DriftField::zero(1, 1.0), path, kZero, SchemeOptions{}, bad), std::invalid_argument);
        CHECK_THROWS_AS(integrate_on(DriftField::zero(1, 1.0), path, TimeGrid::uniform(1.0, 300), kZero, SchemeOptions{}),
                        std::invalid_argument);
        const auto no_bridge = generate(1, TimeGrid({0.0, 0.3, 0.7, 1.0 - 1e-3, 1.0 + 1e-9}), 0, 0);
        CHECK_THROWS_AS(integrate(DriftField::helper_f(), no_bridge, kZero, SchemeOptions{}, kPlus), std::invalid_argument);
    }
}

TEST_CASE("integral-equation residual", "[integrator]") {
    const double h = 1e-3;
    const SchemeOptions opts = with_h(h);
    const auto zero = DriftField::zero(1, 1.0);

    SECTION("explicit Euler on its own grid telescopes to zero") {
        SchemeOptions explicit_opts = opts;
        explicit_opts.implicit_singular = false;
        const double x0[1] = {1.0};
        const auto bessel = DriftField::bessel(3);
        const auto path = generate(1, TimeGrid::uniform(1.0, 1000), 8, 0);
        const auto sol = integrate(bessel, path, x0, explicit_opts);
        CHECK(residual(sol, bessel, path, path, explicit_opts) <= 1e-12);
        CHECK(residual(integrate(zero, path, kZero, opts), zero, path, path, opts) <= 1e-14);
    }
    SECTION("zero drift against a refined path stays inside the Brownian modulus envelope") {
        std::vector<double> r;
        for (std::uint64_t s = 0; s < 200; ++s) {
            const auto path = generate(1, TimeGrid::uniform(1.0, 1000), s, 0);
            r.push_back(residual(integrate(zero, path, kZero, opts), zero, path, refine_midpoints(path), opts));
        }
        CHECK(median(r) <= 3.0 * std::sqrt(h * std::log(1.0 / h)));
    }
    SECTION("helper bridge residual decreases when h is halved") {
        const auto helper = DriftField::helper_f();
        std::size_t decreased = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto coarse = generate(1, scheme_grid(helper, opts), s, 1);
            const auto fine = refine_midpoints(coarse);
            const double r_coarse =
                residual(integrate(helper, coarse, kZero, opts, kPlus), helper, coarse, refine_midpoints(coarse), opts);
            const double r_fine =
                residual(integrate(helper, fine, kZero, opts, kPlus), helper, fine, refine_midpoints(fine), opts);
            decreased += r_fine < r_coarse;
        }
        CHECK(decreased >= 90);
    }
    SECTION("mismatched paths are rejected") {
        const auto path = generate(1, TimeGrid::uniform(1.0, 100), 1, 0);
        const auto sol = integrate(zero, path, kZero, opts);
        CHECK_THROWS_AS(residual(sol, zero, path, refine_midpoints(generate(1, path.grid(), 2, 0)), opts),
                        std::invalid_argument);
        const auto other = generate(1, TimeGrid::uniform(1.0, 30), 1, 0);
        CHECK_THROWS_AS(residual(sol, zero, other, refine_midpoints(other), opts), std::invalid_argument);
    }
}

TEST_CASE("solution export", "[integrator]") {
    const auto path = generate(2, TimeGrid::uniform(1.0, 4), 1, 0);
    const double x0[2] = {0.0, 0.0};
    const auto sol = integrate(DriftField::zero(2, 1.0), path, x0, SchemeOptions{});
    std::ostringstream os;
    write_csv(os, sol, &path);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,X1,X2,B1,B2");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
    }
    CHECK(rows == 5);
    CHECK(sol.value_at(1, 0.5) == path.value(1, 2));
    CHECK_THROWS_AS(sol.value_at(1, 0.6), std::out_of_range);
}
