#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rdlab/errors.hpp"
#include "rdlab/grid.hpp"

#include <cmath>
#include <limits>

using namespace rdlab;

namespace {
const double pi = std::acos(-1.0);
}

TEST_CASE("grid construction validates its arguments") {
    CHECK_THROWS_AS(make_grid(0.0, 64, Bc::periodic), ConfigError);
    CHECK_THROWS_AS(make_grid(-1.0, 64, Bc::periodic), ConfigError);
    CHECK_THROWS_AS(make_grid(10.0, 15, Bc::periodic), ConfigError);
    CHECK_THROWS_AS(make_grid(10.0, 15, Bc::neumann), ConfigError);

    const Grid1D gp = make_grid(10.0, 100, Bc::periodic);
    CHECK(gp.dx == doctest::Approx(0.1).epsilon(1e-14));
    const Grid1D gn = make_grid(10.0, 101, Bc::neumann);
    CHECK(gn.dx == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(gn.x(100) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("central differences are second order on periodic grids") {
    auto err1 = [](int n) {
        const Grid1D g = make_grid(2.0 * pi, n, Bc::periodic);
        const Field f = sample(g, [](double x) { return std::sin(x); });
        const Field d = deriv1(f);
        double e = 0.0;
        for (int i = 0; i < g.n; ++i)
            e = std::max(e, std::abs(d[i] - std::cos(g.x(i))));
        return e;
    };
    auto err2 = [](int n) {
        const Grid1D g = make_grid(2.0 * pi, n, Bc::periodic);
        const Field f = sample(g, [](double x) { return std::sin(x); });
        const Field d = deriv2(f);
        double e = 0.0;
        for (int i = 0; i < g.n; ++i)
            e = std::max(e, std::abs(d[i] + std::sin(g.x(i))));
        return e;
    };
    CHECK(err1(128) / err1(256) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(err2(128) / err2(256) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("central differences are second order on Neumann grids") {
    // cos(pi x / L) has vanishing derivative at both ends, so the even
    // reflection used at the boundary rows is exact for it
    const double L = 3.0;
    auto err = [&](int n, bool second) {
        const Grid1D g = make_grid(L, n, Bc::neumann);
        const Field f = sample(g, [&](double x) { return std::cos(pi * x / L); });
        const Field d = second ? deriv2(f) : deriv1(f);
        double e = 0.0;
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            const double exact = second ? -(pi / L) * (pi / L) * std::cos(pi * x / L)
                                        : -(pi / L) * std::sin(pi * x / L);
            e = std::max(e, std::abs(d[i] - exact));
        }
        return e;
    };
    CHECK(err(129, false) / err(257, false) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(err(129, true) / err(257, true) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("deriv1 is exactly skew-symmetric for the periodic quadrature") {
    const Grid1D g = make_grid(7.0, 200, Bc::periodic);
    const Field f =
        sample(g, [&](double x) { return std::sin(2.0 * pi * x / 7.0) + 0.3 * std::cos(6.0 * pi * x / 7.0); });
    const Field h = sample(g, [&](double x) { return std::cos(4.0 * pi * x / 7.0) + 0.1; });
    const Field df = deriv1(f), dh = deriv1(h);
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < g.n; ++i) {
        s1 += df[i] * h[i];
        s2 += f[i] * dh[i];
    }
    CHECK(std::abs(s1 + s2) < 1e-12 * (1.0 + std::abs(s1)));
}

TEST_CASE("quadrature is exact where it should be") {
    SUBCASE("periodic Riemann sum kills pure modes") {
        const double L = 5.0;
        const Grid1D g = make_grid(L, 64, Bc::periodic);
        const Field f = sample(g, [&](double x) {
            return 2.0 + 0.7 * std::cos(2.0 * pi * x / L) - 1.3 * std::sin(8.0 * pi * x / L);
        });
        CHECK(integral(f) == doctest::Approx(2.0 * L).epsilon(1e-13));
    }
    SUBCASE("Neumann trapezoid is exact on linear functions") {
        const double L = 4.0;
        const Grid1D g = make_grid(L, 257, Bc::neumann);
        const Field f = sample(g, [](double x) { return 1.5 - 0.25 * x; });
        CHECK(integral(f) == doctest::Approx(1.5 * L - 0.125 * L * L).epsilon(1e-13));
    }
}

TEST_CASE("field helpers") {
    const Grid1D g = make_grid(1.0, 16, Bc::periodic);
    Field f = make_field(g, 2.5);
    CHECK(f.size() == 16);
    CHECK(max_val(f) == 2.5);
    CHECK(min_val(f) == 2.5);
    f[3] = -7.0;
    CHECK(min_val(f) == -7.0);
    CHECK(max_abs(f) == 7.0);
    CHECK(all_finite(f));
    f[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(all_finite(f));
}

TEST_CASE("weight chi snaps its center to the grid") {
    const Grid1D g = make_grid(10.0, 128, Bc::periodic);
    const WeightField w = weight_chi(g, 0.3, 3.1416);
    CHECK(max_val(w.chi) == 1.0);
    // the recorded center is a grid point and within dx/2 of the request
    CHECK(std::abs(w.x0 - 3.1416) <= 0.5 * g.dx + 1e-14);
    CHECK(std::abs(w.x0 / g.dx - std::round(w.x0 / g.dx)) < 1e-12);
    // sech profile against the recorded center
    for (int i = 0; i < g.n; i += 17) {
        const double arg = w.eps * (g.x(i) - w.x0);
        CHECK(w.chi[i] == doctest::Approx(1.0 / std::cosh(arg)).epsilon(1e-13));
    }
    const Field one = make_field(g, 1.0);
    CHECK(weighted_integral(one, w) == doctest::Approx(integral(w.chi)).epsilon(1e-13));
}

TEST_CASE("uniformly local norm semantics") {
    const double inf = std::numeric_limits<double>::infinity();
    const Grid1D g = make_grid(10.0, 100, Bc::periodic);

    SUBCASE("argument validation") {
        const Field f = make_field(g, 1.0);
        CHECK_THROWS_AS(ul_norm(f, 1.0, 0.0), ConfigError);
        CHECK_THROWS_AS(ul_norm(f, 1.0, -1.0), ConfigError);
        CHECK_THROWS_AS(ul_norm(f, 0.5, 1.0), ConfigError);
    }

    SUBCASE("p = infinity is the sup norm regardless of radius") {
        Field f = make_field(g, 0.0);
        f[42] = -3.0;
        CHECK(ul_norm(f, inf, 0.2).value == 3.0);
        CHECK(ul_norm(f, inf, 100.0).value == 3.0);
    }

    SUBCASE("windowed L1 of the constant field counts 2m+1 cells") {
        const Field f = make_field(g, 1.0);
        // radius 0.55, dx 0.1: m = 5, window holds 11 cells
        const UlNorm r = ul_norm(f, 1.0, 0.55);
        CHECK_FALSE(r.window_clamped);
        CHECK(r.value == doctest::Approx(1.1).epsilon(1e-13));
    }

    SUBCASE("radius beyond L/2 clamps to the whole circle") {
        const Field f = make_field(g, 1.0);
        const UlNorm r = ul_norm(f, 1.0, 7.0);
        CHECK(r.window_clamped);
        CHECK(r.value == doctest::Approx(10.0).epsilon(1e-13));
    }

    SUBCASE("an isolated spike is weighted by dx^(1/p)") {
        Field f = make_field(g, 0.0);
        f[17] = 3.0;
        CHECK(ul_norm(f, 1.0, 0.35).value == doctest::Approx(3.0 * g.dx).epsilon(1e-13));
        CHECK(ul_norm(f, 2.0, 0.35).value ==
              doctest::Approx(std::sqrt(9.0 * g.dx)).epsilon(1e-13));
    }

    SUBCASE("periodic windows wrap") {
        Field f = make_field(g, 0.0);
        f[0] = 1.0;
        f[99] = 1.0;
        // a window centered between them picks up both
        CHECK(ul_norm(f, 1.0, 0.15).value == doctest::Approx(2.0 * g.dx).epsilon(1e-13));
    }

    SUBCASE("Neumann windows clamp at the boundary instead of wrapping") {
        const Grid1D gn = make_grid(10.0, 101, Bc::neumann);
        Field f = make_field(gn, 0.0);
        f[0] = 1.0;
        f[100] = 1.0;
        const UlNorm r = ul_norm(f, 1.0, 0.15);
        CHECK(r.value == doctest::Approx(1.0 * gn.dx).epsilon(1e-13));
    }
}
