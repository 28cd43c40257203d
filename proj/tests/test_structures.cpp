#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rdlab/dynamics.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/fit.hpp"
#include "rdlab/profiles.hpp"
#include "rdlab/structures.hpp"

#include <cmath>
#include <vector>

using namespace rdlab;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        t[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    return t;
}

Trajectory short_run(const Params& p, std::uint64_t seed, double horizon = 2.0,
                     int snaps = 21) {
    const Grid1D g = make_grid(40.0, 512, Bc::periodic);
    const State s0 = random_smooth(g, seed, 1.0, 0.05, 8);
    return simulate_rd(s0, p, linspace(0.0, horizon, snaps));
}

} // namespace

TEST_CASE("gamma_max has the closed-form roots of its quadratic conditions") {
    // symmetric coefficients: both conditions reduce to (2-g)(1-g) >= 1,
    // largest root (3 - sqrt 5)/2
    const Params ps{1.0, 1.0, 1.0, {}};
    CHECK(gamma_max_bisect(ps, 2.0, 2.0) ==
          doctest::Approx(0.5 * (3.0 - std::sqrt(5.0))).epsilon(1e-9));

    // a=1, b=2: the B-condition (8-g)(1-g) >= 4 binds first,
    // largest admissible g = (9 - sqrt 65)/2
    const Params pu{1.0, 2.0, 1.0, {}};
    CHECK(gamma_max_bisect(pu, 3.0, 4.0) ==
          doctest::Approx(0.5 * (9.0 - std::sqrt(65.0))).epsilon(1e-9));

    CHECK_THROWS_AS(gamma_max_bisect(ps, 0.0, 2.0), StructureParamError);
}

TEST_CASE("default structure parameters") {
    const Params p{1.0, 2.0, 4.0, {}};
    const StructureParams sp = default_structure_params(p);
    CHECK(sp.alpha == doctest::Approx((p.a + p.b) / p.k).epsilon(1e-15));
    CHECK(sp.beta == doctest::Approx(2.0 * p.b / p.k).epsilon(1e-15));
    const double gm = gamma_max_bisect(p, sp.alpha, sp.beta);
    CHECK(gm > 0.0);
    CHECK(sp.gamma == doctest::Approx(0.9 * gm).epsilon(1e-12));
    CHECK(sp.theta == 0.0);
}

TEST_CASE("the unscaled alphabet is infeasible at large k") {
    // alpha = a+b, beta = 2b without the 1/k rescaling: at k = 100 the Young
    // condition (a + k alpha - k beta/2)^2 < 4 k a alpha fails outright
    const Params p{1.0, 2.0, 100.0, {}};
    CHECK(gamma_max_bisect(p, 3.0, 4.0) == 0.0);

    const Grid1D g = make_grid(10.0, 64, Bc::periodic);
    const State s = constant_pair(g, 1.0, 1.0);
    StructureParams bad;
    bad.alpha = 3.0;
    bad.beta = 4.0;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(eds_secondary(s, p, bad), StructureParamError);

    // the rescaled default is feasible at the same k
    CHECK_NOTHROW(default_structure_params(p));
}

TEST_CASE("boltzmann triple on homogeneous states") {
    const Params p{1.0, 2.0, 1.7, {}};
    const Grid1D g = make_grid(10.0, 64, Bc::periodic);

    SUBCASE("(u,v) = (1,2) gives the closed-form entropy production") {
        const State s = constant_pair(g, 1.0, 2.0);
        const EDSField b = eds_boltzmann(s, p);
        for (int i = 0; i < g.n; ++i) {
            CHECK(b.e[i] == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-14));
            CHECK(b.f[i] == 0.0);
            // d = k (2 ln v - ln u)(v^2 - u) = 3 k ln 4
            CHECK(b.d[i] == doctest::Approx(3.0 * p.k * std::log(4.0)).epsilon(1e-14));
        }
        CHECK(b.floored_points == 0);
    }

    SUBCASE("equilibrium states have zero entropy production") {
        const State s = constant_pair(g, 2.25, 1.5);
        const EDSField b = eds_boltzmann(s, p);
        for (int i = 0; i < g.n; ++i)
            CHECK(std::abs(b.d[i]) < 1e-14);
    }

    SUBCASE("nonpositive concentrations are out of domain") {
        State s = constant_pair(g, 1.0, 1.0);
        s.v[3] = 0.0;
        CHECK_THROWS_AS(eds_boltzmann(s, p), DomainError);
    }

    SUBCASE("tiny concentrations are floored and counted") {
        State s = constant_pair(g, 1.0, 1.0);
        s.u[5] = 1e-14;
        const EDSField b = eds_boltzmann(s, p);
        CHECK(b.floored_points == 1);
        CHECK(all_finite(b.d));
    }
}

TEST_CASE("theta = 0 reduces the augmented triples to the plain ones") {
    const Params p{1.0, 2.0, 1.0, {}};
    const Grid1D g = make_grid(20.0, 128, Bc::periodic);
    const State s = random_smooth(g, 3u);
    StructureParams sp = default_structure_params(p);
    sp.theta = 0.0;
    sp.theta_c = 0.0;

    const EDSField prim = eds_primary(s, p);
    const EDSField sec = eds_secondary(s, p, sp);
    const auto [t1, t2] = eds_theta(s, p, sp);

    for (int i = 0; i < g.n; ++i) {
        CHECK(t1.e[i] == prim.e[i]);
        CHECK(t1.f[i] == prim.f[i]);
        CHECK(t1.d[i] == prim.d[i]);
        CHECK(t2.e[i] == sec.e[i]);
        CHECK(t2.f[i] == sec.f[i]);
        CHECK(t2.d[i] == sec.d[i]);
    }
    CHECK(t1.kind == EdsKind::theta_first);
    CHECK(t2.kind == EdsKind::theta_second);
}

TEST_CASE("theta calibration") {
    const Params p{1.0, 2.0, 1.0, {}};
    StructureParams sp = default_structure_params(p);

    const StructureParams c1 = calibrate_theta(p, sp, 20260816ull);
    CHECK(c1.theta > 0.0);
    CHECK(c1.theta_c > 0.0);

    const StructureParams c2 = calibrate_theta(p, sp, 20260816ull);
    CHECK(c1.theta == c2.theta);
    CHECK(c1.theta_c == c2.theta_c);

    // a grossly oversized theta breaks the dissipation coercivity pointwise
    // once the a != b cross terms dominate
    const Grid1D g = make_grid(20.0, 128, Bc::periodic);
    const State s = random_smooth(g, 11u);
    StructureParams huge = c1;
    huge.theta = 1e6;
    CHECK_THROWS_AS(eds_theta(s, p, huge), StructureParamError);
}

TEST_CASE("dissipation lower bound is pointwise nonnegative at the default gamma") {
    const Params p{1.0, 2.0, 1.0, {}};
    const StructureParams sp = default_structure_params(p);
    const Grid1D g = make_grid(20.0, 256, Bc::periodic);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        const State s = random_smooth(g, seed, 2.0, 0.01, 10);
        const DposReport rep = dpos_check(s, p, sp);
        CHECK(rep.min_margin > -1e-12);
        CHECK(rep.gamma_used == sp.gamma);
        CHECK(rep.gamma_max > rep.gamma_used);
    }
}

TEST_CASE("rdnm triple with base orders reproduces the primary triple") {
    Params p{1.0, 2.0, 1.0, {}}; // orders unset: n=1, m=2
    const Grid1D g = make_grid(20.0, 128, Bc::periodic);
    const State s = random_smooth(g, 17u);
    const EDSField prim = eds_primary(s, p);
    const EDSField nm = eds_rdnm(s, p);
    for (int i = 0; i < g.n; ++i) {
        CHECK(nm.e[i] == doctest::Approx(prim.e[i]).epsilon(1e-13));
        CHECK(nm.f[i] == doctest::Approx(prim.f[i]).epsilon(1e-13));
        CHECK(nm.d[i] == doctest::Approx(prim.d[i]).epsilon(1e-13));
    }
}

TEST_CASE("balance residual requires uniform snapshot spacing") {
    const Params p{1.0, 2.0, 1.0, {}};
    const Grid1D g = make_grid(20.0, 128, Bc::periodic);
    const State s0 = random_smooth(g, 5u);
    const std::vector<double> uneven{0.0, 0.1, 0.3, 0.35};
    const Trajectory traj = simulate_rd(s0, p, uneven);
    const StructureParams sp = default_structure_params(p);
    CHECK_THROWS_AS(balance_residual(traj, EdsKind::primary, sp), ConfigError);
}

TEST_CASE("defect equation residual is first order in the snapshot spacing") {
    const Params p{1.0, 2.0, 1.0, {}};
    const Grid1D g = make_grid(20.0, 512, Bc::periodic);
    SimOptions warm_opts;
    warm_opts.fixed_dt = 0.01;
    const Trajectory warm =
        simulate_rd(random_smooth(g, 9u), p, std::vector<double>{0.5}, warm_opts);
    const State start = warm.snapshots.back();

    auto residual_at = [&](double h) {
        SimOptions opts;
        opts.fixed_dt = h;
        std::vector<double> times;
        for (int i = 0; i <= 20; ++i)
            times.push_back(start.t + h * i);
        const Trajectory traj = simulate_rd(start, p, times, opts);
        return rho_residual(traj, p).max_norm;
    };
    const double ratio = residual_at(0.02) / residual_at(0.01);
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
}

TEST_CASE("localized energy inequalities hold on a desk-scale run") {
    const Params p{1.0, 2.0, 1.0, {}};
    const Trajectory traj = short_run(p, 21u, 5.0, 41);

    const GronwallConstants gc = assemble_gronwall_constants(traj, p);
    CHECK(gc.C0 == doctest::Approx(std::max(2.0 * p.a, 1.5 * p.b)).epsilon(1e-15));
    CHECK(gc.C1 > 0.0);
    CHECK(gc.C2 > gc.C1);
    CHECK(gc.C3 == doctest::Approx(std::exp(gc.C2 / gc.C0)).epsilon(1e-12));
    CHECK(gc.C5 == doctest::Approx(2.0 * std::exp(0.5) * gc.C3 * gc.C4).epsilon(1e-12));
    CHECK(gc.c1_points > 0);

    for (double x0 : {8.0, 20.0, 31.0}) {
        const LocalizedSeries ls = localized_energies(traj, p, 5.0, x0);
        CHECK(ls.C0 * ls.eps * ls.eps == doctest::Approx(1.0 / ls.T).epsilon(1e-12));
        const GronwallReport rep = gronwall_checks(ls, gc);
        CHECK(rep.pass_first);
        CHECK(rep.pass_second);
        CHECK(rep.slack_first >= 0.0);
        CHECK(rep.slack_second >= 0.0);
    }
}

TEST_CASE("inequality sweep on a short trajectory") {
    const Params p{1.0, 2.0, 1.0, {}};
    const Trajectory traj = short_run(p, 29u, 2.0, 21);
    const SweepReport rep = inequality_sweep(traj, p);

    CHECK(rep.C0 == doctest::Approx(std::max(2.0 * p.a, 1.5 * p.b)).epsilon(1e-15));
    const StructureParams sp = default_structure_params(p);
    const double c4 =
        std::max({sp.alpha / (2.0 * p.a), sp.beta / (2.0 * p.b), 1.0 / (2.0 * p.k)});
    CHECK(rep.C4 == doctest::Approx(c4).epsilon(1e-14));

    CHECK(rep.flux_margin_min > -1e-10);
    CHECK(rep.dpos_margin_min > -1e-10);
    CHECK(rep.ordering_margin_min > -1e-10);
    CHECK(rep.flux_ratio_max <= rep.C0 + 1e-12);
    CHECK(rep.ordering_ratio_max <= rep.C4 + 1e-12);
    CHECK(rep.points > 0);
    CHECK(rep.boltzmann_snapshots > 0);
    CHECK(rep.boltzmann_ratio_max > 0.0);
}

TEST_CASE("ul decay series and slaving check run on every snapshot") {
    const Params p{1.0, 1.0, 1.0, {}};
    const Grid1D g = make_grid(40.0, 512, Bc::periodic);
    const State s0 = gaussian_bump(g, 1.0, 1.0, 1.0, 0.0, 2.0);
    const Trajectory traj = simulate_rd(s0, p, linspace(0.0, 4.0, 9));

    const std::vector<double> ul = ul_decay_series(traj);
    REQUIRE(ul.size() == traj.snapshots.size());
    for (double x : ul) {
        CHECK(std::isfinite(x));
        CHECK(x >= 0.0);
    }
    CHECK(ul.back() < ul.front());

    const SlavingSeries sl = slaving_check(traj, p);
    REQUIRE(sl.times.size() == traj.snapshots.size());
    for (size_t i = 0; i < sl.times.size(); ++i) {
        CHECK(sl.discrepancy[i] >= 0.0);
        CHECK(sl.rho_norm[i] >= 0.0);
    }
}

TEST_CASE("power-law fits recover synthetic data") {
    std::vector<double> t, v, vl;
    for (int i = 1; i <= 60; ++i) {
        const double ti = 0.5 * i;
        t.push_back(ti);
        v.push_back(3.7 * std::pow(ti, -1.3));
        vl.push_back(2.0 * std::pow(ti, -0.5) * std::log(2.0 + ti));
    }

    const DecayFit f = decay_fit(t, v, 1.0, 30.0);
    CHECK(f.slope == doctest::Approx(-1.3).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.7)).epsilon(1e-10));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.window_lo == 1.0);
    CHECK(f.window_hi == 30.0);

    const DecayFit g = decay_fit(t, vl, 1.0, 30.0, true);
    CHECK(g.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(g.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(g.log_correction);

    // window filtering: points outside [lo, hi] must not affect the fit
    std::vector<double> tv = t, vv = v;
    tv.push_back(1000.0);
    vv.push_back(99.0);
    const DecayFit h = decay_fit(tv, vv, 1.0, 30.0);
    CHECK(h.slope == doctest::Approx(f.slope).epsilon(1e-13));
    CHECK(h.n_points == f.n_points);
}
