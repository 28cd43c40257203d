#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "rdlab/dynamics.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/profiles.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace rdlab;

namespace {

const double pi = std::acos(-1.0);

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        t[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    return t;
}

double mass_of(const State& s) {
    Field w = extract_w(s);
    return integral(w);
}

} // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(Params{0.0, 1.0, 1.0, {}}), ConfigError);
    CHECK_THROWS_AS(validate(Params{1.0, -2.0, 1.0, {}}), ConfigError);
    CHECK_THROWS_AS(validate(Params{1.0, 1.0, 0.0, {}}), ConfigError);
    Params bad{1.0, 1.0, 1.0, ReactionOrders{1, 1}};
    CHECK_THROWS_AS(validate(bad), ConfigError); // n + m >= 3 required
    CHECK_NOTHROW(validate(Params{1.0, 1.0, 1.0, ReactionOrders{2, 3}}));
}

TEST_CASE("homogeneous equilibria are exact fixed points of the stepper") {
    const Params p{1.3, 0.6, 2.0, {}};
    for (Bc bc : {Bc::periodic, Bc::neumann}) {
        const Grid1D g = make_grid(10.0, 64, bc);
        const double vbar = 0.7;
        const State s0 = constant_pair(g, vbar * vbar, vbar);
        const std::vector<double> times{0.0, 1.0, 5.0};
        const Trajectory traj = simulate_rd(s0, p, times);
        const State& last = traj.snapshots.back();
        for (int i = 0; i < g.n; ++i) {
            CHECK(std::abs(last.u[i] - vbar * vbar) < 1e-13);
            CHECK(std::abs(last.v[i] - vbar) < 1e-13);
        }
    }
}

TEST_CASE("output time validation") {
    const Grid1D g = make_grid(5.0, 32, Bc::periodic);
    const State s0 = constant_pair(g, 1.0, 1.0);
    const Params p{};
    CHECK_THROWS_AS(simulate_rd(s0, p, std::vector<double>{}), ConfigError);
    CHECK_THROWS_AS(simulate_rd(s0, p, std::vector<double>{1.0, 0.5}), ConfigError);
    State late = s0;
    late.t = 2.0;
    CHECK_THROWS_AS(simulate_rd(late, p, std::vector<double>{1.0}), ConfigError);
    // duplicate times produce duplicate snapshots
    const Trajectory traj = simulate_rd(s0, p, std::vector<double>{0.0, 1.0, 1.0});
    CHECK(traj.snapshots.size() == 3);
    CHECK(traj.snapshots[1].t == traj.snapshots[2].t);
}

TEST_CASE("homogeneous kinetics agree with a fixed-step RK4 oracle") {
    const Params p{1.0, 1.0, 0.8, {}};
    const double u0 = 3.0, v0 = 0.5;
    const std::vector<double> times = linspace(0.0, 5.0, 11);
    const KineticPath path = simulate_kinetic_ode(u0, v0, p, times);
    REQUIRE(path.times.size() == times.size());

    for (size_t i = 0; i < times.size(); ++i) {
        const auto [ur, vr] = oracle::rk4_kinetic(u0, v0, p, times[i], 1e-4);
        CHECK(std::abs(path.u[i] - ur) < 1e-9);
        CHECK(std::abs(path.v[i] - vr) < 1e-9);
        // conserved combination
        CHECK(std::abs(2.0 * path.u[i] + path.v[i] - (2.0 * u0 + v0)) < 1e-11);
    }

    const auto [us, vs] = equilibrium_from_data(u0, v0);
    CHECK(std::abs(path.u.back() - us) < 1e-6);
    CHECK(std::abs(path.v.back() - vs) < 1e-6);

    CHECK_THROWS_AS(simulate_kinetic_ode(-1.0, 0.5, p, times), ConfigError);
    CHECK_THROWS_AS(simulate_kinetic_ode(1.0, 0.5, p, std::vector<double>{0.0, 0.0}),
                    ConfigError);
}

TEST_CASE("equilibrium_from_data solves the conservation algebra") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    for (int it = 0; it < 1000; ++it) {
        const double u0 = dist(rng), v0 = dist(rng);
        const auto [us, vs] = equilibrium_from_data(u0, v0);
        CHECK(std::abs(us - vs * vs) < 1e-12 * (1.0 + us));
        CHECK(std::abs(2.0 * us + vs - (2.0 * u0 + v0)) < 1e-12 * (1.0 + 2.0 * u0 + v0));
        CHECK(vs >= 0.0);
    }
    const auto [uz, vz] = equilibrium_from_data(0.0, 0.0);
    CHECK(uz == 0.0);
    CHECK(vz == 0.0);
    CHECK_THROWS_AS(equilibrium_from_data(-0.1, 1.0), ConfigError);
}

TEST_CASE("discrete mass is conserved to round-off") {
    const Params p{1.0, 2.0, 1.0, {}};
    for (Bc bc : {Bc::periodic, Bc::neumann}) {
        const Grid1D g = make_grid(20.0, 256, bc);
        const State s0 = random_smooth(g, 31u);
        const std::vector<double> times{0.0, 0.5, 2.0};
        const Trajectory traj = simulate_rd(s0, p, times);
        const double m0 = mass_of(traj.snapshots.front());
        for (const State& s : traj.snapshots)
            CHECK(std::abs(mass_of(s) - m0) < 1e-12 * std::abs(m0));
    }
}

TEST_CASE("implicit diffusion step matches a dense pivoted solve") {
    // k ~ 0 isolates the diffusion half of the splitting
    const Params p{1.3, 0.7, 1e-300, {}};
    const double dt = 0.37;
    for (Bc bc : {Bc::periodic, Bc::neumann}) {
        const Grid1D g = make_grid(4.8, 48, bc);
        State s0;
        s0.u = sample(g, [](double x) { return 1.0 + 0.9 * std::cos(2.0 * pi * x / 4.8); });
        s0.v = sample(g, [](double x) { return 1.0 + 0.5 * std::sin(4.0 * pi * x / 4.8); });
        s0.t = 0.0;

        const State s1 = step_rd(s0, p, dt);

        const auto Au = oracle::implicit_matrix(g, p.a, dt);
        const auto Av = oracle::implicit_matrix(g, p.b, dt);
        const auto uref = oracle::dense_solve(Au, s0.u.values, g.n);
        const auto vref = oracle::dense_solve(Av, s0.v.values, g.n);
        for (int i = 0; i < g.n; ++i) {
            CHECK(std::abs(s1.u[i] - uref[static_cast<size_t>(i)]) < 1e-12);
            CHECK(std::abs(s1.v[i] - vref[static_cast<size_t>(i)]) < 1e-12);
        }
    }
}

TEST_CASE("a single Fourier mode decays at the discrete implicit-Euler rate") {
    const Params p{0.8, 1.0, 1e-300, {}};
    const int n = 64, mode = 2;
    const double L = 6.4, T = 1.0, dt = 0.01;
    const Grid1D g = make_grid(L, n, Bc::periodic);
    State s0;
    s0.u = sample(g, [&](double x) { return 1.0 + 0.5 * std::cos(2.0 * pi * mode * x / L); });
    s0.v = make_field(g, 1.0);
    s0.t = 0.0;

    SimOptions opts;
    opts.fixed_dt = dt;
    const Trajectory traj = simulate_rd(s0, p, std::vector<double>{T}, opts);
    const State& s1 = traj.snapshots.back();

    const double lam = dt * p.a * (2.0 - 2.0 * std::cos(2.0 * pi * mode / n)) / (g.dx * g.dx);
    const double q = std::pow(1.0 / (1.0 + lam), T / dt);

    double amp = 0.0, mean = 0.0;
    for (int i = 0; i < n; ++i) {
        amp += s1.u[i] * std::cos(2.0 * pi * mode * i / n);
        mean += s1.u[i];
    }
    amp *= 2.0 / n;
    mean /= n;

    CHECK(std::abs(amp - 0.5 * q) < 1e-11 * 0.5 * q);
    CHECK(std::abs(mean - 1.0) < 1e-12);
    // v stays exactly homogeneous
    CHECK(std::abs(max_val(s1.v) - min_val(s1.v)) < 1e-13);
}

TEST_CASE("positivity enforcement") {
    const Grid1D g = make_grid(5.0, 32, Bc::periodic);
    State s0;
    s0.u = make_field(g, 1.0);
    s0.v = make_field(g, -0.01);
    s0.t = 0.0;
    const Params p{};
    CHECK_THROWS_AS(step_rd(s0, p, 0.01), PositivityError);

    StepOptions loose;
    loose.enforce_positivity = false;
    CHECK_NOTHROW(step_rd(s0, p, 0.01, loose));
}

TEST_CASE("kinetic envelopes bracket a bump run with round-off margins") {
    // data >= (1,1) pointwise and (1,1) is a discrete fixed point, so the
    // order-preserving stepper keeps the solution above it exactly
    const Params p{1.0, 2.0, 1.0, {}};
    const Grid1D g = make_grid(60.0, 512, Bc::periodic);
    const State s0 = gaussian_bump(g, 1.0, 1.0, 1.0, 0.0, 2.5);
    SimOptions opts;
    opts.fixed_dt = 1e-3;
    const Trajectory traj = simulate_rd(s0, p, linspace(0.0, 5.0, 11), opts);

    const EnvelopeReport rep = ode_envelope_check(traj);
    const double delta = 1.0; // min v0
    CHECK(rep.barrier ==
          doctest::Approx(2.0 * delta / (1.0 + std::sqrt(1.0 + 8.0 * delta))).epsilon(1e-14));
    CHECK(rep.worst_lower_u > -1e-9);
    CHECK(rep.worst_lower_v > -1e-9);
    CHECK(rep.worst_barrier_margin > 0.0);
    // upper envelopes are integrated to much higher order than the PDE, so
    // only O(dt) agreement is guaranteed there
    CHECK(rep.worst_upper_u > -5e-3);
    CHECK(rep.worst_upper_v > -5e-3);
}

TEST_CASE("envelopes degenerate to the kinetic path on homogeneous data") {
    const Params p{1.0, 1.0, 1.0, {}};
    const Grid1D g = make_grid(5.0, 32, Bc::periodic);
    const State s0 = constant_pair(g, 2.0, 0.3);
    SimOptions opts;
    opts.fixed_dt = 2e-4;
    const Trajectory traj = simulate_rd(s0, p, linspace(0.0, 2.0, 9), opts);
    const EnvelopeReport rep = ode_envelope_check(traj);
    // upper and lower envelopes coincide; the PDE solution sits between them
    // up to the first-order splitting error
    CHECK(rep.worst_lower_u > -2e-3);
    CHECK(rep.worst_lower_v > -2e-3);
    CHECK(rep.worst_upper_u > -2e-3);
    CHECK(rep.worst_upper_v > -2e-3);
}

TEST_CASE("fisher embedding states") {
    // 1025 points put the profile center exactly on a grid node
    const Grid1D g = make_grid(60.0, 1025, Bc::neumann);

    SUBCASE("pulse lies on the embedding line 2u + v = 1") {
        const State s = fisher_kpp_state(FisherKind::pulse, {}, g);
        for (int i = 0; i < g.n; ++i)
            CHECK(std::abs(2.0 * s.u[i] + s.v[i] - 1.0) < 1e-12);
        // center value z = -1/2: u = 11/8, v = -7/4
        const int mid = (g.n - 1) / 2;
        CHECK(s.u[mid] == doctest::Approx(1.375).epsilon(1e-10));
        CHECK(s.v[mid] == doctest::Approx(-1.75).epsilon(1e-10));
    }

    SUBCASE("wave profiles exist only at admissible speeds") {
        CHECK_THROWS_AS(fisher_kpp_state(FisherKind::wave, 3.0, g), ConfigError);
        const State s = fisher_kpp_state(FisherKind::wave, 2.0 * std::sqrt(3.0), g);
        for (int i = 0; i < g.n; ++i)
            CHECK(std::abs(2.0 * s.u[i] + s.v[i] - 1.0) < 1e-12);
        // rho = 9/4 z(1-z) along the line, so 0 <= rho <= 9/16
        const Field rho = extract_rho(s);
        CHECK(min_val(rho) > -1e-10);
        CHECK(max_val(rho) <= 0.5625 + 1e-10);
        CHECK(max_val(rho) > 0.5); // the profile crosses z = 1/2
    }
}

TEST_CASE("generalized reaction orders conserve m u + n v") {
    Params p{1.0, 1.0, 1.0, ReactionOrders{2, 3}};
    const Grid1D g = make_grid(20.0, 256, Bc::periodic);
    const State s0 = random_smooth(g, 7u);
    const Trajectory traj = simulate_rdnm(s0, p, std::vector<double>{0.0, 0.3, 1.0});

    auto mass23 = [](const State& s) {
        Field dens = make_field(s.u.grid);
        for (int i = 0; i < s.u.size(); ++i)
            dens[i] = 3.0 * s.u[i] + 2.0 * s.v[i];
        return integral(dens);
    };
    const double m0 = mass23(traj.snapshots.front());
    for (const State& s : traj.snapshots)
        CHECK(std::abs(mass23(s) - m0) < 1e-12 * std::abs(m0));

    Params base{};
    CHECK_THROWS_AS(simulate_rdnm(s0, base, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("effective diffusion model") {
    const std::vector<double> times{0.0, 0.5, 2.0};

    SUBCASE("constants are invariant") {
        const Grid1D g = make_grid(10.0, 64, Bc::neumann);
        const Field w0 = make_field(g, 1.7);
        const Params p{1.0, 2.0, 1.0, {}};
        const ScalarTrajectory traj = simulate_effective_diffusion(w0, p, times);
        for (const Field& w : traj.w)
            for (int i = 0; i < g.n; ++i)
                CHECK(std::abs(w[i] - 1.7) < 1e-13);
    }

    SUBCASE("mass conserved, sup norm nonincreasing") {
        const Grid1D g = make_grid(10.0, 128, Bc::neumann);
        const Field w0 = sample(g, [](double x) {
            return 1.0 + std::exp(-(x - 5.0) * (x - 5.0));
        });
        const Params p{1.0, 2.0, 1.0, {}};
        const ScalarTrajectory traj = simulate_effective_diffusion(w0, p, times);
        const double m0 = integral(traj.w.front());
        double prev_max = max_val(traj.w.front());
        for (const Field& w : traj.w) {
            CHECK(std::abs(integral(w) - m0) < 1e-12 * m0);
            CHECK(max_val(w) <= prev_max + 1e-12);
            prev_max = max_val(w);
        }
    }

    SUBCASE("equal diffusivities reduce to the heat flow of 2u + v") {
        // with a = b the conserved field of the full system and the scalar
        // model integrate the same linear equation with the same steps
        const Params p{1.0, 1.0, 1.0, {}};
        const Grid1D g = make_grid(15.0, 192, Bc::neumann);
        const State s0 = random_smooth(g, 12u);
        SimOptions opts;
        opts.fixed_dt = 0.01;
        const std::vector<double> ts{0.0, 0.25, 1.0};
        const Trajectory full = simulate_rd(s0, p, ts, opts);
        const ScalarTrajectory eff = simulate_effective_diffusion(extract_w(s0), p, ts, opts);
        for (size_t j = 0; j < ts.size(); ++j) {
            const Field wf = extract_w(full.snapshots[j]);
            for (int i = 0; i < g.n; ++i)
                CHECK(std::abs(wf[i] - eff.w[j][i]) < 1e-9);
        }
    }

    SUBCASE("negative data rejected") {
        const Grid1D g = make_grid(10.0, 64, Bc::neumann);
        const Field w0 = make_field(g, -0.5);
        CHECK_THROWS_AS(simulate_effective_diffusion(w0, Params{}, times), PositivityError);
    }
}

TEST_CASE("linearized flow about a frozen equilibrium matches the matrix exponential") {
    const Params p{1.0, 2.0, 1.0, {}};
    const double vbar = 1.0, L = 20.0, T = 0.5;
    const int n = 256, mode = 3;
    const Grid1D g = make_grid(L, n, Bc::periodic);

    // constant-in-time background path at the equilibrium (vbar^2, vbar)
    Trajectory vpath;
    vpath.params = p;
    State eq = constant_pair(g, vbar * vbar, vbar);
    vpath.snapshots.push_back(eq);
    eq.t = T;
    vpath.snapshots.push_back(eq);

    const double eps_u = 0.7, eps_v = -0.4;
    const Field U0 = sample(g, [&](double x) { return eps_u * std::cos(2.0 * pi * mode * x / L); });
    const Field V0 = sample(g, [&](double x) { return eps_v * std::cos(2.0 * pi * mode * x / L); });

    SimOptions opts;
    opts.fixed_dt = 2e-4;
    opts.enforce_positivity = false;
    const Trajectory lin = simulate_linearized(vpath, U0, V0, 0.0, std::vector<double>{T}, opts);
    const State& out = lin.snapshots.back();

    // reference: exponential of the reaction-diffusion block at the discrete
    // symbol of this mode
    const double xi2 = (2.0 - 2.0 * std::cos(2.0 * pi * mode / n)) / (g.dx * g.dx);
    Mat2 Ld;
    Ld(0, 0) = -p.k - p.a * xi2;
    Ld(0, 1) = 2.0 * p.k * vbar;
    Ld(1, 0) = 2.0 * p.k;
    Ld(1, 1) = -4.0 * p.k * vbar - p.b * xi2;
    const Mat2 E = oracle::expm_taylor(T * Ld);
    const double au = E(0, 0) * eps_u + E(0, 1) * eps_v;
    const double av = E(1, 0) * eps_u + E(1, 1) * eps_v;

    for (int i = 0; i < n; ++i) {
        const double c = std::cos(2.0 * pi * mode * i / n);
        CHECK(std::abs(out.u[i] - au * c) < 5e-3);
        CHECK(std::abs(out.v[i] - av * c) < 5e-3);
    }
}

TEST_CASE("linearized flow tracks the difference of two nearby solutions") {
    const Params p{1.0, 2.0, 1.0, {}};
    const Grid1D g = make_grid(20.0, 256, Bc::periodic);
    const double T = 0.25, eps = 1e-5;

    const State base = random_smooth(g, 5u, 0.8, 0.2, 6);
    State pert = base;
    const Field bump = sample(g, [](double x) {
        return std::cos(2.0 * pi * x / 20.0) + 0.5 * std::sin(4.0 * pi * x / 20.0);
    });
    for (int i = 0; i < g.n; ++i) {
        pert.u[i] += eps * bump[i];
        pert.v[i] += eps * 0.5 * bump[i];
    }

    SimOptions opts;
    opts.fixed_dt = 2e-4;
    const std::vector<double> dense = linspace(0.0, T, 21);
    const Trajectory tb = simulate_rd(base, p, dense, opts);
    const Trajectory tp = simulate_rd(pert, p, dense, opts);

    Field U0 = make_field(g), V0 = make_field(g);
    for (int i = 0; i < g.n; ++i) {
        U0[i] = bump[i];
        V0[i] = 0.5 * bump[i];
    }
    const Trajectory lin = simulate_linearized(tb, U0, V0, 0.0, std::vector<double>{T}, opts);

    const State &sb = tb.snapshots.back(), &sp = tp.snapshots.back();
    const State& sl = lin.snapshots.back();
    double scale = 0.0;
    for (int i = 0; i < g.n; ++i)
        scale = std::max(scale, std::abs(sl.u[i]) + std::abs(sl.v[i]));
    REQUIRE(scale > 0.1); // the mode must not have died outright
    for (int i = 0; i < g.n; ++i) {
        CHECK(std::abs((sp.u[i] - sb.u[i]) / eps - sl.u[i]) < 5e-3 * scale);
        CHECK(std::abs((sp.v[i] - sb.v[i]) / eps - sl.v[i]) < 5e-3 * scale);
    }
}

TEST_CASE("rho and w extraction") {
    const Grid1D g = make_grid(5.0, 32, Bc::periodic);
    State s;
    s.u = make_field(g, 3.0);
    s.v = make_field(g, 1.5);
    const Field rho = extract_rho(s);
    const Field w = extract_w(s);
    CHECK(rho[0] == doctest::Approx(3.0 - 2.25).epsilon(1e-15));
    CHECK(w[0] == doctest::Approx(7.5).epsilon(1e-15));
}
