#include "rdlab/acceptance.hpp"

#include "rdlab/dynamics.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/fit.hpp"
#include "rdlab/scenario.hpp"
#include "rdlab/spectral.hpp"
#include "rdlab/structures.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>

namespace rdlab {

namespace {

std::string num(double x) {
    char b[64];
    auto [p, ec] = std::to_chars(b, b + sizeof(b), x);
    return std::string(b, p);
}

std::string num4(double x) {
    char b[64];
    std::snprintf(b, sizeof(b), "%.4g", x);
    return b;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::vector<double> logspace(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double r = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = lo * std::exp(r * i);
    out.front() = lo;
    out.back() = hi;
    return out;
}

struct DecayRun {
    ScenarioConfig cfg;
    Trajectory traj;
};

DecayRun make_decay_run(const std::string& scenario) {
    DecayRun r;
    r.cfg = default_config(scenario);
    const Grid1D g = make_grid(r.cfg.length, r.cfg.n, r.cfg.bc);
    const State init = make_profile(r.cfg.profile, g, r.cfg.seed);
    r.traj = simulate_rd(init, r.cfg.params, r.cfg.output_times);
    return r;
}

template <class F>
DecayFit fit_sup(const Trajectory& tr, double lo, double hi, F&& f) {
    std::vector<double> t, v;
    for (const auto& s : tr.snapshots) {
        if (s.t <= 0.0)
            continue;
        t.push_back(s.t);
        v.push_back(f(s));
    }
    return decay_fit(t, v, lo, hi);
}

bool slope_line(std::vector<std::string>& detail, const char* what, const DecayFit& fit,
                double target, double tolv) {
    const bool ok = std::abs(fit.slope - target) <= tolv;
    detail.push_back(std::string(what) + " slope " + num4(fit.slope) + " (target " +
                     num(target) + " +- " + num(tolv) + ", r2 " + num4(fit.r_squared) + ")" +
                     (ok ? "" : "  <-- out of band"));
    return ok;
}

// scaling-and-squaring reference exponential, independent of the closed form
Mat2 expm_reference(Mat2 A) {
    double nrm = 0.0;
    for (double e : A.m)
        nrm = std::max(nrm, std::abs(e));
    int s = 0;
    while (nrm > 0.25) {
        nrm *= 0.5;
        ++s;
    }
    const Mat2 X = std::ldexp(1.0, -s) * A;
    Mat2 sum = Mat2::identity();
    Mat2 term = Mat2::identity();
    for (int k = 1; k <= 30; ++k) {
        term = (1.0 / k) * (term * X);
        sum = sum + term;
    }
    for (int i = 0; i < s; ++i)
        sum = sum * sum;
    return sum;
}

double rel_err(const Mat2& got, const Mat2& want) {
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < 4; ++i) {
        diff = std::max(diff, std::abs(got.m[static_cast<std::size_t>(i)] -
                                       want.m[static_cast<std::size_t>(i)]));
        scale = std::max(scale, std::abs(want.m[static_cast<std::size_t>(i)]));
    }
    return diff / std::max(scale, 1e-300);
}

void append_report_checks(std::vector<std::string>& detail, const Report& rep) {
    for (const auto& c : rep.checks)
        detail.push_back(c.name + ": measured " + num4(c.measured) + " (tol " +
                         num(c.tolerance) + ")" + (c.pass ? "" : "  <-- FAIL"));
}

} // namespace

std::vector<CriterionResult> run_acceptance(std::uint64_t seed) {
    std::vector<CriterionResult> out;
    std::optional<DecayRun> run1, run2;

    auto crit = [&](int id, std::string name, double budget, auto&& body) {
        CriterionResult r;
        r.id = id;
        r.name = std::move(name);
        Timer tm;
        try {
            r.pass = body(r.detail);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail.push_back(std::string("error: ") + e.what());
        }
        r.seconds = tm.elapsed();
        if (budget > 0.0) {
            if (r.seconds > budget)
                r.pass = false;
            r.detail.push_back("wall " + num4(r.seconds) + " s (budget " + num(budget) + " s)");
        }
        out.push_back(std::move(r));
    };

    crit(1, "equal-diffusivity decay rates", 120.0, [&](std::vector<std::string>& d) {
        run1 = make_decay_run("equal_diff_decay");
        const Trajectory& tr = run1->traj;
        bool ok = true;
        ok &= slope_line(d, "sup|u_x|",
                         fit_sup(tr, 20.0, 2000.0,
                                 [](const State& s) { return max_abs(deriv1(s.u)); }),
                         -0.5, 0.1);
        ok &= slope_line(d, "sup|v_x|",
                         fit_sup(tr, 20.0, 2000.0,
                                 [](const State& s) { return max_abs(deriv1(s.v)); }),
                         -0.5, 0.1);
        ok &= slope_line(d, "sup|u-v^2|",
                         fit_sup(tr, 20.0, 2000.0,
                                 [](const State& s) { return max_abs(extract_rho(s)); }),
                         -1.0, 0.15);
        return ok;
    });

    crit(2, "unequal-diffusivity windowed decay", 180.0, [&](std::vector<std::string>& d) {
        run2 = make_decay_run("unequal_diff_decay");
        const Trajectory& tr = run2->traj;
        bool ok = true;

        const auto ul = ul_decay_series(tr);
        std::vector<double> t, v;
        for (std::size_t i = 0; i < tr.snapshots.size(); ++i)
            if (tr.snapshots[i].t > 0.0) {
                t.push_back(tr.snapshots[i].t);
                v.push_back(ul[i]);
            }
        ok &= slope_line(d, "windowed energy+defect", decay_fit(t, v, 20.0, 2000.0), -0.5, 0.1);

        std::vector<double> scaled;
        for (const auto& s : tr.snapshots)
            if (s.t >= 20.0)
                scaled.push_back(max_abs(extract_rho(s)) * std::sqrt(1.0 + s.t));
        std::sort(scaled.begin(), scaled.end());
        const double med = scaled.size() % 2 ? scaled[scaled.size() / 2]
                                             : 0.5 * (scaled[scaled.size() / 2 - 1] +
                                                      scaled[scaled.size() / 2]);
        const double ratio = scaled.back() / med;
        const bool bok = ratio <= 3.0;
        d.push_back("(1+t)^{1/2} sup|u-v^2|: max/median " + num4(ratio) + " (limit 3)" +
                    (bok ? "" : "  <-- out of band"));
        ok &= bok;
        return ok;
    });

    crit(3, "pointwise structure inequalities", 0.0, [&](std::vector<std::string>& d) {
        if (!run1 || !run2)
            throw ConfigError("decay runs unavailable");
        bool ok = true;
        for (const DecayRun* run : {&*run1, &*run2}) {
            const SweepReport sw =
                inequality_sweep(run->traj, run->cfg.params,
                                 default_structure_params(run->cfg.params));
            const bool fok = sw.flux_margin_min >= -1e-10;
            const bool dok = sw.dpos_margin_min >= -1e-10;
            const bool ook = sw.ordering_margin_min >= -1e-10;
            d.push_back(run->cfg.scenario + ": min margins  flux " + num4(sw.flux_margin_min) +
                        "  floor " + num4(sw.dpos_margin_min) + "  ordering " +
                        num4(sw.ordering_margin_min) + " over " +
                        std::to_string(sw.points) + " points (slack 1e-10)" +
                        (fok && dok && ook ? "" : "  <-- FAIL"));
            ok &= fok && dok && ook;
        }
        return ok;
    });

    crit(4, "balance residual convergence orders", 0.0, [&](std::vector<std::string>& d) {
        const Params p{1.0, 2.0, 1.0, {}};
        bool ok = true;
        const EdsKind kinds[] = {EdsKind::primary, EdsKind::secondary, EdsKind::theta_first,
                                 EdsKind::theta_second};
        const char* names[] = {"primary", "secondary", "theta_first", "theta_second"};
        for (int i = 0; i < 4; ++i) {
            const BalanceOrders bo = balance_order_study(kinds[i], p, seed);
            const bool tok = std::abs(bo.order_dt - 1.0) <= 0.3;
            const bool xok = std::abs(bo.order_dx - 2.0) <= 0.3;
            d.push_back(std::string(names[i]) + ": order_dt " + num4(bo.order_dt) +
                        " (target 1 +- 0.3), order_dx " + num4(bo.order_dx) +
                        " (target 2 +- 0.3)" + (tok && xok ? "" : "  <-- out of band"));
            ok &= tok && xok;
        }
        return ok;
    });

    crit(5, "localized energy inequalities", 0.0, [&](std::vector<std::string>& d) {
        if (!run2)
            throw ConfigError("unequal decay run unavailable");
        const Params& p = run2->cfg.params;
        const StructureParams sp = default_structure_params(p);
        const GronwallConstants gc = assemble_gronwall_constants(run2->traj, p, sp);
        d.push_back("constants: C1 " + num4(gc.C1) + ", C3 " + num4(gc.C3) + ", C5 " +
                    num4(gc.C5) + " (" + std::to_string(gc.c1_points) + " points)");

        std::vector<double> candidates;
        for (const auto& s : run2->traj.snapshots)
            if (s.t >= 20.0)
                candidates.push_back(s.t);
        std::mt19937_64 rng(seed ^ 0x517cc1b727220a95ull);
        std::uniform_int_distribution<std::size_t> pickT(0, candidates.size() - 1);
        std::uniform_real_distribution<double> pickX(0.25 * run2->cfg.length,
                                                     0.75 * run2->cfg.length);
        double worst_first = std::numeric_limits<double>::infinity();
        double worst_second = std::numeric_limits<double>::infinity();
        bool ok = true;
        const int draws = 12;
        for (int i = 0; i < draws; ++i) {
            const double T = candidates[pickT(rng)];
            const double x0 = pickX(rng);
            const LocalizedSeries ls = localized_energies(run2->traj, p, T, x0, sp);
            const GronwallReport gr = gronwall_checks(ls, gc);
            worst_first = std::min(worst_first, gr.slack_first);
            worst_second = std::min(worst_second, gr.slack_second);
            if (!(gr.pass_first && gr.pass_second))
                d.push_back("T " + num4(T) + ", x0 " + num4(x0) + ": slack_first " +
                            num4(gr.slack_first) + ", slack_second " + num4(gr.slack_second) +
                            "  <-- FAIL");
            ok &= gr.pass_first && gr.pass_second;
        }
        d.push_back(std::to_string(draws) + " random (x0, T) pairs: min slack first " +
                    num4(worst_first) + ", second " + num4(worst_second));
        return ok;
    });

    crit(6, "closed-form propagator vs reference", 30.0, [&](std::vector<std::string>& d) {
        const KernelParams kp = make_kernel_params(1.0, 2.0, 1.0, 1.0);
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double xi = 6.0 * uni(rng);
            const double lam = kp.kappa + kp.mu * xi * xi - delta(xi, kp);
            const double tmax = std::min(100.0, 500.0 / std::max(lam, 0.01));
            const double t = std::exp(std::log(1e-3) + uni(rng) * std::log(tmax / 1e-3));
            worst = std::max(worst, rel_err(expA_closed(xi, t, kp),
                                            expm_reference(t * matrix_A(xi, kp))));
        }
        const bool mok = worst <= 1e-10;
        d.push_back("max relative deviation over 10000 samples: " + num4(worst) +
                    " (tol 1e-10)" + (mok ? "" : "  <-- FAIL"));

        const KernelParams kp0 = make_kernel_params(1.5, 1.5, 1.0, 1.0);
        double worst0 = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const double xi = 6.0 * uni(rng);
            const double rate = 2.0 * kp0.kappa + kp0.mu * xi * xi;
            const double t = std::exp(std::log(1e-3) + uni(rng) * std::log(90.0 / rate / 1e-3));
            const SymbolActions sa = symbol_actions(xi, t, kp0);
            const double amp = std::exp(-rate * t);
            const double em = std::max({std::abs(sa.SM.x - amp * kp0.k1),
                                        std::abs(sa.SM.y + amp * kp0.k2)}) /
                              (amp * std::max(kp0.k1, kp0.k2));
            const double en = std::max(std::abs(sa.NS.x + amp), std::abs(sa.NS.y - amp)) / amp;
            worst0 = std::max({worst0, em, en});
        }
        const bool cok = worst0 <= 1e-12;
        d.push_back("equal-diffusivity collapse onto the slow pair: max deviation " +
                    num4(worst0) + " (tol 1e-12)" + (cok ? "" : "  <-- FAIL"));
        return mok && cok;
    });

    crit(7, "kernel norm decay table", 120.0, [&](std::vector<std::string>& d) {
        bool ok = true;
        const KernelParams kp = make_kernel_params(1.0, 2.0, 1.0, 1.0);
        const auto ts = logspace(1.0, 1000.0, 25);
        const std::pair<double, double> fw{10.0, 1000.0};
        struct Row {
            const char* what;
            Projection proj;
            int m;
            double target, tol;
        };
        const Row rows[] = {
            {"|S M|_1", Projection::M_right, 0, -1.0, 0.15},
            {"|N^T S|_1", Projection::N_left, 0, -1.0, 0.15},
            {"|N^T S M|_1", Projection::N_M, 0, -2.0, 0.2},
            {"|d_x S|_1", Projection::full, 1, -0.5, 0.1},
        };
        for (const Row& r : rows) {
            const DecayTable tab = kernel_l1_decay(kp, r.m, ts, r.proj, fw);
            ok &= slope_line(d, r.what, tab.fit, r.target, r.tol);
        }
        const KernelParams kpe = make_kernel_params(1.0, 1.0, 1.0, 1.0);
        const auto tse = logspace(0.08, 8.0, 25);
        const std::pair<double, double> fwe{0.5, 8.0};
        for (const Row& r : {rows[0], rows[1], rows[2]}) {
            const DecayTable tab = kernel_l1_decay(kpe, r.m, tse, r.proj, fwe);
            const bool fast = tab.fit.slope <= -3.0;
            d.push_back(std::string("equal diffusivities, ") + r.what + ": slope " +
                        num4(tab.fit.slope) + " (must be below -3)" +
                        (fast ? "" : "  <-- out of band"));
            ok &= fast;
        }
        return ok;
    });

    crit(8, "front embedding counterexample", 0.0, [&](std::vector<std::string>& d) {
        const Report rep = run_scenario(default_config("fisher_counterexample"));
        append_report_checks(d, rep);
        return rep.all_pass();
    });

    crit(9, "bounded interval relaxation", 0.0, [&](std::vector<std::string>& d) {
        const Report rep = run_scenario(default_config("neumann_interval"));
        append_report_checks(d, rep);
        return rep.all_pass();
    });

    crit(10, "step data self-similar mixing", 0.0, [&](std::vector<std::string>& d) {
        const Report rep = run_scenario(default_config("riemann_mixing"));
        append_report_checks(d, rep);
        return rep.all_pass();
    });

    crit(11, "equilibrium algebra and kinetic envelopes", 0.0,
         [&](std::vector<std::string>& d) {
             std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dull);
             std::uniform_real_distribution<double> uni(0.0, 10.0);
             double worst_cons = 0.0, worst_eq = 0.0;
             for (int i = 0; i < 100000; ++i) {
                 const double u0 = uni(rng), v0 = uni(rng);
                 const auto [us, vs] = equilibrium_from_data(u0, v0);
                 const double mass = 2.0 * u0 + v0;
                 worst_cons = std::max(worst_cons, std::abs(2.0 * us + vs - mass) /
                                                       std::max(1.0, mass));
                 worst_eq = std::max(worst_eq, std::abs(us - vs * vs) / std::max(1.0, us));
             }
             const bool aok = worst_cons <= 1e-12 && worst_eq <= 1e-12;
             d.push_back("100000 random states: conservation error " + num4(worst_cons) +
                         ", equilibrium relation error " + num4(worst_eq) + " (tol 1e-12)" +
                         (aok ? "" : "  <-- FAIL"));

             if (!run1 || !run2)
                 throw ConfigError("decay runs unavailable");
             bool eok = true;
             for (const DecayRun* run : {&*run1, &*run2}) {
                 const EnvelopeReport er = ode_envelope_check(run->traj);
                 const double worst =
                     std::min({er.worst_lower_u, er.worst_lower_v, er.worst_barrier_margin});
                 const bool pass = worst >= -1e-3;
                 d.push_back(run->cfg.scenario + ": worst lower-envelope margin " + num4(worst) +
                             ", barrier " + num4(er.barrier) + " (slack 1e-3)" +
                             (pass ? "" : "  <-- FAIL"));
                 eok &= pass;
             }
             return aok && eok;
         });

    return out;
}

} // namespace rdlab
