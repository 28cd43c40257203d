#include "rdlab/dynamics.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/tridiag.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace rdlab {

namespace {

struct Orders {
    int n;
    int m;
};

Orders orders_of(const Params& p) {
    if (p.orders)
        return {p.orders->n, p.orders->m};
    return {1, 2};
}

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i)
        r *= x;
    return r;
}

void check_state(const State& s, bool enforce_positivity, double tol_pos) {
    if (!(s.u.grid == s.v.grid))
        throw ConfigError("state components live on different grids");
    if (!all_finite(s.u) || !all_finite(s.v))
        throw IntegrationError("non-finite field value", s.t);
    if (enforce_positivity && (min_val(s.u) < -tol_pos || min_val(s.v) < -tol_pos))
        throw PositivityError("negativity beyond tolerance", s.t);
}

// Invariant-region caps: the kinetics keep max(||u||^n, ||v||^m) nonincreasing
// and the cooperative comparison principle extends this to the PDE. Without
// positivity (Fisher embeddings) fall back to the current amplitudes with
// headroom; blowup then surfaces as a positivity/finiteness error.
void amplitude_caps(const State& s, const Params& p, bool enforce_positivity, double& cap_u,
                    double& cap_v) {
    const Orders o = orders_of(p);
    if (enforce_positivity) {
        const double Ku = std::max(max_val(s.u), 0.0);
        const double Kv = std::max(max_val(s.v), 0.0);
        const double invariant = std::max(ipow(Ku, o.n), ipow(Kv, o.m));
        cap_u = std::pow(invariant, 1.0 / o.n);
        cap_v = std::pow(invariant, 1.0 / o.m);
    } else {
        cap_u = 1.5 * max_abs(s.u) + 0.5;
        cap_v = 1.5 * max_abs(s.v) + 0.5;
    }
}

double stable_dt(const Params& p, double cap_u, double cap_v, double safety) {
    const Orders o = orders_of(p);
    const double denom =
        p.k * (o.n * o.n * ipow(cap_u, o.n - 1) + o.m * o.m * ipow(cap_v, o.m - 1));
    return safety / std::max(denom, 1e-300);
}

class ImexStepper {
  public:
    ImexStepper(const Grid1D& g, const Params& p, double dt)
        : g_(g), p_(p), dt_(dt), ord_(orders_of(p)),
          lam_u_(p.a * dt / (g.dx * g.dx)), lam_v_(p.b * dt / (g.dx * g.dx)),
          scratch_(static_cast<size_t>(g.n)) {
        build(fu_, lam_u_);
        build(fv_, lam_v_);
    }

    void step(Field& u, Field& v) const {
        const int n = g_.n;
        if (ord_.n == 1 && ord_.m == 2) {
            for (int i = 0; i < n; ++i) {
                const double r = p_.k * (v[i] * v[i] - u[i]);
                u[i] += dt_ * r;
                v[i] -= 2.0 * dt_ * r;
            }
        } else {
            for (int i = 0; i < n; ++i) {
                const double r = p_.k * (ipow(v[i], ord_.m) - ipow(u[i], ord_.n));
                u[i] += dt_ * ord_.n * r;
                v[i] -= dt_ * ord_.m * r;
            }
        }
        diffuse(fu_, lam_u_, u);
        diffuse(fv_, lam_v_, v);
    }

    // linearized reaction about a frozen profile vbar
    void step_linearized(Field& U, Field& V, const Field& vbar) const {
        const int n = g_.n;
        for (int i = 0; i < n; ++i) {
            const double ru = p_.k * (2.0 * vbar[i] * V[i] - U[i]);
            const double rv = p_.k * (2.0 * U[i] - 4.0 * vbar[i] * V[i]);
            U[i] += dt_ * ru;
            V[i] += dt_ * rv;
        }
        diffuse(fu_, lam_u_, U);
        diffuse(fv_, lam_v_, V);
    }

  private:
    void build(TridiagFactor& f, double lam) {
        const size_t n = static_cast<size_t>(g_.n);
        std::vector<double> lo(n, -lam), di(n, 1.0 + 2.0 * lam), up(n, -lam);
        if (g_.bc == Bc::periodic) {
            f.init_cyclic(lo, di, up, -lam, -lam);
        } else {
            up[0] = -2.0 * lam;
            lo[n - 1] = -2.0 * lam;
            f.init(lo, di, up);
        }
    }

    // Implicit diffusion in residual form: solve (I - lam D) delta = lam D q
    // and add delta. The stencil vanishes bitwise on constant plateaus, so the
    // solver cannot seed growth there; front data whose far state is unstable
    // would otherwise ignite on elimination roundoff within a few e-folds.
    void diffuse(const TridiagFactor& f, double lam, Field& q) const {
        const int n = g_.n;
        auto& r = scratch_;
        if (g_.bc == Bc::periodic) {
            r[0] = lam * (q[n - 1] - 2.0 * q[0] + q[1]);
            r[static_cast<size_t>(n - 1)] = lam * (q[n - 2] - 2.0 * q[n - 1] + q[0]);
        } else {
            r[0] = 2.0 * lam * (q[1] - q[0]);
            r[static_cast<size_t>(n - 1)] = 2.0 * lam * (q[n - 2] - q[n - 1]);
        }
        for (int i = 1; i + 1 < n; ++i)
            r[static_cast<size_t>(i)] = lam * (q[i - 1] - 2.0 * q[i] + q[i + 1]);
        f.solve(r);
        for (int i = 0; i < n; ++i)
            q[i] += r[static_cast<size_t>(i)];
    }

    Grid1D g_;
    Params p_;
    double dt_;
    Orders ord_;
    double lam_u_, lam_v_;
    mutable std::vector<double> scratch_;
    TridiagFactor fu_, fv_;
};

Trajectory run_imex(const State& initial, const Params& p, std::span<const double> output_times,
                    const SimOptions& opts) {
    validate(p);
    check_state(initial, opts.enforce_positivity, opts.tol_pos);
    if (output_times.empty())
        throw ConfigError("simulate: no output times requested");
    for (size_t i = 0; i + 1 < output_times.size(); ++i)
        if (output_times[i + 1] < output_times[i])
            throw ConfigError("simulate: output times must be nondecreasing");
    if (output_times.front() < initial.t - 1e-12)
        throw ConfigError("simulate: output times precede the initial state");

    Trajectory traj;
    traj.params = p;
    State cur = initial;

    for (double tt : output_times) {
        const double interval = tt - cur.t;
        if (interval <= 1e-13 * std::max(1.0, std::abs(tt))) {
            traj.snapshots.push_back(cur);
            continue;
        }
        double cap_u = 0.0, cap_v = 0.0;
        amplitude_caps(cur, p, opts.enforce_positivity, cap_u, cap_v);
        const double dt_target =
            opts.fixed_dt ? *opts.fixed_dt : stable_dt(p, cap_u, cap_v, opts.safety);
        const long steps = std::max(1L, static_cast<long>(std::ceil(interval / dt_target - 1e-9)));
        const double dt = interval / static_cast<double>(steps);
        const double t_start = cur.t;

        ImexStepper st(cur.u.grid, p, dt);
        for (long s = 0; s < steps; ++s) {
            st.step(cur.u, cur.v);
            cur.t = (s + 1 == steps) ? tt : t_start + static_cast<double>(s + 1) * dt;
            check_state(cur, opts.enforce_positivity, opts.tol_pos);
        }
        traj.dt = std::max(traj.dt, dt);
        traj.snapshots.push_back(cur);
    }
    return traj;
}

} // namespace

void validate(const Params& p) {
    if (!(p.a > 0.0) || !(p.b > 0.0) || !(p.k > 0.0))
        throw ConfigError("params: a, b, k must be positive");
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.k))
        throw ConfigError("params: non-finite coefficient");
    if (p.orders) {
        if (p.orders->n < 1 || p.orders->m < 1)
            throw ConfigError("params: reaction orders must be >= 1");
        if (p.orders->n + p.orders->m < 3)
            throw ConfigError("params: reaction orders must satisfy n + m >= 3");
    }
}

void rd_rhs(const State& s, const Params& p, Field& du, Field& dv) {
    const Orders o = orders_of(p);
    du = deriv2(s.u);
    dv = deriv2(s.v);
    const int n = s.u.size();
    for (int i = 0; i < n; ++i) {
        const double r = p.k * (ipow(s.v[i], o.m) - ipow(s.u[i], o.n));
        du[i] = p.a * du[i] + o.n * r;
        dv[i] = p.b * dv[i] - o.m * r;
    }
}

State step_rd(const State& s, const Params& p, double dt, const StepOptions& opts) {
    validate(p);
    if (!(dt > 0.0))
        throw ConfigError("step_rd: dt must be positive");
    check_state(s, opts.enforce_positivity, opts.tol_pos);
    State out = s;
    ImexStepper st(s.u.grid, p, dt);
    st.step(out.u, out.v);
    out.t = s.t + dt;
    check_state(out, opts.enforce_positivity, opts.tol_pos);
    return out;
}

Trajectory simulate_rd(const State& initial, const Params& p,
                       std::span<const double> output_times, const SimOptions& opts) {
    return run_imex(initial, p, output_times, opts);
}

Trajectory simulate_rdnm(const State& initial, const Params& p,
                         std::span<const double> output_times, const SimOptions& opts) {
    if (!p.orders)
        throw ConfigError("simulate_rdnm: reaction orders not set");
    return run_imex(initial, p, output_times, opts);
}

KineticPath simulate_kinetic_ode(double u0, double v0, const Params& p,
                                 std::span<const double> times) {
    validate(p);
    if (u0 < 0.0 || v0 < 0.0)
        throw ConfigError("kinetic ode: negative initial data");
    if (times.empty())
        throw ConfigError("kinetic ode: no output times");
    for (size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i + 1] > times[i]))
            throw ConfigError("kinetic ode: times must be strictly increasing");

    const Orders o = orders_of(p);
    using Y = std::array<double, 2>;
    auto rhs = [&](const Y& y, Y& dy, double) {
        const double r = p.k * (ipow(y[1], o.m) - ipow(y[0], o.n));
        dy[0] = o.n * r;
        dy[1] = -o.m * r;
    };

    KineticPath path;
    auto observer = [&](const Y& y, double t) {
        path.times.push_back(t);
        path.u.push_back(y[0]);
        path.v.push_back(y[1]);
    };

    Y y{u0, v0};
    namespace ode = boost::numeric::odeint;
    ode::runge_kutta_cash_karp54<Y> base;
    auto ctrl = ode::make_controlled(1e-12, 1e-12, base);
    ode::integrate_times(ctrl, rhs, y, times.begin(), times.end(), 1e-6, observer);
    return path;
}

std::pair<double, double> equilibrium_from_data(double u0, double v0) {
    if (u0 < 0.0 || v0 < 0.0)
        throw ConfigError("equilibrium_from_data: negative data");
    const double mass = 2.0 * u0 + v0;
    const double vs = 0.25 * (-1.0 + std::sqrt(1.0 + 8.0 * mass));
    return {vs * vs, vs};
}

EnvelopeReport ode_envelope_check(const Trajectory& traj) {
    if (traj.snapshots.empty())
        throw ConfigError("envelope check: empty trajectory");
    const State& s0 = traj.snapshots.front();
    const double u_hi0 = std::max(max_val(s0.u), 0.0);
    const double v_hi0 = std::max(max_val(s0.v), 0.0);
    const double u_lo0 = std::max(min_val(s0.u), 0.0);
    const double v_lo0 = std::max(min_val(s0.v), 0.0);

    // strictly increasing relative times with a map back to snapshots
    std::vector<double> ts;
    std::vector<size_t> slot(traj.snapshots.size());
    for (size_t j = 0; j < traj.snapshots.size(); ++j) {
        const double tr = traj.snapshots[j].t - s0.t;
        if (ts.empty() || tr > ts.back() + 1e-14 * std::max(1.0, tr))
            ts.push_back(tr);
        slot[j] = ts.size() - 1;
    }
    KineticPath hi = simulate_kinetic_ode(u_hi0, v_hi0, traj.params, ts);
    KineticPath lo = simulate_kinetic_ode(u_lo0, v_lo0, traj.params, ts);

    EnvelopeReport rep;
    const double delta = v_lo0;
    rep.barrier = (delta > 0.0) ? 2.0 * delta / (1.0 + std::sqrt(1.0 + 8.0 * delta)) : 0.0;

    double wu_hi = std::numeric_limits<double>::infinity();
    double wv_hi = wu_hi, wu_lo = wu_hi, wv_lo = wu_hi, wbar = wu_hi;
    for (size_t j = 0; j < traj.snapshots.size(); ++j) {
        const State& s = traj.snapshots[j];
        const size_t q = slot[j];
        wu_hi = std::min(wu_hi, hi.u[q] - max_val(s.u));
        wv_hi = std::min(wv_hi, hi.v[q] - max_val(s.v));
        wu_lo = std::min(wu_lo, min_val(s.u) - lo.u[q]);
        wv_lo = std::min(wv_lo, min_val(s.v) - lo.v[q]);
        wbar = std::min(wbar, min_val(s.v) - rep.barrier);
    }
    rep.worst_upper_u = wu_hi;
    rep.worst_upper_v = wv_hi;
    rep.worst_lower_u = wu_lo;
    rep.worst_lower_v = wv_lo;
    rep.worst_barrier_margin = wbar;
    return rep;
}

Trajectory simulate_linearized(const Trajectory& v_path, const Field& U0, const Field& V0,
                               double t1, std::span<const double> output_times,
                               const SimOptions& opts) {
    if (v_path.snapshots.empty())
        throw ConfigError("linearized: empty carrier trajectory");
    const Params& p = v_path.params;
    validate(p);
    if (!(U0.grid == v_path.snapshots.front().u.grid) || !(V0.grid == U0.grid))
        throw ConfigError("linearized: field grids do not match the carrier");
    if (output_times.empty())
        throw ConfigError("linearized: no output times");
    const double t_end = output_times.back();
    if (t1 < v_path.snapshots.front().t - 1e-12 || t_end > v_path.snapshots.back().t + 1e-12)
        throw ConfigError("linearized: requested window not covered by the carrier");

    double vmax = 0.0;
    for (const State& s : v_path.snapshots)
        vmax = std::max(vmax, max_abs(s.v));
    const double dt_target =
        opts.fixed_dt ? *opts.fixed_dt : opts.safety / (p.k * (1.0 + 4.0 * vmax));

    // piecewise-linear v(x, t) between carrier snapshots
    auto v_at = [&](double t, Field& out) {
        const auto& sn = v_path.snapshots;
        size_t j = 0;
        while (j + 2 < sn.size() && sn[j + 1].t <= t)
            ++j;
        const double span = sn[j + 1].t - sn[j].t;
        const double th = (span > 0.0) ? std::clamp((t - sn[j].t) / span, 0.0, 1.0) : 0.0;
        for (int i = 0; i < out.size(); ++i)
            out[i] = (1.0 - th) * sn[j].v[i] + th * sn[j + 1].v[i];
    };

    Trajectory traj;
    traj.params = p;
    traj.scheme = "imex_euler_linearized";
    State cur{U0, V0, t1};
    Field vbar = make_field(U0.grid);

    for (double tt : output_times) {
        const double interval = tt - cur.t;
        if (interval <= 1e-13 * std::max(1.0, std::abs(tt))) {
            traj.snapshots.push_back(cur);
            continue;
        }
        const long steps = std::max(1L, static_cast<long>(std::ceil(interval / dt_target - 1e-9)));
        const double dt = interval / static_cast<double>(steps);
        const double t_start = cur.t;
        ImexStepper st(U0.grid, p, dt);
        for (long s = 0; s < steps; ++s) {
            v_at(cur.t, vbar);
            st.step_linearized(cur.u, cur.v, vbar);
            cur.t = (s + 1 == steps) ? tt : t_start + static_cast<double>(s + 1) * dt;
            if (!all_finite(cur.u) || !all_finite(cur.v))
                throw IntegrationError("linearized: non-finite field value", cur.t);
        }
        traj.dt = std::max(traj.dt, dt);
        traj.snapshots.push_back(cur);
    }
    return traj;
}

namespace {

double sech2(double z) {
    const double a = std::abs(z);
    if (a > 350.0) {
        const double e = 2.0 * std::exp(-a);
        return e * e;
    }
    const double s = 1.0 / std::cosh(a);
    return s * s;
}

// Fisher-KPP front profile: phi'' + c phi' + 3 phi (1 - phi) = 0,
// phi(-inf) = 1, phi(+inf) = 0, integrated from the unstable manifold at 1.
struct WaveProfile {
    double xi_start = 0.0;
    double h = 0.0;
    std::vector<double> phi;

    double eval(double xi) const {
        if (xi <= xi_start)
            return 1.0;
        const double s = (xi - xi_start) / h;
        const auto i = static_cast<size_t>(s);
        if (i + 1 >= phi.size())
            return 0.0;
        const double w = s - static_cast<double>(i);
        return (1.0 - w) * phi[i] + w * phi[i + 1];
    }
};

WaveProfile shoot_wave(double c) {
    const double lam_unstable = 0.5 * (-c + std::sqrt(c * c + 12.0));
    const double delta = 1e-8;
    const double h = 1e-3;

    WaveProfile prof;
    prof.h = h;
    double phi = 1.0 - delta;
    double psi = -delta * lam_unstable;
    prof.phi.push_back(phi);

    auto f = [c](double ph, double ps, double& dph, double& dps) {
        dph = ps;
        dps = -c * ps - 3.0 * ph * (1.0 - ph);
    };

    const long max_steps = 400000;
    for (long s = 0; s < max_steps && phi > 1e-14; ++s) {
        double k1p, k1q, k2p, k2q, k3p, k3q, k4p, k4q;
        f(phi, psi, k1p, k1q);
        f(phi + 0.5 * h * k1p, psi + 0.5 * h * k1q, k2p, k2q);
        f(phi + 0.5 * h * k2p, psi + 0.5 * h * k2q, k3p, k3q);
        f(phi + h * k3p, psi + h * k3q, k4p, k4q);
        phi += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        psi += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        if (phi < 0.0)
            phi = 0.0;
        prof.phi.push_back(phi);
    }

    // place the half level at xi = 0
    size_t ih = 0;
    while (ih + 1 < prof.phi.size() && prof.phi[ih] > 0.5)
        ++ih;
    prof.xi_start = -static_cast<double>(ih) * h;
    return prof;
}

} // namespace

State fisher_kpp_state(FisherKind kind, std::optional<double> c, const Grid1D& g,
                       double center_frac) {
    const double speed = c.value_or(2.0 * std::sqrt(3.0));
    State s;
    s.t = 0.0;
    Field z = make_field(g);

    if (kind == FisherKind::pulse) {
        const double xc = (center_frac < 0.0 ? 0.5 : center_frac) * g.length;
        const double r3h = 0.5 * std::sqrt(3.0);
        for (int i = 0; i < g.n; ++i)
            z[i] = 1.0 - 1.5 * sech2(r3h * (g.x(i) - xc));
    } else {
        if (speed < 2.0 * std::sqrt(3.0) - 1e-12)
            throw ConfigError("fisher wave: speeds below 2*sqrt(3) oscillate out of the cone");
        const WaveProfile prof = shoot_wave(speed);
        const double xf = (center_frac < 0.0 ? 0.25 : center_frac) * g.length;
        for (int i = 0; i < g.n; ++i)
            z[i] = prof.eval(g.x(i) - xf);
    }

    s.u = make_field(g);
    s.v = make_field(g);
    for (int i = 0; i < g.n; ++i) {
        s.u[i] = 1.0 - 0.75 * z[i];
        s.v[i] = -1.0 + 1.5 * z[i];
    }
    return s;
}

ScalarTrajectory simulate_effective_diffusion(const Field& w0, const Params& p,
                                              std::span<const double> output_times,
                                              const SimOptions& opts) {
    validate(p);
    if (!all_finite(w0))
        throw IntegrationError("effective diffusion: non-finite initial data", 0.0);
    if (min_val(w0) < -opts.tol_pos)
        throw PositivityError("effective diffusion: negative initial data", 0.0);
    if (output_times.empty())
        throw ConfigError("effective diffusion: no output times");

    const Grid1D& g = w0.grid;
    const int n = g.n;
    ScalarTrajectory traj;
    traj.params = p;

    Field w = w0;
    double t = 0.0; // w0 is the state at t = 0

    const double total = output_times.back();
    const double dt_default = std::clamp(total / 4000.0, 1e-3, 0.25);

    std::vector<double> dcoef(static_cast<size_t>(n));
    std::vector<double> lo(static_cast<size_t>(n)), di(static_cast<size_t>(n)),
        up(static_cast<size_t>(n)), resid(static_cast<size_t>(n));

    for (double tt : output_times) {
        const double interval = tt - t;
        if (interval <= 1e-13 * std::max(1.0, std::abs(tt))) {
            traj.times.push_back(tt);
            traj.w.push_back(w);
            continue;
        }
        const double dt_target = opts.fixed_dt ? *opts.fixed_dt : dt_default;
        const long steps = std::max(1L, static_cast<long>(std::ceil(interval / dt_target - 1e-9)));
        const double dt = interval / static_cast<double>(steps);
        const double r = dt / (g.dx * g.dx);
        const double t_start = t;

        for (long s = 0; s < steps; ++s) {
            for (int i = 0; i < n; ++i)
                dcoef[static_cast<size_t>(i)] =
                    p.a + (p.b - p.a) / std::sqrt(1.0 + 8.0 * std::max(w[i], 0.0));

            TridiagFactor fac;
            if (g.bc == Bc::periodic) {
                for (int i = 0; i < n; ++i) {
                    const double dp = 0.5 * (dcoef[static_cast<size_t>(i)] +
                                             dcoef[static_cast<size_t>((i + 1) % n)]);
                    const double dm = 0.5 * (dcoef[static_cast<size_t>(i)] +
                                             dcoef[static_cast<size_t>((i + n - 1) % n)]);
                    lo[static_cast<size_t>(i)] = -r * dm;
                    di[static_cast<size_t>(i)] = 1.0 + r * (dm + dp);
                    up[static_cast<size_t>(i)] = -r * dp;
                }
                const double corner = -r * 0.5 * (dcoef[0] + dcoef[static_cast<size_t>(n - 1)]);
                fac.init_cyclic(lo, di, up, corner, corner);
            } else {
                for (int i = 1; i < n - 1; ++i) {
                    const double dp = 0.5 * (dcoef[static_cast<size_t>(i)] +
                                             dcoef[static_cast<size_t>(i + 1)]);
                    const double dm = 0.5 * (dcoef[static_cast<size_t>(i)] +
                                             dcoef[static_cast<size_t>(i - 1)]);
                    lo[static_cast<size_t>(i)] = -r * dm;
                    di[static_cast<size_t>(i)] = 1.0 + r * (dm + dp);
                    up[static_cast<size_t>(i)] = -r * dp;
                }
                const double dp0 = 0.5 * (dcoef[0] + dcoef[1]);
                const double dmN = 0.5 * (dcoef[static_cast<size_t>(n - 1)] +
                                          dcoef[static_cast<size_t>(n - 2)]);
                di[0] = 1.0 + 2.0 * r * dp0;
                up[0] = -2.0 * r * dp0;
                lo[0] = 0.0;
                di[static_cast<size_t>(n - 1)] = 1.0 + 2.0 * r * dmN;
                lo[static_cast<size_t>(n - 1)] = -2.0 * r * dmN;
                up[static_cast<size_t>(n - 1)] = 0.0;
                fac.init(lo, di, up);
            }
            // residual form, matching the system stepper: the fluxes vanish
            // bitwise on constant states, so the solve cannot disturb them
            for (int i = 0; i < n; ++i) {
                const size_t si = static_cast<size_t>(i);
                resid[si] = -lo[si] * (w[i == 0 ? n - 1 : i - 1] - w[i]) -
                            up[si] * (w[i == n - 1 ? 0 : i + 1] - w[i]);
            }
            fac.solve(resid);
            for (int i = 0; i < n; ++i)
                w[i] += resid[static_cast<size_t>(i)];
            t = (s + 1 == steps) ? tt : t_start + static_cast<double>(s + 1) * dt;
            if (!all_finite(w))
                throw IntegrationError("effective diffusion: non-finite value", t);
            if (min_val(w) < -opts.tol_pos)
                throw PositivityError("effective diffusion: negativity beyond tolerance", t);
        }
        traj.dt = std::max(traj.dt, dt);
        traj.times.push_back(tt);
        traj.w.push_back(w);
    }
    return traj;
}

Field extract_rho(const State& s) {
    Field r = make_field(s.u.grid);
    for (int i = 0; i < r.size(); ++i)
        r[i] = s.u[i] - s.v[i] * s.v[i];
    return r;
}

Field extract_w(const State& s) {
    Field r = make_field(s.u.grid);
    for (int i = 0; i < r.size(); ++i)
        r[i] = 2.0 * s.u[i] + s.v[i];
    return r;
}

} // namespace rdlab
