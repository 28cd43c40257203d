#include "rdlab/structures.hpp"
#include "rdlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace rdlab {

namespace {

constexpr double tol_ineq = 1e-10;  // relative slack on pointwise inequalities
constexpr double floor_den = 1e-14; // denominator floor in measured-constant ratios
constexpr double conc_floor = 1e-12;

void require_base_orders(const Params& p, const char* what) {
    if (p.orders && !(p.orders->n == 1 && p.orders->m == 2))
        throw ConfigError(std::string(what) + ": requires the quadratic base kinetics");
}

// all first/second derivatives plus time derivatives from the PDE right-hand
// sides; fluxes must never use finite differencing in t
struct Jet {
    Field ux, vx, uxx, vxx;
    Field rho, rhox;
    Field w, wx, wxx;
    Field ut, vt, wt;
};

Jet make_jet(const State& s, const Params& p) {
    Jet j;
    j.ux = deriv1(s.u);
    j.vx = deriv1(s.v);
    j.uxx = deriv2(s.u);
    j.vxx = deriv2(s.v);
    j.rho = extract_rho(s);
    j.rhox = deriv1(j.rho);
    j.w = extract_w(s);
    j.wx = deriv1(j.w);
    j.wxx = deriv2(j.w);
    j.ut = make_field(s.u.grid);
    j.vt = make_field(s.u.grid);
    j.wt = make_field(s.u.grid);
    for (int i = 0; i < s.u.size(); ++i) {
        j.ut[i] = p.a * j.uxx[i] - p.k * j.rho[i];
        j.vt[i] = p.b * j.vxx[i] + 2.0 * p.k * j.rho[i];
        j.wt[i] = p.b * j.wxx[i] + 2.0 * (p.a - p.b) * j.uxx[i];
    }
    return j;
}

void check_alphabet(const Params& p, const StructureParams& sp) {
    if (!(sp.alpha > 0.0) || !(sp.beta > 0.0))
        throw StructureParamError("alpha and beta must be positive");
    const double cA = p.a + p.k * sp.alpha - p.k * sp.beta / 2.0;
    const double hB = p.b + p.k * sp.beta / 2.0;
    if (!(cA * cA < 4.0 * p.k * p.a * sp.alpha))
        throw StructureParamError("(a + k alpha - k beta/2)^2 < 4 k a alpha fails");
    if (!(hB * hB < 4.0 * p.k * p.b * sp.beta))
        throw StructureParamError("(b + k beta/2)^2 < 4 k b beta fails");
}

EDSField primary_from_jet(const State& s, const Params& p, const Jet& j) {
    EDSField out;
    out.kind = EdsKind::primary;
    out.e = make_field(s.u.grid);
    out.f = make_field(s.u.grid);
    out.d = make_field(s.u.grid);
    for (int i = 0; i < s.u.size(); ++i) {
        const double u = s.u[i], v = s.v[i];
        out.e[i] = 0.5 * u * u + v * v * v / 6.0;
        out.f[i] = p.a * u * j.ux[i] + 0.5 * p.b * v * v * j.vx[i];
        out.d[i] = p.a * j.ux[i] * j.ux[i] + p.b * v * j.vx[i] * j.vx[i] +
                   p.k * j.rho[i] * j.rho[i];
    }
    return out;
}

EDSField secondary_from_jet(const State& s, const Params& p, const StructureParams& sp,
                            const Jet& j) {
    check_alphabet(p, sp);
    const double al = sp.alpha, be = sp.beta, k = p.k;
    const double cA = p.a + k * al - k * be / 2.0;
    const double cB = 2.0 * (p.b + k * be / 2.0);
    EDSField out;
    out.kind = EdsKind::secondary;
    out.params_used = sp;
    out.e = make_field(s.u.grid);
    out.f = make_field(s.u.grid);
    out.d = make_field(s.u.grid);
    for (int i = 0; i < s.u.size(); ++i) {
        const double v = s.v[i];
        const double ux = j.ux[i], vx = j.vx[i], uxx = j.uxx[i], vxx = j.vxx[i];
        const double rho = j.rho[i], rhox = j.rhox[i];
        out.e[i] = 0.5 * al * ux * ux + 0.5 * be * v * vx * vx + 0.5 * rho * rho;
        out.f[i] = al * ux * j.ut[i] + be * v * vx * j.vt[i] - (be * p.b / 6.0) * vx * vx * vx +
                   0.5 * be * k * rho * rhox;
        out.d[i] = al * p.a * uxx * uxx + be * p.b * v * vxx * vxx +
                   k * (1.0 + 4.0 * v) * rho * rho + 0.5 * be * k * rhox * rhox -
                   cA * rho * uxx + cB * rho * v * vxx;
    }
    return out;
}

Field dtilde0_from_jet(const State& s, const Params& p, const StructureParams& sp,
                       const Jet& j) {
    Field d0 = make_field(s.u.grid);
    const double g = sp.gamma, k = p.k;
    for (int i = 0; i < s.u.size(); ++i) {
        const double v = s.v[i];
        d0[i] = g * (j.uxx[i] * j.uxx[i] + v * j.vxx[i] * j.vxx[i] +
                     k * (1.0 + 4.0 * v) * j.rho[i] * j.rho[i]) +
                0.5 * sp.beta * k * j.rhox[i] * j.rhox[i];
    }
    return d0;
}

Field flux0_from_jet(const State& s, const Params& p, const StructureParams& sp,
                     const Jet& j) {
    Field f0 = make_field(s.u.grid);
    for (int i = 0; i < s.u.size(); ++i)
        f0[i] = sp.alpha * j.ux[i] * j.ut[i] + sp.beta * s.v[i] * j.vx[i] * j.vt[i] +
                0.5 * sp.beta * p.k * j.rho[i] * j.rhox[i];
    return f0;
}

// coercivity targets of the theta-augmented triples; c is the calibrated
// constant, slack is relative
bool below(double lhs, double c, double target, double scale) {
    const double rhs = c * target;
    return lhs < rhs - tol_ineq * (1.0 + std::abs(lhs) + std::abs(rhs) + scale);
}

struct ThetaPair {
    EDSField first, second;
};

ThetaPair theta_from_jet(const State& s, const Params& p, const StructureParams& sp,
                         const Jet& j, bool check_bounds) {
    const double th = sp.theta;
    if (th < 0.0)
        throw StructureParamError("theta must be nonnegative");
    const double nu2 = 2.0 * (p.a - p.b);

    Jet const& J = j;
    EDSField base = primary_from_jet(s, p, J);
    EDSField til = secondary_from_jet(s, p, sp, J);

    ThetaPair out;
    out.first = std::move(base);
    out.first.kind = EdsKind::theta_first;
    out.first.params_used = sp;
    out.second = std::move(til);
    out.second.kind = EdsKind::theta_second;
    out.second.params_used = sp;

    for (int i = 0; i < s.u.size(); ++i) {
        const double w = J.w[i], wx = J.wx[i], wxx = J.wxx[i];
        out.first.e[i] += 0.5 * th * w * w;
        out.first.f[i] += th * p.b * w * wx + th * nu2 * w * J.ux[i];
        out.first.d[i] += th * p.b * wx * wx + th * nu2 * wx * J.ux[i];
        out.second.e[i] += 0.5 * th * wx * wx;
        out.second.f[i] += th * wx * J.wt[i];
        out.second.d[i] += th * p.b * wxx * wxx + th * nu2 * wxx * J.uxx[i];
    }

    if (check_bounds && min_val(s.u) >= -tol_ineq && min_val(s.v) >= -tol_ineq) {
        const double c = sp.theta_c;
        for (int i = 0; i < s.u.size(); ++i) {
            const double u = s.u[i], v = s.v[i];
            const double ux = J.ux[i], vx = J.vx[i], uxx = J.uxx[i], vxx = J.vxx[i];
            const double rho = J.rho[i], rhox = J.rhox[i];
            const double grad = ux * ux + (1.0 + v) * vx * vx + rho * rho;
            if (below(out.first.e[i], c, u * u + (1.0 + v) * v * v, 0.0) ||
                below(out.first.d[i], c, grad, 0.0) || below(out.second.e[i], c, grad, 0.0) ||
                below(out.second.d[i], c,
                      uxx * uxx + (1.0 + v) * vxx * vxx + rhox * rhox + (1.0 + v) * rho * rho,
                      0.0))
                throw StructureParamError("theta too large: coercivity bound fails pointwise");
        }
    }
    return out;
}

} // namespace

double gamma_max_bisect(const Params& p, double alpha, double beta) {
    validate(p);
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw StructureParamError("alpha and beta must be positive");
    const double cA = p.a + p.k * alpha - p.k * beta / 2.0;
    const double cB = 2.0 * (p.b + p.k * beta / 2.0);
    auto feasible = [&](double g) {
        return cA * cA <= 4.0 * p.k * (alpha * p.a - g) * (1.0 - g) &&
               cB * cB <= 16.0 * p.k * (beta * p.b - g) * (1.0 - g);
    };
    if (!feasible(0.0))
        return 0.0;
    double lo = 0.0;
    double hi = std::min({alpha * p.a, beta * p.b, 1.0});
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

StructureParams default_structure_params(const Params& p) {
    validate(p);
    StructureParams sp;
    sp.alpha = (p.a + p.b) / p.k;
    sp.beta = 2.0 * p.b / p.k;
    const double gm = gamma_max_bisect(p, sp.alpha, sp.beta);
    if (!(gm > 0.0))
        throw StructureParamError("no positive gamma for the default alpha, beta");
    sp.gamma = 0.9 * gm;
    return sp;
}

StructureParams calibrate_theta(const Params& p, StructureParams sp, std::uint64_t seed) {
    require_base_orders(p, "calibrate_theta");
    check_alphabet(p, sp);

    // probe set: random trigonometric polynomials shifted to be admissible,
    // spanning small and large amplitudes and several distances from v = 0
    const Grid1D g = make_grid(20.0, 512, Bc::periodic);
    std::mt19937_64 rng(seed);
    auto unit = [&] { return std::ldexp(static_cast<double>(rng() >> 11), -53); };
    const double amps[] = {0.25, 1.0, 4.0, 16.0};
    const double offs[] = {0.0, 0.02, 0.5};
    std::vector<State> probes;
    for (double A : amps) {
        for (double o : offs) {
            for (int rep = 0; rep < 3; ++rep) {
                State st;
                st.t = 0.0;
                st.u = make_field(g);
                st.v = make_field(g);
                for (Field* f : {&st.u, &st.v}) {
                    for (int m = 1; m <= 8; ++m) {
                        const double amp = A * (2.0 * unit() - 1.0) / std::sqrt(m);
                        const double ph = 2.0 * M_PI * unit();
                        for (int i = 0; i < g.n; ++i)
                            (*f)[i] += amp * std::cos(2.0 * M_PI * m * g.x(i) / g.length + ph);
                    }
                    const double mn = min_val(*f);
                    for (int i = 0; i < g.n; ++i)
                        (*f)[i] += o * A - mn;
                }
                probes.push_back(std::move(st));
            }
        }
    }

    std::vector<Jet> jets;
    jets.reserve(probes.size());
    for (const State& st : probes)
        jets.push_back(make_jet(st, p));

    // min ratio of each coercivity bound over the probe set; negative numerators
    // at negligible denominators disqualify the candidate outright
    auto measure_c = [&](double th) -> double {
        StructureParams cand = sp;
        cand.theta = th;
        cand.theta_c = 0.0;
        double c = std::numeric_limits<double>::infinity();
        for (size_t q = 0; q < probes.size(); ++q) {
            const ThetaPair tp = theta_from_jet(probes[q], p, cand, jets[q], false);
            const State& st = probes[q];
            const Jet& J = jets[q];
            for (int i = 0; i < g.n; ++i) {
                const double u = st.u[i], v = st.v[i];
                const double grad =
                    J.ux[i] * J.ux[i] + (1.0 + v) * J.vx[i] * J.vx[i] + J.rho[i] * J.rho[i];
                const double curv = J.uxx[i] * J.uxx[i] + (1.0 + v) * J.vxx[i] * J.vxx[i] +
                                    J.rhox[i] * J.rhox[i] + (1.0 + v) * J.rho[i] * J.rho[i];
                const double num[4] = {tp.first.e[i], tp.first.d[i], tp.second.e[i],
                                       tp.second.d[i]};
                const double den[4] = {u * u + (1.0 + v) * v * v, grad, grad, curv};
                for (int q4 = 0; q4 < 4; ++q4) {
                    if (den[q4] >= 1e-12) {
                        c = std::min(c, num[q4] / den[q4]);
                    } else if (num[q4] < -1e-12 * (1.0 + std::abs(den[q4]))) {
                        return -1.0;
                    }
                }
            }
        }
        return c;
    };

    for (int jexp = 0; jexp <= 30; ++jexp) {
        const double th = std::ldexp(1.0, -jexp);
        if (measure_c(th) >= 1e-6) {
            sp.theta = 0.5 * th;
            sp.theta_c = 0.5 * measure_c(sp.theta);
            return sp;
        }
    }
    throw StructureParamError("theta calibration found no admissible value");
}

EDSField eds_primary(const State& s, const Params& p) {
    require_base_orders(p, "eds_primary");
    validate(p);
    const Jet j = make_jet(s, p);
    return primary_from_jet(s, p, j);
}

EDSField eds_secondary(const State& s, const Params& p, const StructureParams& sp) {
    require_base_orders(p, "eds_secondary");
    validate(p);
    const Jet j = make_jet(s, p);
    return secondary_from_jet(s, p, sp, j);
}

std::pair<EDSField, EDSField> eds_theta(const State& s, const Params& p,
                                        const StructureParams& sp) {
    require_base_orders(p, "eds_theta");
    validate(p);
    const Jet j = make_jet(s, p);
    ThetaPair tp = theta_from_jet(s, p, sp, j, true);
    return {std::move(tp.first), std::move(tp.second)};
}

EDSField eds_boltzmann(const State& s, const Params& p) {
    require_base_orders(p, "eds_boltzmann");
    validate(p);
    const Field ux = deriv1(s.u), vx = deriv1(s.v);
    EDSField out;
    out.kind = EdsKind::boltzmann;
    out.e = make_field(s.u.grid);
    out.f = make_field(s.u.grid);
    out.d = make_field(s.u.grid);
    auto phi = [](double z) { return z * std::log(z) - z + 1.0; };
    for (int i = 0; i < s.u.size(); ++i) {
        if (!(s.u[i] > 0.0) || !(s.v[i] > 0.0))
            throw DomainError("boltzmann triple: nonpositive concentration");
        double u = s.u[i], v = s.v[i];
        if (u < conc_floor || v < conc_floor) {
            u = std::max(u, conc_floor);
            v = std::max(v, conc_floor);
            ++out.floored_points;
        }
        const double lu = std::log(u), lv = std::log(v);
        out.e[i] = phi(u) + phi(v);
        out.f[i] = p.a * lu * ux[i] + p.b * lv * vx[i];
        out.d[i] = p.a * ux[i] * ux[i] / u + p.b * vx[i] * vx[i] / v +
                   p.k * (2.0 * lv - lu) * (v * v - u);
    }
    return out;
}

EDSField eds_rdnm(const State& s, const Params& p) {
    validate(p);
    const int n = p.orders ? p.orders->n : 1;
    const int m = p.orders ? p.orders->m : 2;
    const Field ux = deriv1(s.u), vx = deriv1(s.v);
    EDSField out;
    out.kind = EdsKind::rdnm;
    out.e = make_field(s.u.grid);
    out.f = make_field(s.u.grid);
    out.d = make_field(s.u.grid);
    auto ipow = [](double x, int e) {
        double r = 1.0;
        for (int q = 0; q < e; ++q)
            r *= x;
        return r;
    };
    for (int i = 0; i < s.u.size(); ++i) {
        const double u = s.u[i], v = s.v[i];
        const double un = ipow(u, n), vm = ipow(v, m);
        out.e[i] = un * u / (n * (n + 1.0)) + vm * v / (m * (m + 1.0));
        out.f[i] = (p.a / n) * un * ux[i] + (p.b / m) * vm * vx[i];
        out.d[i] = p.a * ipow(u, n - 1) * ux[i] * ux[i] + p.b * ipow(v, m - 1) * vx[i] * vx[i] +
                   p.k * (un - vm) * (un - vm);
    }
    return out;
}

EDSField make_eds(const State& s, const Params& p, EdsKind kind, const StructureParams& sp) {
    switch (kind) {
    case EdsKind::primary:
        return eds_primary(s, p);
    case EdsKind::secondary:
        return eds_secondary(s, p, sp);
    case EdsKind::theta_first:
        return eds_theta(s, p, sp).first;
    case EdsKind::theta_second:
        return eds_theta(s, p, sp).second;
    case EdsKind::boltzmann:
        return eds_boltzmann(s, p);
    case EdsKind::rdnm:
        return eds_rdnm(s, p);
    }
    throw ConfigError("unknown structure kind");
}

ResidualReport balance_residual(const Trajectory& traj, EdsKind kind,
                                const StructureParams& sp) {
    const auto& sn = traj.snapshots;
    if (sn.size() < 3)
        throw ConfigError("balance residual: need at least 3 snapshots");
    const double h = sn[1].t - sn[0].t;
    if (!(h > 0.0))
        throw ConfigError("balance residual: snapshots not increasing in time");
    for (size_t j = 0; j + 1 < sn.size(); ++j)
        if (std::abs((sn[j + 1].t - sn[j].t) - h) > 1e-6 * h)
            throw ConfigError("balance residual: snapshot spacing not uniform");

    ResidualReport rep;
    rep.dt = h;
    rep.dx = sn[0].u.grid.dx;
    for (size_t j = 0; j + 1 < sn.size(); ++j) {
        const EDSField A = make_eds(sn[j], traj.params, kind, sp);
        const EDSField B = make_eds(sn[j + 1], traj.params, kind, sp);
        State mid;
        mid.t = 0.5 * (sn[j].t + sn[j + 1].t);
        mid.u = make_field(sn[j].u.grid);
        mid.v = make_field(sn[j].u.grid);
        for (int i = 0; i < mid.u.size(); ++i) {
            mid.u[i] = 0.5 * (sn[j].u[i] + sn[j + 1].u[i]);
            mid.v[i] = 0.5 * (sn[j].v[i] + sn[j + 1].v[i]);
        }
        const EDSField M = make_eds(mid, traj.params, kind, sp);
        const Field divf = deriv1(M.f);
        double worst = 0.0;
        for (int i = 0; i < mid.u.size(); ++i) {
            const double r = (B.e[i] - A.e[i]) / h - divf[i] + M.d[i];
            worst = std::max(worst, std::abs(r));
        }
        rep.norms.push_back(worst);
        rep.max_norm = std::max(rep.max_norm, worst);
    }
    return rep;
}

ResidualReport rho_residual(const Trajectory& traj, const Params& p) {
    require_base_orders(p, "rho_residual");
    const auto& sn = traj.snapshots;
    if (sn.size() < 2)
        throw ConfigError("rho residual: need at least 2 snapshots");
    const double h = sn[1].t - sn[0].t;
    if (!(h > 0.0))
        throw ConfigError("rho residual: snapshots not increasing in time");
    for (size_t j = 0; j + 1 < sn.size(); ++j)
        if (std::abs((sn[j + 1].t - sn[j].t) - h) > 1e-6 * h)
            throw ConfigError("rho residual: snapshot spacing not uniform");

    ResidualReport rep;
    rep.dt = h;
    rep.dx = sn[0].u.grid.dx;
    for (size_t j = 0; j + 1 < sn.size(); ++j) {
        const Field ra = extract_rho(sn[j]);
        const Field rb = extract_rho(sn[j + 1]);
        State mid;
        mid.t = 0.5 * (sn[j].t + sn[j + 1].t);
        mid.u = make_field(sn[j].u.grid);
        mid.v = make_field(sn[j].u.grid);
        for (int i = 0; i < mid.u.size(); ++i) {
            mid.u[i] = 0.5 * (sn[j].u[i] + sn[j + 1].u[i]);
            mid.v[i] = 0.5 * (sn[j].v[i] + sn[j + 1].v[i]);
        }
        const Field rho = extract_rho(mid);
        const Field rhoxx = deriv2(rho);
        const Field vx = deriv1(mid.v);
        const Field vxx = deriv2(mid.v);
        double worst = 0.0;
        for (int i = 0; i < mid.u.size(); ++i) {
            const double rhs = p.a * rhoxx[i] - p.k * (1.0 + 4.0 * mid.v[i]) * rho[i] +
                               2.0 * (p.a - p.b) * mid.v[i] * vxx[i] + 2.0 * p.a * vx[i] * vx[i];
            const double r = (rb[i] - ra[i]) / h - rhs;
            worst = std::max(worst, std::abs(r));
        }
        rep.norms.push_back(worst);
        rep.max_norm = std::max(rep.max_norm, worst);
    }
    return rep;
}

DposReport dpos_check(const State& s, const Params& p, const StructureParams& sp) {
    require_base_orders(p, "dpos_check");
    const Jet j = make_jet(s, p);
    const EDSField tilde = secondary_from_jet(s, p, sp, j);
    const Field d0 = dtilde0_from_jet(s, p, sp, j);
    DposReport rep;
    rep.gamma_used = sp.gamma;
    rep.gamma_max = gamma_max_bisect(p, sp.alpha, sp.beta);
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.u.size(); ++i)
        rep.min_margin = std::min(rep.min_margin, tilde.d[i] - d0[i]);
    return rep;
}

LocalizedSeries localized_energies(const Trajectory& traj, const Params& p, double T, double x0,
                                   std::optional<StructureParams> sp_in) {
    require_base_orders(p, "localized_energies");
    if (traj.snapshots.empty())
        throw ConfigError("localized energies: empty trajectory");
    if (!(T > 0.0))
        throw ConfigError("localized energies: T must be positive");
    const double t0 = traj.snapshots.front().t;
    const double t_last = traj.snapshots.back().t;
    if (t0 > 1e-9 || t_last < T - 1e-9 * std::max(1.0, T))
        throw ConfigError("localized energies: trajectory does not cover [0, T]");

    const StructureParams sp = sp_in ? *sp_in : default_structure_params(p);
    LocalizedSeries ls;
    ls.T = T;
    ls.C0 = std::max(2.0 * p.a, 1.5 * p.b);
    ls.eps = 1.0 / std::sqrt(ls.C0 * T);
    const Grid1D& g = traj.snapshots.front().u.grid;
    const WeightField wf = weight_chi(g, ls.eps, x0);
    ls.x0 = wf.x0;

    for (const State& s : traj.snapshots) {
        if (s.t > T + 1e-9 * std::max(1.0, T))
            break;
        const Jet j = make_jet(s, p);
        const EDSField prim = primary_from_jet(s, p, j);
        const EDSField tilde = secondary_from_jet(s, p, sp, j);
        const Field d0 = dtilde0_from_jet(s, p, sp, j);
        Field we = make_field(g), wd = make_field(g), wte = make_field(g), wtd = make_field(g);
        for (int i = 0; i < g.n; ++i) {
            we[i] = wf.chi[i] * prim.e[i];
            wd[i] = wf.chi[i] * prim.d[i];
            wte[i] = wf.chi[i] * tilde.e[i];
            wtd[i] = wf.chi[i] * d0[i];
        }
        ls.times.push_back(s.t);
        ls.E.push_back(integral(we));
        ls.D.push_back(integral(wd));
        ls.Etilde.push_back(integral(wte));
        ls.Dtilde.push_back(integral(wtd));
    }
    return ls;
}

namespace {

struct FluxMeasurement {
    double sup = 0.0;
    long points = 0;
};

FluxMeasurement measure_flux_internal(const Trajectory& traj, const Params& p,
                                      const StructureParams& sp) {
    FluxMeasurement fm;
    for (const State& s : traj.snapshots) {
        const Jet j = make_jet(s, p);
        const EDSField tilde = secondary_from_jet(s, p, sp, j);
        const Field d0 = dtilde0_from_jet(s, p, sp, j);
        const Field f0 = flux0_from_jet(s, p, sp, j);
        for (int i = 0; i < s.u.size(); ++i) {
            const double den = tilde.e[i] * d0[i];
            if (den >= floor_den) {
                fm.sup = std::max(fm.sup, f0[i] * f0[i] / den);
                ++fm.points;
            }
        }
    }
    return fm;
}

} // namespace

double measure_flux_constant(const Trajectory& traj, const Params& p,
                             const StructureParams& sp) {
    require_base_orders(p, "measure_flux_constant");
    return measure_flux_internal(traj, p, sp).sup;
}

GronwallConstants assemble_gronwall_constants(const Trajectory& traj, const Params& p,
                                              std::optional<StructureParams> sp_in) {
    require_base_orders(p, "assemble_gronwall_constants");
    const StructureParams sp = sp_in ? *sp_in : default_structure_params(p);
    if (!(sp.gamma > 0.0))
        throw StructureParamError("gronwall constants need a positive gamma");
    GronwallConstants gc;
    gc.gamma = sp.gamma;
    gc.C0 = std::max(2.0 * p.a, 1.5 * p.b);
    const FluxMeasurement fm = measure_flux_internal(traj, p, sp);
    gc.C1 = fm.sup;
    gc.c1_points = fm.points;
    gc.C2 = gc.C1 + p.b / 3.0 + 4.0 * p.b * p.b * p.b / (9.0 * p.k * sp.gamma);
    gc.C3 = std::exp(gc.C2 / gc.C0);
    gc.C4 = std::max({sp.alpha / (2.0 * p.a), sp.beta / (2.0 * p.b), 1.0 / (2.0 * p.k)});
    gc.C5 = 2.0 * std::exp(0.5) * gc.C3 * gc.C4;
    return gc;
}

GronwallReport gronwall_checks(const LocalizedSeries& ls, const GronwallConstants& gc) {
    if (ls.times.size() < 2)
        throw ConfigError("gronwall checks: series too short");
    if (std::abs(ls.times.front()) > 1e-9)
        throw ConfigError("gronwall checks: series must start at t = 0");
    const size_t last = ls.times.size() - 1;
    if (std::abs(ls.times[last] - ls.T) > 1e-6 * std::max(1.0, ls.T))
        throw ConfigError("gronwall checks: no sample at t = T");

    auto trapz = [&](auto value) {
        double acc = 0.0;
        for (size_t j = 0; j + 1 < ls.times.size(); ++j)
            acc += 0.5 * (value(j) + value(j + 1)) * (ls.times[j + 1] - ls.times[j]);
        return acc;
    };

    GronwallReport rep;
    const double E0 = ls.E.front();
    rep.lhs_first = ls.E[last] + 0.5 * trapz([&](size_t j) { return ls.D[j]; });
    rep.rhs_first = std::exp(0.5) * E0;
    rep.slack_first = rep.rhs_first - rep.lhs_first;
    rep.pass_first = rep.slack_first >= -tol_ineq * (1.0 + std::abs(rep.rhs_first));

    rep.lhs_second =
        ls.Etilde[last] +
        (0.5 / ls.T) * trapz([&](size_t j) { return ls.times[j] * ls.Dtilde[j]; });
    rep.rhs_second = (gc.C5 / ls.T) * E0;
    rep.slack_second = rep.rhs_second - rep.lhs_second;
    rep.pass_second = rep.slack_second >= -tol_ineq * (1.0 + std::abs(rep.rhs_second));
    return rep;
}

std::vector<double> ul_decay_series(const Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.snapshots.size());
    for (const State& s : traj.snapshots) {
        const Field ux = deriv1(s.u);
        const Field vx = deriv1(s.v);
        const Field rho = extract_rho(s);
        Field g = make_field(s.u.grid);
        for (int i = 0; i < g.size(); ++i)
            g[i] = ux[i] * ux[i] + vx[i] * vx[i] + std::abs(rho[i]);
        const double radius = std::max(std::sqrt(std::max(s.t, 0.0)), g.grid.dx);
        out.push_back(ul_norm(g, 1.0, radius).value);
    }
    return out;
}

SlavingSeries slaving_check(const Trajectory& traj, const Params& p) {
    require_base_orders(p, "slaving_check");
    SlavingSeries out;
    for (const State& s : traj.snapshots) {
        const Field rho = extract_rho(s);
        const Field vx = deriv1(s.v);
        const Field vxx = deriv2(s.v);
        double disc = 0.0;
        for (int i = 0; i < s.u.size(); ++i) {
            const double v = std::max(s.v[i], 0.0);
            const double ansatz = (2.0 * (p.a - p.b) * v * vxx[i] + 2.0 * p.a * vx[i] * vx[i]) /
                                  (p.k * (1.0 + 4.0 * v));
            disc = std::max(disc, std::abs(rho[i] - ansatz));
        }
        out.times.push_back(s.t);
        out.discrepancy.push_back(disc);
        out.rho_norm.push_back(max_abs(rho));
    }
    return out;
}

SweepReport inequality_sweep(const Trajectory& traj, const Params& p,
                             std::optional<StructureParams> sp_in) {
    require_base_orders(p, "inequality_sweep");
    const StructureParams sp = sp_in ? *sp_in : default_structure_params(p);
    SweepReport rep;
    rep.C0 = std::max(2.0 * p.a, 1.5 * p.b);
    rep.C4 = std::max({sp.alpha / (2.0 * p.a), sp.beta / (2.0 * p.b), 1.0 / (2.0 * p.k)});
    rep.flux_margin_min = std::numeric_limits<double>::infinity();
    rep.dpos_margin_min = std::numeric_limits<double>::infinity();
    rep.ordering_margin_min = std::numeric_limits<double>::infinity();

    for (const State& s : traj.snapshots) {
        const Jet j = make_jet(s, p);
        const EDSField prim = primary_from_jet(s, p, j);
        const EDSField tilde = secondary_from_jet(s, p, sp, j);
        const Field d0 = dtilde0_from_jet(s, p, sp, j);
        const Field f0 = flux0_from_jet(s, p, sp, j);
        for (int i = 0; i < s.u.size(); ++i) {
            const double ed = prim.e[i] * prim.d[i];
            const double f2 = prim.f[i] * prim.f[i];
            rep.flux_margin_min = std::min(rep.flux_margin_min, rep.C0 * ed - f2);
            if (ed >= floor_den)
                rep.flux_ratio_max = std::max(rep.flux_ratio_max, f2 / ed);
            rep.dpos_margin_min = std::min(rep.dpos_margin_min, tilde.d[i] - d0[i]);
            rep.ordering_margin_min =
                std::min(rep.ordering_margin_min, rep.C4 * prim.d[i] - tilde.e[i]);
            if (prim.d[i] >= floor_den)
                rep.ordering_ratio_max = std::max(rep.ordering_ratio_max, tilde.e[i] / prim.d[i]);
            const double den1 = tilde.e[i] * d0[i];
            if (den1 >= floor_den)
                rep.C1_measured = std::max(rep.C1_measured, f0[i] * f0[i] / den1);
            ++rep.points;
        }
        if (min_val(s.u) > 1e-8 && min_val(s.v) > 1e-8) {
            const EDSField bol = eds_boltzmann(s, p);
            for (int i = 0; i < s.u.size(); ++i) {
                const double den = bol.e[i] * bol.d[i] * std::log(2.0 + bol.e[i]);
                if (den >= floor_den)
                    rep.boltzmann_ratio_max =
                        std::max(rep.boltzmann_ratio_max, bol.f[i] * bol.f[i] / den);
            }
            ++rep.boltzmann_snapshots;
        }
    }
    return rep;
}

} // namespace rdlab
