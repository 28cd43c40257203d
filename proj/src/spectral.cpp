#include "rdlab/spectral.hpp"
#include "rdlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace rdlab {

Mat2 operator*(const Mat2& A, const Mat2& B) {
    Mat2 r;
    r(0, 0) = A(0, 0) * B(0, 0) + A(0, 1) * B(1, 0);
    r(0, 1) = A(0, 0) * B(0, 1) + A(0, 1) * B(1, 1);
    r(1, 0) = A(1, 0) * B(0, 0) + A(1, 1) * B(1, 0);
    r(1, 1) = A(1, 0) * B(0, 1) + A(1, 1) * B(1, 1);
    return r;
}

Mat2 operator+(const Mat2& A, const Mat2& B) {
    Mat2 r;
    for (int i = 0; i < 4; ++i)
        r.m[static_cast<size_t>(i)] = A.m[static_cast<size_t>(i)] + B.m[static_cast<size_t>(i)];
    return r;
}

Mat2 operator*(double s, const Mat2& A) {
    Mat2 r;
    for (int i = 0; i < 4; ++i)
        r.m[static_cast<size_t>(i)] = s * A.m[static_cast<size_t>(i)];
    return r;
}

KernelParams make_kernel_params(double a, double b, double k, double v_bar) {
    if (!(a > 0.0) || !(b > 0.0) || !(k > 0.0) || !(v_bar > 0.0))
        throw ConfigError("kernel params: a, b, k, v_bar must be positive");
    KernelParams kp;
    kp.a = a;
    kp.b = b;
    kp.k = k;
    kp.v_bar = v_bar;
    kp.k1 = k;
    kp.k2 = 4.0 * k * v_bar;
    kp.mu = 0.5 * (a + b);
    kp.nu = 0.5 * (a - b);
    kp.kappa = 0.5 * (kp.k1 + kp.k2);
    kp.ell = 0.5 * (kp.k1 - kp.k2);
    return kp;
}

Mat2 matrix_A(double xi, const KernelParams& kp) {
    const double x2 = xi * xi;
    Mat2 A;
    A(0, 0) = -kp.k1 - kp.a * x2;
    A(0, 1) = kp.k1;
    A(1, 0) = kp.k2;
    A(1, 1) = -kp.k2 - kp.b * x2;
    return A;
}

double delta(double xi, const KernelParams& kp) {
    const double q = kp.ell + kp.nu * xi * xi;
    return std::sqrt(kp.k1 * kp.k2 + q * q);
}

namespace {

// exp(tA) pieces with every exponent nonpositive: kappa + mu xi^2 >= Delta,
// so P = e^{-(kappa+mu xi^2)t} absorbs the growing half of cosh/sinh
struct SymPieces {
    double D = 0.0;   // Delta(xi)
    double z = 0.0;   // Delta t
    double Pem = 0.0; // P e^{-z}
    double Pch = 0.0; // P cosh z
    double Psh = 0.0; // P sinh z
    double Pshc = 0.0; // P sinh(z)/Delta, Taylor guarded near z = 0
};

SymPieces sym_pieces(double xi, double t, const KernelParams& kp) {
    SymPieces sp;
    const double s = kp.kappa + kp.mu * xi * xi;
    sp.D = delta(xi, kp);
    sp.z = sp.D * t;
    if (sp.z < 30.0) {
        const double P = std::exp(-s * t);
        sp.Pem = P * std::exp(-sp.z);
        sp.Pch = P * std::cosh(sp.z);
        sp.Psh = P * std::sinh(sp.z);
        sp.Pshc = (sp.z < 1e-6) ? P * t * (1.0 + sp.z * sp.z / 6.0) : sp.Psh / sp.D;
    } else {
        const double ep = std::exp((sp.D - s) * t);
        const double em = std::exp(-(sp.D + s) * t);
        sp.Pem = em;
        sp.Pch = 0.5 * (ep + em);
        sp.Psh = 0.5 * (ep - em);
        sp.Pshc = sp.Psh / sp.D;
    }
    return sp;
}

} // namespace

Mat2 expA_closed(double xi, double t, const KernelParams& kp) {
    if (t < 0.0)
        throw ConfigError("expA: t must be nonnegative");
    const SymPieces sp = sym_pieces(xi, t, kp);
    const double q = kp.ell + kp.nu * xi * xi;
    Mat2 B;
    B(0, 0) = -q;
    B(0, 1) = kp.k1;
    B(1, 0) = kp.k2;
    B(1, 1) = q;
    Mat2 r;
    r(0, 0) = sp.Pch + sp.Pshc * B(0, 0);
    r(0, 1) = sp.Pshc * B(0, 1);
    r(1, 0) = sp.Pshc * B(1, 0);
    r(1, 1) = sp.Pch + sp.Pshc * B(1, 1);
    return r;
}

SymbolActions symbol_actions(double xi, double t, const KernelParams& kp) {
    if (t < 0.0)
        throw ConfigError("symbol actions: t must be nonnegative");
    const SymPieces sp = sym_pieces(xi, t, kp);
    const double x2 = xi * xi;
    const double nux2 = kp.nu * x2;
    // Delta - kappa without subtraction: (Delta^2 - kappa^2)/(Delta + kappa)
    const double dmk = nux2 * (2.0 * kp.ell + nux2) / (sp.D + kp.kappa);
    const double common = sp.Pem + (dmk / sp.D) * sp.Psh;

    SymbolActions out;
    out.SM.x = common * kp.k1 - nux2 * sp.Pshc * kp.k1;
    out.SM.y = common * (-kp.k2) - nux2 * sp.Pshc * kp.k2;
    out.NS.x = common * (-1.0) + nux2 * sp.Pshc;
    out.NS.y = common * (1.0) + nux2 * sp.Pshc;
    // kappa(Delta-kappa) - ell nu xi^2 collapses to an O(nu^2 xi^4) quantity
    const double w = nux2 * nux2 *
                     (kp.kappa * sp.D + kp.kappa * kp.kappa - 2.0 * kp.ell * kp.ell -
                      kp.ell * nux2) /
                     ((sp.D + kp.kappa) * (sp.D + kp.kappa));
    out.NSM = -2.0 * (kp.kappa * sp.Pem + w * sp.Pshc);
    return out;
}

SpectralKernel sample_symbol(const KernelParams& kp, double t, std::vector<double> xi_grid) {
    if (t < 0.0)
        throw ConfigError("sample_symbol: t must be nonnegative");
    SpectralKernel sk;
    sk.params = kp;
    sk.t = t;
    sk.xi_grid = std::move(xi_grid);
    sk.matrices.reserve(sk.xi_grid.size());
    for (double xi : sk.xi_grid)
        sk.matrices.push_back(expA_closed(xi, t, kp));
    return sk;
}

namespace {

int channels_of(Projection p) {
    switch (p) {
    case Projection::full:
        return 4;
    case Projection::M_right:
    case Projection::N_left:
        return 2;
    case Projection::N_M:
        return 1;
    }
    return 0;
}

void check_symmetric(const std::vector<double>& x) {
    if (x.empty())
        throw ConfigError("kernel synthesis: empty x grid");
    const size_t n = x.size();
    for (size_t i = 0; i < n; ++i)
        if (std::abs(x[i] + x[n - 1 - i]) > 1e-9 * (1.0 + std::abs(x[i])))
            throw ConfigError("kernel synthesis: x grid must be symmetric about 0");
}

} // namespace

std::vector<double> make_kernel_xgrid(const KernelParams& kp, double t) {
    if (!(t > 0.0))
        throw ConfigError("kernel x grid: t must be positive");
    const double amax = std::max(kp.a, kp.b);
    const double amin = std::min(kp.a, kp.b);
    const double X = std::sqrt(4.0 * amax * t * std::log(1e13));
    const double dx = std::sqrt(amin * t) / 20.0;
    const long half = static_cast<long>(std::ceil(X / dx));
    if (half > 200000)
        throw ConfigError("kernel x grid: window too wide; reduce t or coarsen");
    std::vector<double> x(static_cast<size_t>(2 * half + 1));
    for (long i = 0; i <= 2 * half; ++i)
        x[static_cast<size_t>(i)] = static_cast<double>(i - half) * dx;
    return x;
}

KernelSlice kernel_synthesize(double t, const KernelParams& kp,
                              const std::vector<double>& x_grid, Projection proj, int m) {
    if (!(t > 0.0))
        throw ConfigError("kernel synthesis: t must be positive");
    if (m < 0 || m > 2)
        throw ConfigError("kernel synthesis: derivative order must be 0, 1, or 2");
    check_symmetric(x_grid);

    const double amin = std::min(kp.a, kp.b);
    const double Xi = std::sqrt(std::log(1e14) / (amin * t));
    double x_max = 0.0;
    for (double x : x_grid)
        x_max = std::max(x_max, std::abs(x));
    double dxi = (x_max > 0.0) ? M_PI / (4.0 * x_max) : Xi / 512.0;
    const long half = std::max(8L, static_cast<long>(std::ceil(Xi / dxi)));
    dxi = Xi / static_cast<double>(half);
    const long npts = 2 * half + 1;
    if (npts > 2000000 ||
        npts * static_cast<long>(x_grid.size()) > 2000000000L)
        throw ConfigError("kernel synthesis: quadrature infeasible for this t and window");

    const int nch = channels_of(proj);
    const size_t nx = x_grid.size();
    std::vector<std::complex<double>> acc(nx * static_cast<size_t>(nch), {0.0, 0.0});

    for (long jq = 0; jq < npts; ++jq) {
        const double xi = static_cast<double>(jq - half) * dxi;
        const double wq = ((jq == 0 || jq == npts - 1) ? 0.5 : 1.0) * dxi / (2.0 * M_PI);

        double ch[4] = {0.0, 0.0, 0.0, 0.0};
        if (proj == Projection::full) {
            const Mat2 S = expA_closed(xi, t, kp);
            for (int c = 0; c < 4; ++c)
                ch[c] = S.m[static_cast<size_t>(c)];
        } else {
            const SymbolActions act = symbol_actions(xi, t, kp);
            if (proj == Projection::M_right) {
                ch[0] = act.SM.x;
                ch[1] = act.SM.y;
            } else if (proj == Projection::N_left) {
                ch[0] = act.NS.x;
                ch[1] = act.NS.y;
            } else {
                ch[0] = act.NSM;
            }
        }

        // derivative as a symbol factor (i xi)^m
        std::complex<double> fac(wq, 0.0);
        for (int q = 0; q < m; ++q)
            fac *= std::complex<double>(0.0, xi);

        for (size_t ix = 0; ix < nx; ++ix) {
            const double ph = xi * x_grid[ix];
            const std::complex<double> e = fac * std::complex<double>(std::cos(ph), std::sin(ph));
            for (int c = 0; c < nch; ++c)
                acc[ix * static_cast<size_t>(nch) + static_cast<size_t>(c)] += e * ch[c];
        }
    }

    KernelSlice ks;
    ks.proj = proj;
    ks.t = t;
    ks.m = m;
    ks.x = x_grid;
    ks.dxi = dxi;
    ks.xi_max = Xi;
    ks.values.assign(nx, {0.0, 0.0, 0.0, 0.0});
    double max_re = 0.0, max_im = 0.0;
    for (size_t ix = 0; ix < nx; ++ix) {
        for (int c = 0; c < nch; ++c) {
            const std::complex<double> z = acc[ix * static_cast<size_t>(nch) + static_cast<size_t>(c)];
            ks.values[ix][static_cast<size_t>(c)] = z.real();
            max_re = std::max(max_re, std::abs(z.real()));
            max_im = std::max(max_im, std::abs(z.imag()));
        }
    }
    ks.imag_residue = (max_re > 0.0) ? max_im / max_re : max_im;
    return ks;
}

double slice_l1(const KernelSlice& ks) {
    const int nch = channels_of(ks.proj);
    const size_t n = ks.x.size();
    if (n < 2)
        throw ConfigError("slice l1: need at least two samples");
    auto point_norm = [&](size_t i) {
        double s = 0.0;
        for (int c = 0; c < nch; ++c) {
            const double v = ks.values[i][static_cast<size_t>(c)];
            s += v * v;
        }
        return std::sqrt(s);
    };
    double acc = 0.0;
    for (size_t i = 0; i + 1 < n; ++i)
        acc += 0.5 * (point_norm(i) + point_norm(i + 1)) * (ks.x[i + 1] - ks.x[i]);
    return acc;
}

DecayTable kernel_l1_decay(const KernelParams& kp, int m, const std::vector<double>& t_list,
                           Projection proj,
                           std::optional<std::pair<double, double>> fit_window) {
    if (m < 0 || m > 2)
        throw ConfigError("kernel decay: derivative order must be 0, 1, or 2");
    if (t_list.size() < 8)
        throw ConfigError("kernel decay: need at least 8 times");
    const auto [tmin_it, tmax_it] = std::minmax_element(t_list.begin(), t_list.end());
    if (!(*tmin_it > 0.0) || *tmax_it / *tmin_it < 99.0)
        throw ConfigError("kernel decay: time list must span at least two decades");

    DecayTable table;
    for (double t : t_list) {
        const std::vector<double> xg = make_kernel_xgrid(kp, t);
        const KernelSlice ks = kernel_synthesize(t, kp, xg, proj, m);
        const double norm = slice_l1(ks);
        double env = std::pow(t, -0.5 * m);
        const double anu = std::abs(kp.nu);
        switch (proj) {
        case Projection::full:
            break;
        case Projection::M_right:
        case Projection::N_left:
            env *= std::exp(-2.0 * kp.kappa * t) + anu / t;
            break;
        case Projection::N_M:
            env *= std::exp(-2.0 * kp.kappa * t) + anu * anu / (t * t);
            break;
        }
        table.times.push_back(t);
        table.norms.push_back(norm);
        table.envelope.push_back(env);
        if (env > 0.0)
            table.envelope_ratio_max = std::max(table.envelope_ratio_max, norm / env);
    }
    const auto [wlo, whi] =
        fit_window.value_or(std::pair<double, double>{*tmin_it, *tmax_it});
    table.fit = decay_fit(table.times, table.norms, wlo, whi, false);
    return table;
}

} // namespace rdlab
