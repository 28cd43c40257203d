#include "rdlab/grid.hpp"
#include "rdlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdlab {

Grid1D make_grid(double length, int n, Bc bc) {
    if (!(length > 0.0))
        throw ConfigError("grid length must be positive");
    if (n < 16)
        throw ConfigError("grid needs at least 16 points");
    Grid1D g;
    g.length = length;
    g.n = n;
    g.bc = bc;
    g.dx = (bc == Bc::periodic) ? length / n : length / (n - 1);
    return g;
}

Field make_field(const Grid1D& g, double fill) {
    return Field{g, std::vector<double>(static_cast<size_t>(g.n), fill)};
}

Field sample(const Grid1D& g, const std::function<double(double)>& f) {
    Field out = make_field(g);
    for (int i = 0; i < g.n; ++i)
        out[i] = f(g.x(i));
    return out;
}

Field deriv1(const Field& f) {
    const Grid1D& g = f.grid;
    const int n = g.n;
    Field out = make_field(g);
    const double inv2dx = 1.0 / (2.0 * g.dx);
    for (int i = 1; i < n - 1; ++i)
        out[i] = (f[i + 1] - f[i - 1]) * inv2dx;
    if (g.bc == Bc::periodic) {
        out[0] = (f[1] - f[n - 1]) * inv2dx;
        out[n - 1] = (f[0] - f[n - 2]) * inv2dx;
    } else {
        // even reflection: ghost values equal their mirror images
        out[0] = 0.0;
        out[n - 1] = 0.0;
    }
    return out;
}

Field deriv2(const Field& f) {
    const Grid1D& g = f.grid;
    const int n = g.n;
    Field out = make_field(g);
    const double invdx2 = 1.0 / (g.dx * g.dx);
    for (int i = 1; i < n - 1; ++i)
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * invdx2;
    if (g.bc == Bc::periodic) {
        out[0] = (f[1] - 2.0 * f[0] + f[n - 1]) * invdx2;
        out[n - 1] = (f[0] - 2.0 * f[n - 1] + f[n - 2]) * invdx2;
    } else {
        out[0] = 2.0 * (f[1] - f[0]) * invdx2;
        out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * invdx2;
    }
    return out;
}

double max_val(const Field& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}

double min_val(const Field& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values)
        m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v))
            return false;
    return true;
}

double integral(const Field& f) {
    const Grid1D& g = f.grid;
    double s = 0.0;
    if (g.bc == Bc::periodic) {
        for (double v : f.values)
            s += v;
    } else {
        s += 0.5 * (f[0] + f[g.n - 1]);
        for (int i = 1; i < g.n - 1; ++i)
            s += f[i];
    }
    return s * g.dx;
}

namespace {

double sech(double z) {
    const double a = std::abs(z);
    if (a > 350.0)
        return 2.0 * std::exp(-a); // cosh would overflow; relative error < 1e-300
    return 1.0 / std::cosh(a);
}

} // namespace

WeightField weight_chi(const Grid1D& g, double eps, double x0) {
    if (!(eps > 0.0))
        throw ConfigError("weight_chi: eps must be positive");
    // fold the center into the box, then snap to the nearest grid point
    double xf = std::fmod(x0, g.length);
    if (xf < 0.0)
        xf += g.length;
    int i0 = static_cast<int>(std::lround(xf / g.dx));
    if (i0 >= g.n)
        i0 = (g.bc == Bc::periodic) ? 0 : g.n - 1;
    const double xs = g.x(i0);

    WeightField w;
    w.eps = eps;
    w.x0 = xs;
    w.chi = make_field(g);
    const double floor = std::numeric_limits<double>::min();
    for (int i = 0; i < g.n; ++i)
        w.chi[i] = std::max(sech(eps * (g.x(i) - xs)), floor);
    return w;
}

double weighted_integral(const Field& f, const WeightField& w) {
    if (!(f.grid == w.chi.grid))
        throw ConfigError("weighted_integral: field and weight on different grids");
    Field prod = make_field(f.grid);
    for (int i = 0; i < f.size(); ++i)
        prod[i] = f[i] * w.chi[i];
    return integral(prod);
}

UlNorm ul_norm(const Field& f, double p, double radius) {
    const Grid1D& g = f.grid;
    if (!(p >= 1.0))
        throw ConfigError("ul_norm: p must be >= 1 (or infinity)");
    if (!(radius > 0.0))
        throw ConfigError("ul_norm: radius must be positive");

    UlNorm result;
    if (std::isinf(p)) {
        result.value = max_abs(f);
        return result;
    }

    double r = radius;
    if (r > 0.5 * g.length) {
        r = 0.5 * g.length;
        result.window_clamped = true;
    }
    const int m = static_cast<int>(std::floor(r / g.dx + 1e-12));
    const int n = g.n;

    // prefix sums of |f|^p; doubled for circular windows
    std::vector<double> pw(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        pw[static_cast<size_t>(i)] = std::pow(std::abs(f[i]), p);

    double best = 0.0;
    if (g.bc == Bc::periodic) {
        std::vector<double> pref(static_cast<size_t>(2 * n + 1), 0.0);
        for (int i = 0; i < 2 * n; ++i)
            pref[static_cast<size_t>(i + 1)] = pref[static_cast<size_t>(i)] + pw[static_cast<size_t>(i % n)];
        const int width = std::min(2 * m + 1, n);
        const int half = (width - 1) / 2;
        for (int i = 0; i < n; ++i) {
            const int lo = i - half + n;
            const double s = pref[static_cast<size_t>(lo + width)] - pref[static_cast<size_t>(lo)];
            best = std::max(best, s);
        }
    } else {
        std::vector<double> pref(static_cast<size_t>(n + 1), 0.0);
        for (int i = 0; i < n; ++i)
            pref[static_cast<size_t>(i + 1)] = pref[static_cast<size_t>(i)] + pw[static_cast<size_t>(i)];
        for (int i = 0; i < n; ++i) {
            const int lo = std::max(0, i - m);
            const int hi = std::min(n - 1, i + m);
            const double s = pref[static_cast<size_t>(hi + 1)] - pref[static_cast<size_t>(lo)];
            best = std::max(best, s);
        }
    }
    result.value = std::pow(best * g.dx, 1.0 / p);
    return result;
}

} // namespace rdlab
