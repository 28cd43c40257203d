#include "rdlab/profiles.hpp"

#include "rdlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace rdlab {

namespace {

void require_nonnegative(const State& s, const char* who) {
    const double mu = min_val(s.u);
    const double mv = min_val(s.v);
    if (mu < 0.0 || mv < 0.0)
        throw ConfigError(std::string(who) + ": profile has negative values (u_min=" +
                          std::to_string(mu) + ", v_min=" + std::to_string(mv) + ")");
}

} // namespace

State gaussian_bump(const Grid1D& g, double u_back, double v_back, double u_amp, double v_amp,
                    double sigma, double center_frac) {
    if (!(sigma > 0.0))
        throw ConfigError("gaussian_bump: sigma must be positive");
    if (!(center_frac >= 0.0 && center_frac <= 1.0))
        throw ConfigError("gaussian_bump: center_frac outside [0,1]");
    const double xc = g.length * center_frac;
    State s;
    s.t = 0.0;
    s.u = sample(g, [&](double x) {
        const double z = (x - xc) / sigma;
        return u_back + u_amp * std::exp(-0.5 * z * z);
    });
    s.v = sample(g, [&](double x) {
        const double z = (x - xc) / sigma;
        return v_back + v_amp * std::exp(-0.5 * z * z);
    });
    require_nonnegative(s, "gaussian_bump");
    return s;
}

State riemann_smoothed(const Grid1D& g, double u_left, double v_left, double u_right,
                       double v_right, double width, double center_frac) {
    if (!(width > 0.0))
        throw ConfigError("riemann_smoothed: width must be positive");
    if (!(center_frac > 0.0 && center_frac < 1.0))
        throw ConfigError("riemann_smoothed: center_frac outside (0,1)");
    const double xc = g.length * center_frac;
    // 0 far left, 1 far right
    auto step = [&](double x) { return 0.5 * (1.0 + std::tanh((x - xc) / width)); };
    State s;
    s.t = 0.0;
    s.u = sample(g, [&](double x) { return u_left + (u_right - u_left) * step(x); });
    s.v = sample(g, [&](double x) { return v_left + (v_right - v_left) * step(x); });
    require_nonnegative(s, "riemann_smoothed");
    return s;
}

State random_smooth(const Grid1D& g, std::uint64_t seed, double amplitude, double floor_level,
                    int max_mode) {
    if (!(amplitude > 0.0))
        throw ConfigError("random_smooth: amplitude must be positive");
    if (!(floor_level > 0.0))
        throw ConfigError("random_smooth: floor_level must be positive");
    if (max_mode < 1)
        throw ConfigError("random_smooth: max_mode must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double two_pi = 2.0 * std::acos(-1.0);

    // independent trig sums for u and v; coefficients shrink with the mode
    // number so the profile stays resolved on any reasonable grid
    const auto nm = static_cast<std::size_t>(max_mode);
    std::vector<double> cu(nm), su(nm), cv(nm), sv(nm);
    for (std::size_t m = 0; m < nm; ++m) {
        const double damp = 1.0 / (1.0 + static_cast<double>(m));
        cu[m] = unit(rng) * damp;
        su[m] = unit(rng) * damp;
        cv[m] = unit(rng) * damp;
        sv[m] = unit(rng) * damp;
    }

    auto trig_sum = [&](const std::vector<double>& c, const std::vector<double>& s) {
        return sample(g, [&](double x) {
            const double th = two_pi * x / g.length;
            double acc = 0.0;
            for (std::size_t m = 0; m < c.size(); ++m) {
                const double ph = static_cast<double>(m + 1) * th;
                acc += c[m] * std::cos(ph) + s[m] * std::sin(ph);
            }
            return acc;
        });
    };

    State out;
    out.t = 0.0;
    out.u = trig_sum(cu, su);
    out.v = trig_sum(cv, sv);

    // rescale each field to [floor, floor + amplitude]; strictly positive
    auto lift = [&](Field& f) {
        const double lo = min_val(f);
        const double hi = max_val(f);
        const double span = std::max(hi - lo, 1e-30);
        for (double& z : f.values)
            z = floor_level * amplitude + amplitude * (z - lo) / span;
    };
    lift(out.u);
    lift(out.v);
    require_nonnegative(out, "random_smooth");
    return out;
}

State constant_pair(const Grid1D& g, double u0, double v0) {
    if (u0 < 0.0 || v0 < 0.0)
        throw ConfigError("constant_pair: negative background");
    State s;
    s.t = 0.0;
    s.u = make_field(g, u0);
    s.v = make_field(g, v0);
    return s;
}

} // namespace rdlab
