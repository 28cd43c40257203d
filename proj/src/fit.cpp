#include "rdlab/fit.hpp"
#include "rdlab/errors.hpp"

#include <cmath>
#include <vector>

namespace rdlab {

DecayFit decay_fit(std::span<const double> times, std::span<const double> values,
                   double window_lo, double window_hi, bool log_correction) {
    if (times.size() != values.size())
        throw ConfigError("decay_fit: times and values differ in length");
    if (!(window_lo < window_hi))
        throw ConfigError("decay_fit: empty window");

    std::vector<double> xs, ys;
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < window_lo || t > window_hi)
            continue;
        if (!(t > 0.0))
            throw ConfigError("decay_fit: nonpositive time in window");
        double v = values[i];
        if (log_correction)
            v /= std::log(2.0 + t);
        if (!(v > 0.0))
            throw DomainError("decay_fit: nonpositive value in window");
        xs.push_back(std::log(t));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 8)
        throw ConfigError("decay_fit: fewer than 8 samples in window");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw ConfigError("decay_fit: degenerate window (single abscissa)");

    DecayFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    fit.log_correction = log_correction;
    fit.n_points = static_cast<int>(xs.size());
    return fit;
}

} // namespace rdlab
