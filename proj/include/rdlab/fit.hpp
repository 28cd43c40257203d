#pragma once

#include <span>

namespace rdlab {

// Power-law fit log(v) = slope*log(t) + intercept over a time window.
// With log_correction the series is divided by log(2+t) before fitting.
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    bool log_correction = false;
    int n_points = 0;
};

DecayFit decay_fit(std::span<const double> times, std::span<const double> values,
                   double window_lo, double window_hi, bool log_correction = false);

} // namespace rdlab
