#pragma once

#include "rdlab/dynamics.hpp"

#include <cstdint>

namespace rdlab {

// bump over a homogeneous background; throws if any value goes negative
State gaussian_bump(const Grid1D& g, double u_back, double v_back, double u_amp, double v_amp,
                    double sigma, double center_frac = 0.5);

// two-state data joined by a tanh layer of the given width; meant for
// reflecting boundaries (a single transition does not wrap periodically)
State riemann_smoothed(const Grid1D& g, double u_left, double v_left, double u_right,
                       double v_right, double width, double center_frac = 0.5);

// band-limited random state, strictly positive, identical for equal seeds
State random_smooth(const Grid1D& g, std::uint64_t seed, double amplitude = 1.0,
                    double floor_level = 0.05, int max_mode = 12);

State constant_pair(const Grid1D& g, double u0, double v0);

} // namespace rdlab
