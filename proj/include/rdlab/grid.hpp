#pragma once

#include <functional>
#include <vector>

namespace rdlab {

enum class Bc { periodic, neumann };

// Uniform 1-D grid on [0, L]. Periodic grids store n points with spacing L/n
// (the point at x=L is identified with x=0); Neumann grids store both
// endpoints, spacing L/(n-1), and fields are understood as evenly reflected.
struct Grid1D {
    double length = 0.0;
    int n = 0;
    Bc bc = Bc::periodic;
    double dx = 0.0;

    double x(int i) const { return i * dx; }
    bool operator==(const Grid1D&) const = default;
};

Grid1D make_grid(double length, int n, Bc bc);

struct Field {
    Grid1D grid;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

Field make_field(const Grid1D& g, double fill = 0.0);
Field sample(const Grid1D& g, const std::function<double(double)>& f);

// Second-order central differences. deriv1 uses the skew-symmetric stencil,
// so sum(deriv1(f)*g) = -sum(f*deriv1(g)) exactly on periodic grids. Neumann
// grids use even reflection at both ends.
Field deriv1(const Field& f);
Field deriv2(const Field& f);

double max_val(const Field& f);
double min_val(const Field& f);
double max_abs(const Field& f);
bool all_finite(const Field& f);

// Quadrature consistent with the boundary treatment: plain Riemann sum on
// periodic grids, trapezoid weights on Neumann grids (this is the quadrature
// the reflected second-difference operator conserves exactly).
double integral(const Field& f);

// Localization weight chi(x) = sech(eps*(x - x0)). x0 is snapped to the
// nearest grid point so that max(chi) = 1 holds exactly on the grid.
struct WeightField {
    double eps = 0.0;
    double x0 = 0.0;
    Field chi;
};

WeightField weight_chi(const Grid1D& g, double eps, double x0);

double weighted_integral(const Field& f, const WeightField& w);

// Uniformly local norm: max over window centers (= every grid point) of the
// windowed L^p norm over |x - x0| <= radius. p may be infinity. If the
// requested radius exceeds L/2 the window is clamped and flagged.
struct UlNorm {
    double value = 0.0;
    bool window_clamped = false;
};

UlNorm ul_norm(const Field& f, double p, double radius);

} // namespace rdlab
