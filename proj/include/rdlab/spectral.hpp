#pragma once

#include "rdlab/fit.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace rdlab {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct Mat2 {
    // row-major: m[0] m[1] / m[2] m[3]
    std::array<double, 4> m{0.0, 0.0, 0.0, 0.0};

    static Mat2 identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
    double& operator()(int r, int c) { return m[static_cast<size_t>(2 * r + c)]; }
    double operator()(int r, int c) const { return m[static_cast<size_t>(2 * r + c)]; }
};

Mat2 operator*(const Mat2& A, const Mat2& B);
Mat2 operator+(const Mat2& A, const Mat2& B);
Mat2 operator*(double s, const Mat2& A);

// Linearization about the equilibrium (v_bar^2, v_bar), written for the pair
// (rho-like, mass-like) components: reaction rates k1 = k, k2 = 4 k v_bar,
// mean and half-difference of the diffusivities, and of the rates.
struct KernelParams {
    double a = 0.0, b = 0.0, k = 0.0, v_bar = 0.0;
    double k1 = 0.0, k2 = 0.0;
    double mu = 0.0, nu = 0.0;
    double kappa = 0.0, ell = 0.0;

    Vec2 M() const { return {k1, -k2}; } // stoichiometric direction
    Vec2 N() const { return {-1.0, 1.0}; } // conserved covector
};

KernelParams make_kernel_params(double a, double b, double k, double v_bar);

// generator of the Fourier symbol: [[-k1 - a xi^2, k1], [k2, -k2 - b xi^2]]
Mat2 matrix_A(double xi, const KernelParams& kp);

// Delta(xi) = sqrt(k1 k2 + (ell + nu xi^2)^2), the half-gap between the two
// (always real) eigenvalues of A
double delta(double xi, const KernelParams& kp);

// exp(t A(xi)) in closed form; exponentials are combined so that every
// exponent is nonpositive (kappa + mu xi^2 >= Delta for real xi)
Mat2 expA_closed(double xi, double t, const KernelParams& kp);

struct SymbolActions {
    Vec2 SM{};       // S_hat(xi,t) M
    Vec2 NS{};       // N^T S_hat(xi,t), stored as a row
    double NSM = 0.0; // N^T S_hat(xi,t) M
};

// cancellation-aware evaluation; naive products of expA_closed entries lose
// all significant digits at large t because the projections are O(nu xi^2)
SymbolActions symbol_actions(double xi, double t, const KernelParams& kp);

enum class Projection { full, M_right, N_left, N_M };

struct SpectralKernel {
    KernelParams params{};
    double t = 0.0;
    std::vector<double> xi_grid;
    std::vector<Mat2> matrices; // S_hat(xi, t) per grid point
};

SpectralKernel sample_symbol(const KernelParams& kp, double t, std::vector<double> xi_grid);

// physical-space kernel samples after inverse Fourier quadrature; channel
// count depends on the projection (full: 4 row-major, M_right/N_left: 2,
// N_M: 1; unused channels stay 0)
struct KernelSlice {
    Projection proj = Projection::full;
    double t = 0.0;
    int m = 0; // x-derivative order, applied as (i xi)^m on the symbol
    std::vector<double> x;
    std::vector<std::array<double, 4>> values;
    double imag_residue = 0.0; // largest imaginary part left by the quadrature
    double dxi = 0.0;
    double xi_max = 0.0;
};

// symmetric grid wide enough that the diffusive envelope at the edge is below
// 1e-13 of the peak, fine enough to resolve the sqrt(min(a,b) t) core
std::vector<double> make_kernel_xgrid(const KernelParams& kp, double t);

KernelSlice kernel_synthesize(double t, const KernelParams& kp,
                              const std::vector<double>& x_grid, Projection proj, int m = 0);

// L1 norm over the slice's window (Frobenius norm across channels at each x)
double slice_l1(const KernelSlice& ks);

struct DecayTable {
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<double> envelope; // predicted shape, unit constant
    DecayFit fit{};
    double envelope_ratio_max = 0.0; // measured constant sup norms/envelope
};

DecayTable kernel_l1_decay(const KernelParams& kp, int m, const std::vector<double>& t_list,
                           Projection proj,
                           std::optional<std::pair<double, double>> fit_window = {});

} // namespace rdlab
