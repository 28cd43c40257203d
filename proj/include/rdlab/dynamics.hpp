#pragma once

#include "rdlab/grid.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rdlab {

// Power-law reaction exponents for the generalized system
// u_t = a u_xx + n k (v^m - u^n), v_t = b v_xx + m k (u^n - v^m).
// The base system is (n, m) = (1, 2).
struct ReactionOrders {
    int n = 1;
    int m = 2;
};

struct Params {
    double a = 1.0;
    double b = 1.0;
    double k = 1.0;
    std::optional<ReactionOrders> orders;
};

void validate(const Params& p);

struct State {
    Field u;
    Field v;
    double t = 0.0;
};

struct Trajectory {
    std::vector<State> snapshots;
    Params params;
    double dt = 0.0; // largest internal step used
    std::string scheme = "imex_euler";
};

struct StepOptions {
    bool enforce_positivity = true;
    double tol_pos = 1e-10;
};

struct SimOptions {
    std::optional<double> fixed_dt; // overrides the automatic stability bound
    bool enforce_positivity = true;
    double tol_pos = 1e-10;
    double safety = 0.4; // dt_max = safety / (k (n^2 U^{n-1} + m^2 V^{m-1}))
};

// Reaction-diffusion right-hand sides evaluated with the discrete Laplacian.
// Used for flux time-derivatives and stationarity residuals; never replaced
// by finite differencing in t.
void rd_rhs(const State& s, const Params& p, Field& du, Field& dv);

// One IMEX step: explicit reaction, implicit diffusion.
State step_rd(const State& s, const Params& p, double dt, const StepOptions& opts = {});

// Integrates to output_times.back() with automatic step selection; snapshots
// at every requested time. output_times must be nondecreasing and start at or
// after initial.t.
Trajectory simulate_rd(const State& initial, const Params& p,
                       std::span<const double> output_times, const SimOptions& opts = {});

// Same engine with the generalized reaction; p.orders must be set.
Trajectory simulate_rdnm(const State& initial, const Params& p,
                         std::span<const double> output_times, const SimOptions& opts = {});

// Spatially homogeneous kinetics. times[0] is the initial time. Conserves
// m*u + n*v (2u+v for the base system) to round-off.
struct KineticPath {
    std::vector<double> times;
    std::vector<double> u;
    std::vector<double> v;
};

KineticPath simulate_kinetic_ode(double u0, double v0, const Params& p,
                                 std::span<const double> times);

// Closed-form kinetic equilibrium reached from homogeneous data (u0, v0):
// v* is the positive root of 2v^2 + v = 2 u0 + v0, u* = v*^2.
std::pair<double, double> equilibrium_from_data(double u0, double v0);

// Compares a trajectory against the kinetic envelopes grown from the extreme
// values of its initial data, and against the positive lower barrier
// 2 delta / (1 + sqrt(1+8 delta)) with delta = min v0. Margins are reported,
// never thrown: negative upper margins at O(dt) are expected because the
// envelopes are integrated to much higher order than the PDE.
struct EnvelopeReport {
    double worst_upper_u = 0.0; // min over (x,t) of u_env(t) - u(x,t)
    double worst_upper_v = 0.0;
    double worst_lower_u = 0.0; // min over (x,t) of u(x,t) - u_env(t)
    double worst_lower_v = 0.0;
    double barrier = 0.0;       // 2 delta / (1 + sqrt(1+8 delta))
    double worst_barrier_margin = 0.0; // min over (x,t) of v - barrier
};

EnvelopeReport ode_envelope_check(const Trajectory& traj);

// Linearization transported along a stored v-profile:
//   U_t = a U_xx + k (2 v V - U),  V_t = b V_xx + k (2 U - 4 v V),
// with v(x,t) interpolated linearly in time between v_path snapshots.
// Snapshots are returned in the (u, v) slots of the Trajectory.
Trajectory simulate_linearized(const Trajectory& v_path, const Field& U0, const Field& V0,
                               double t1, std::span<const double> output_times,
                               const SimOptions& opts = {});

// Embedded Fisher-KPP states (a=b=k=1): z solves z_t = z_xx + 3z(1-z) under
// u = 1 - 3z/4, v = -1 + 3z/2. The pulse is the explicit stationary solution;
// the wave profile is generated by shooting along the unstable manifold at
// z=1 and requires speed c >= 2 sqrt(3) (slower profiles oscillate below 0).
enum class FisherKind { pulse, wave };

State fisher_kpp_state(FisherKind kind, std::optional<double> c, const Grid1D& g,
                       double center_frac = -1.0); // default: 0.5 pulse, 0.25 wave

// Scalar conservation law w_t = (D(w) w_x)_x with D(w) = a + (b-a)/sqrt(1+8w),
// conservative finite-volume form with arithmetic face averages, implicit
// stepping with lagged coefficients. Conserves the discrete mass exactly.
struct ScalarTrajectory {
    std::vector<double> times;
    std::vector<Field> w;
    Params params;
    double dt = 0.0;
};

ScalarTrajectory simulate_effective_diffusion(const Field& w0, const Params& p,
                                              std::span<const double> output_times,
                                              const SimOptions& opts = {});

Field extract_rho(const State& s); // u - v^2
Field extract_w(const State& s);   // 2u + v

} // namespace rdlab
