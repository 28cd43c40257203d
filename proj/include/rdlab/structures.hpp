#pragma once

#include "rdlab/dynamics.hpp"
#include "rdlab/fit.hpp"
#include "rdlab/grid.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace rdlab {

// Each triple (e, f, d) satisfies the local balance  de/dt = df/dx - d
// along solutions of the system. "primary" controls amplitudes, "secondary"
// controls gradients and the reaction defect rho = u - v^2, the theta variants
// add a small multiple of the conserved combination w = 2u + v to stay coercive
// when v touches zero, "boltzmann" is the entropy triple, "rdnm" the analogue
// for general reaction orders.
enum class EdsKind { primary, secondary, theta_first, theta_second, boltzmann, rdnm };

struct StructureParams {
    double alpha = 0.0; // weight of u_x^2 in the secondary density
    double beta = 0.0;  // weight of v v_x^2 in the secondary density
    double gamma = 0.0; // level of the dissipation lower bound
    double theta = 0.0; // weight of the conserved-quantity augmentation
    double theta_c = 0.0; // calibrated constant in the theta coercivity bounds
};

struct EDSField {
    EdsKind kind{};
    Field e, f, d;
    StructureParams params_used{};
    int floored_points = 0; // boltzmann only: points clamped at the floor
};

// Largest gamma for which d_tilde - d_tilde0 splits into two positive
// semidefinite quadratic forms, found by bisection; 0 if the Young condition
// on (alpha, beta) fails outright.
double gamma_max_bisect(const Params& p, double alpha, double beta);

// alpha = (a+b)/k, beta = 2b/k (the standard choice, rescaled so the Young
// condition holds for every k), gamma = 0.9 * gamma_max. theta is left at 0;
// call calibrate_theta to fill it.
StructureParams default_structure_params(const Params& p);

// Largest theta in {2^-j} whose coercivity bounds hold on a seeded probe set
// of admissible states, then halved. Fills theta and theta_c.
StructureParams calibrate_theta(const Params& p, StructureParams sp,
                                std::uint64_t seed = 20260816ull);

EDSField eds_primary(const State& s, const Params& p);
EDSField eds_secondary(const State& s, const Params& p, const StructureParams& sp);
std::pair<EDSField, EDSField> eds_theta(const State& s, const Params& p,
                                        const StructureParams& sp);
EDSField eds_boltzmann(const State& s, const Params& p);
EDSField eds_rdnm(const State& s, const Params& p);

EDSField make_eds(const State& s, const Params& p, EdsKind kind, const StructureParams& sp);

struct ResidualReport {
    std::vector<double> norms; // per-interval max |residual|
    double max_norm = 0.0;
    double dt = 0.0; // snapshot spacing used as the time step of the residual
    double dx = 0.0;
};

// Discrete residual of the balance law: forward difference of e against
// flux divergence and dissipation at the midpoint (state fields averaged).
// Needs uniformly spaced snapshots.
ResidualReport balance_residual(const Trajectory& traj, EdsKind kind,
                                const StructureParams& sp);

// Residual of the defect equation
//   rho_t = a rho_xx - k(1+4v) rho + 2(a-b) v v_xx + 2a v_x^2,
// an algebraic consequence of the system.
ResidualReport rho_residual(const Trajectory& traj, const Params& p);

struct DposReport {
    double min_margin = 0.0; // min over points of d_tilde - d_tilde0
    double gamma_used = 0.0;
    double gamma_max = 0.0;
};

DposReport dpos_check(const State& s, const Params& p, const StructureParams& sp);

struct LocalizedSeries {
    double T = 0.0;
    double eps = 0.0; // weight scale, C0 * eps^2 = 1/T
    double x0 = 0.0;
    double C0 = 0.0;
    std::vector<double> times;
    std::vector<double> E, D;           // primary density and dissipation
    std::vector<double> Etilde, Dtilde; // secondary density, floor dissipation d_tilde0
};

LocalizedSeries localized_energies(const Trajectory& traj, const Params& p, double T, double x0,
                                   std::optional<StructureParams> sp = {});

struct GronwallConstants {
    double C0 = 0.0; // primary flux constant max(2a, 3b/2)
    double C1 = 0.0; // measured sup of f_tilde0^2 / (e_tilde d_tilde0)
    double C2 = 0.0; // C1 + b/3 + 4b^3/(9 k gamma)
    double C3 = 0.0; // exp(C2/C0)
    double C4 = 0.0; // ordering constant, e_tilde <= C4 d
    double C5 = 0.0; // 2 e^{1/2} C3 C4
    double gamma = 0.0;
    long c1_points = 0; // points entering the C1 measurement
};

double measure_flux_constant(const Trajectory& traj, const Params& p,
                             const StructureParams& sp);

GronwallConstants assemble_gronwall_constants(const Trajectory& traj, const Params& p,
                                              std::optional<StructureParams> sp = {});

struct GronwallReport {
    // first: E(T) + 1/2 int_0^T D dt <= e^{1/2} E(0)
    double lhs_first = 0.0, rhs_first = 0.0, slack_first = 0.0;
    bool pass_first = false;
    // second: Etilde(T) + (1/2T) int_0^T t Dtilde dt <= (C5/T) E(0)
    double lhs_second = 0.0, rhs_second = 0.0, slack_second = 0.0;
    bool pass_second = false;
};

GronwallReport gronwall_checks(const LocalizedSeries& ls, const GronwallConstants& gc);

// For each snapshot, sup over centers of the integral of u_x^2 + v_x^2 + |rho|
// over windows of radius sqrt(t). Aligned with snapshot times.
std::vector<double> ul_decay_series(const Trajectory& traj);

struct SlavingSeries {
    std::vector<double> times;
    std::vector<double> discrepancy; // max |rho - rho_ansatz|
    std::vector<double> rho_norm;    // max |rho|
};

// Quasi-static ansatz rho ~ (2(a-b) v v_xx + 2a v_x^2) / (k(1+4v)); the
// discrepancy should decay faster than |rho| itself.
SlavingSeries slaving_check(const Trajectory& traj, const Params& p);

struct SweepReport {
    double flux_margin_min = 0.0;     // min of C0 e d - f^2
    double dpos_margin_min = 0.0;     // min of d_tilde - d_tilde0
    double ordering_margin_min = 0.0; // min of C4 d - e_tilde
    double flux_ratio_max = 0.0;      // sup f^2/(e d)
    double ordering_ratio_max = 0.0;  // sup e_tilde/d
    double C0 = 0.0, C4 = 0.0;
    double C1_measured = 0.0;
    double boltzmann_ratio_max = 0.0; // sup f^2/(e d log(2+e)), positive states only
    long points = 0;
    int boltzmann_snapshots = 0;
};

SweepReport inequality_sweep(const Trajectory& traj, const Params& p,
                             std::optional<StructureParams> sp = {});

} // namespace rdlab
