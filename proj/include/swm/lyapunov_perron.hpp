#pragma once

// Backward fixed-point solvers for the manifold graphs.
//
// Heat side (base zeta in P_N L^2, forcing path z on its own grid):
//   u(t) = e^{Dz t} zeta + int_0^t e^{Dz(t-s)} P_N f(u+z) ds
//                        + int_{-Tb}^t e^{Dz(t-s)} (I-P_N) f(u+z) ds ,  t <= 0,
// solved by Picard iteration in the weighted space sup_{t<=0} e^{-eta t}|u(t)|.
// Wave side: same structure with e^{Ct}, the P_1 branch integrated from 0 and
// the (P_{-1}+P_22) branch from -Tb, residuals in the E-norm.
//
// Discretization: the forcing z is piecewise constant on its native grid
// (left value); within a solver step the nonlinearity is linear in time with
// exact linear factors (exponential-trapezoidal), so refining the solver step
// against the same realized path converges at second order. The iteration
// contracts at the spectral-gap rate.
//
// Solves for distinct base points are independent (shared inputs are read
// only) and solver results are immutable, so base-point fan-out parallelizes
// freely; each individual solve is sequential.

#include <cstdint>
#include <functional>

#include "swm/errors.hpp"
#include "swm/ou.hpp"
#include "swm/spectral.hpp"
#include "swm/wave_operator.hpp"

namespace swm {

enum class OUForcing { heat_z, wave_z };

struct LPConfig {
    double eta = 0.0;          // 0 => midpoint (alpha+beta)/2
    double T_back = 0.0;       // 0 => auto from the tail bound
    int refine = 1;            // solver substeps per noise step
    double tol = 1e-8;
    int max_iters = 400;
    double tempered_bound = 1e8; // weighted-norm overflow guard
    double K = 1.0;
    double forcing_bound = 0.0;  // 0 => estimate ||f||_{L^2} bound internally
};

// Forcing supplied to the heat solver: value on the noise interval
// [node*dt, (node+1)*dt). `centered` subtracts f(forcing) from the Nemytskii
// term (used when the forcing is a stationary trajectory u* rather than z*).
// The adapters reference the underlying path/trajectory, which must outlive
// the forcing object.
struct HeatForcing {
    std::function<const SpectralField&(std::int64_t node)> at_node;
    double dt = 0.0;
    bool centered = false;

    static HeatForcing from_ou(const OUPath& ou, OUForcing kind);
    static HeatForcing from_trajectory(const std::vector<SpectralField>& traj,
                                       std::int64_t first_node, double dt, bool centered);
};

// Backward trajectory in the exponentially weighted space: the norm is
// sup_j e^{-eta t_j} |states[j]|, finite by the tempered-bound guard.
template <class State>
struct WeightedTrajectory {
    std::vector<double> times; // increasing, times.back() == 0
    std::vector<State> states;
    double eta = 0.0;

    const State& at_zero() const { return states.back(); }
};

struct LPDiagnostics {
    int iterations = 0;
    double final_residual = 0.0;
    double contraction_estimate = 0.0; // max r_{j+1}/r_j over j >= 2
    std::vector<double> residuals;
    double weighted_norm = 0.0;
    double eta = 0.0, T_back = 0.0, gap_value = 0.0, L_F = 0.0;
};

struct LPSolutionHeat {
    WeightedTrajectory<SpectralField> trajectory;
    SpectralField base;        // zeta
    SpectralField graph_value; // (I-P_N) u(0)
    LPDiagnostics diag;
};

struct LPSolutionWave {
    WeightedTrajectory<PhasePoint> trajectory;
    PhasePoint base;        // xi in E_1
    PhasePoint graph_value; // (P_{-1}+P_22) component at t=0
    LPDiagnostics diag;
};

// Finite sample of manifold base points inside the radius-R ball: a tensor
// grid over the first min(N,2) coordinates with per_axis points per axis.
struct ManifoldSample {
    double R = 1.0;
    std::uint64_t seed = 0; // noise realization the sample is built on
    std::vector<SpectralField> bases;

    static ManifoldSample tensor(int M, int N, double R, int per_axis, std::uint64_t seed);
};

LPSolutionHeat lp_solve_heat(const SpectralField& zeta, const HeatForcing& forcing,
                             const Nonlinearity& f, int N, const LPConfig& cfg,
                             const SineTransform& plan);

LPSolutionWave lp_solve_wave(const PhasePoint& xi, const OUPath& ou, const Nonlinearity& f,
                             int N, const LPConfig& cfg, const SineTransform& plan);

// Manifold point of the heat side: u0 = zeta + h(zeta) and the random-equation
// time derivative u0_t = Dz u0 + f(u0 + z(0)).
struct HeatManifoldPoint {
    SpectralField u0;
    SpectralField u0_t;
};
HeatManifoldPoint manifold_point_heat(const LPSolutionHeat& sol, const HeatForcing& forcing,
                                      const Nonlinearity& f, const SineTransform& plan);

// Matched wave-manifold distance for one heat-manifold point: embed
// U~ = (u0, u0/2 + nu u0_t), take xi = P_1 U~, solve the wave graph at xi and
// report the E-norm and L^2(u) distances of the matched pair.
struct MatchedDistance {
    double dist_E = 0.0;
    double dist_L2 = 0.0;
    PhasePoint heat_embedded;
    PhasePoint wave_point;
    LPDiagnostics wave_diag;
};
MatchedDistance matched_wave_distance(const SpectralField& u0, const SpectralField& u0_t,
                                      double nu, const OUPath& ou, const Nonlinearity& f, int N,
                                      const LPConfig& cfg, const SineTransform& plan);

// Forward integration of the heat random equation u' = Dz u + f(u + z) with the
// same forcing convention and quadrature family as the backward solver
// (exponential-trapezoidal, predictor-corrector). Returns u at t0 + n_steps*h
// and optionally the full trajectory at solver nodes.
SpectralField integrate_rds_heat(const SpectralField& u0, const HeatForcing& forcing,
                                 const Nonlinearity& f, const SineTransform& plan, double t0,
                                 double h, std::int64_t n_steps,
                                 std::vector<SpectralField>* trajectory = nullptr);

// Invariance residual: integrate the random equation forward from u_start and
// at each sample time rebuild the graph on the shifted fiber; residual is
// |(I-P_N) u(t) - h(P_N u(t), theta_t omega)|_{L^2}.
struct InvarianceReport {
    std::vector<double> times;
    std::vector<double> residuals;
    double max_residual = 0.0;
};
InvarianceReport invariance_residual(const SpectralField& u_start, const OUPath& ou,
                                     OUForcing forcing, const Nonlinearity& f, int N,
                                     const LPConfig& cfg, const SineTransform& plan, double T_inv,
                                     int samples);

// Pullback approximation of the stationary state of u' = Dz u + f(u + z):
// integrate from -T_pull with zero data up to t=0. Optionally records the
// trajectory on the trailing [record_from, 0] window at noise nodes.
SpectralField pullback_stationary(const OUPath& ou, OUForcing forcing, const Nonlinearity& f,
                                  const SineTransform& plan, double T_pull,
                                  double record_from = 0.0,
                                  std::vector<SpectralField>* trajectory = nullptr,
                                  std::int64_t* first_node = nullptr);

// Resolved dichotomy data for a solver configuration (heat: alpha=-N^2 etc.).
struct LPSetup {
    double alpha, beta, eta, T_back, gap_value, L_F;
    std::int64_t n_steps; // solver steps over [-T_back, 0]
    double h;             // solver step
};
LPSetup lp_setup_heat(int N, const Nonlinearity& f, const LPConfig& cfg, double noise_dt);
LPSetup lp_setup_wave(double nu, int N, const Nonlinearity& f, const LPConfig& cfg,
                      double noise_dt);

} // namespace swm
