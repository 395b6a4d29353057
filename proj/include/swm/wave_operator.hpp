#pragma once

// Phase-space operator of the transformed damped wave system, state
// U = (u, v) with v = nu u_t + u/2:
//
//     C = [ -1/(2nu)       1/nu    ]
//         [ 1/(4nu) + Dz  -1/(2nu) ]
//
// Modes k <= N carry the eigenpairs lambda_k^{+-} = (-1 +- sqrt(1-4 nu k^2))/(2nu)
// with eigenvectors e_k^{+-} = (e_k, +- c_k e_k), c_k = sqrt(1-4 nu k^2)/2,
// spanning E_1 (slow) and E_{-1} (fast). Modes k > N form E_22.
//
// The equivalent inner product weighs the u-component of mode k by
//     rho_k = 1/4 - nu k^2                                   (k <= N)
//     rho_k = max(1/4 - nu (N+1)^2, nu k^2 - 1/4)            (k >  N)
// and the v-component by 1. On modes k <= N this is nu<Dz u,u> + 1/4<u,u> + <v,v>
// and makes e_k^+ perpendicular to e_k^-; on k > N the weight is pinned to the
// band in which the dichotomy bounds
//     |e^{C_1 t}| <= e^{lambda_N^+ t}      (t <= 0)
//     |e^{C_-1 t}| <= e^{lambda_N^- t}     (t >= 0)
//     |e^{C_22 t}| <= e^{lambda_{N+1}^+ t} (t >= 0)
// hold with constant 1 (the per-mode numerical abscissa never exceeds
// lambda_{N+1}^+) while keeping |(0,v)|_E = |v| and
// |U|_E >= sqrt(1/4 - nu (N+1)^2) |u|.
//
// Everything requires nu < 1/(4 (N+1)^2) so that modes up to N+1 are in the
// real (overdamped) regime.

#include <cstdint>

#include "swm/field.hpp"
#include "swm/kernels.hpp"

namespace swm {

struct PhasePoint {
    SpectralField u; // H^1_0 component
    SpectralField v; // L^2 component
    double nu = 0.0;
    int N = 0;

    PhasePoint() = default;
    PhasePoint(SpectralField u_, SpectralField v_, double nu_, int N_)
        : u(std::move(u_)), v(std::move(v_)), nu(nu_), N(N_) {
        if (u.modes() != v.modes())
            throw std::invalid_argument("PhasePoint: u/v truncation mismatch");
    }
    static PhasePoint zero(std::size_t M, double nu, int N) {
        return {SpectralField(M), SpectralField(M), nu, N};
    }
    std::size_t modes() const { return u.modes(); }

    PhasePoint& operator+=(const PhasePoint& o);
    PhasePoint& operator-=(const PhasePoint& o);
    PhasePoint& operator*=(double c);
    friend PhasePoint operator+(PhasePoint l, const PhasePoint& r) { return l += r; }
    friend PhasePoint operator-(PhasePoint l, const PhasePoint& r) { return l -= r; }
    friend PhasePoint operator*(double c, PhasePoint p) { return p *= c; }
};

struct EigenPair {
    int k = 0;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double c_k = 0.0; // sqrt(1 - 4 nu k^2)/2
    bool real_regime = true;
};

// Closed-form eigenpair of C restricted to mode k. Complex regime (4 nu k^2 >= 1)
// is flagged; lambda fields then hold the common real part.
EigenPair eigen(int k, double nu);

// Eigenvector e_k^{+-} = (e_k, +- c_k e_k) as a PhasePoint.
PhasePoint eigenvector(int k, bool plus, double nu, int N, std::size_t M);

// C applied mode-wise.
PhasePoint apply_C(const PhasePoint& U);

class EMetric {
  public:
    EMetric(double nu, int N);

    double nu() const { return nu_; }
    int N() const { return N_; }
    // u-component weight of mode k (1-based)
    double weight(int k) const;

    double inner(const PhasePoint& U1, const PhasePoint& U2) const;
    double norm(const PhasePoint& U) const { return std::sqrt(inner(U, U)); }

    // Equivalence constants against the standard H^1_0 x L^2 norm at
    // truncation M: c1 |U|_std <= |U|_E <= c2 |U|_std.
    std::pair<double, double> equivalence_constants(int M) const;

  private:
    void check(const PhasePoint& U) const;
    double nu_;
    int N_;
    double rho_tail_; // 1/4 - nu (N+1)^2
};

enum class Projection { P1, Pm1, P22 };

PhasePoint project(const PhasePoint& U, Projection which);

enum class Branch {
    C1_backward, // slow subspace E_1, t <= 0
    C2_forward,  // E_{-1} + E_22, t >= 0
};

// Exact mode-wise semigroup on the branch's subspace (the complementary
// component of U is dropped).
PhasePoint semigroup_apply(const PhasePoint& U, double t, Branch branch);

struct GapReport {
    bool heat = false;
    double nu = 0.0;
    int N = 0;
    double K = 1.0, L_F = 1.0, L_h = 0.0;
    double alpha = 0.0, beta = 0.0, eta = 0.0;
    double gap_value = 0.0;
    double strong_gap_value = 0.0;
    bool pass = false;
    bool strong_pass = false;
    bool real_regime_ok = true;
};

struct GapParams {
    double K = 1.0;
    double L_F = 1.0;
    double L_h = 0.0;
};

// Spectral gap check with eta at the midpoint of (alpha, beta):
//   gap = K L_F (1/(alpha-eta) + 1/(eta-beta))        (pass iff < 1)
//   strong = gap + K^2 L_h L_F / (alpha-eta)          (inertial-manifold form)
// heat: alpha = -N^2, beta = -(N+1)^2; wave: alpha = lambda_N^+, beta = lambda_{N+1}^+.
GapReport gap_check_heat(int N, const GapParams& p);
GapReport gap_check_wave(double nu, int N, const GapParams& p);

// Lipschitz constant of U -> (0, f(u + z)) in the E-norm: L_f / sqrt(1/4 - nu (N+1)^2).
// Bounded by 3 L_f for nu <= 5/(36 (N+1)^2) and -> 2 L_f as nu -> 0.
double wave_lipschitz(double L_f, double nu, int N);

} // namespace swm
