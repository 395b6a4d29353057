#pragma once

// Exact one-mode propagators and quadrature weights shared by the OU layer,
// the SDE integrators and the Lyapunov-Perron solvers.
//
// Both damped-wave mode matrices have the form M = -gamma*I + D with
// D^2 = x*I, x = (1 - 4 nu k^2)/(4 nu^2), so
//     exp(M t) = e^{-gamma t} [ cosh(theta t) I + sinh(theta t)/theta D ],
// theta = sqrt(x) (oscillatory for x < 0, where cosh/sinh turn into cos/sin).
// All evaluations below avoid cancellation and overflow across the whole
// nu in [1e-6, 1/4), dt in [1e-6, 1] range:
//   - lambda^+ = -2k^2/(1 + sqrt(1-4 nu k^2)) instead of the difference form,
//   - expm1-based sinh quotients, series fallbacks near theta ~ 0,
//   - one-step noise covariance as P_inf - E P_inf E^T (exact; no stiffness
//     constraint for nu << dt).

#include <array>
#include <cmath>
#include <stdexcept>

namespace swm {

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
};

struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator*(double c) const { return {c * a11, c * a12, c * a21, c * a22}; }
    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    Mat2 inverse() const {
        double det = a11 * a22 - a12 * a21;
        if (det == 0.0) throw std::runtime_error("Mat2: singular");
        return {a22 / det, -a12 / det, -a21 / det, a11 / det};
    }
};

// phi1(z) = (e^z - 1)/z
double phi1(double z);
// psi(z) = int_0^1 s e^{z s} ds = (z e^z - e^z + 1)/z^2
double psi(double z);

// Trapezoidal exponential weights for one scalar mode with rate a over step h:
//   int_t^{t+h} e^{a (t+h-s)} g(s) ds  ~=  w_old * g(t) + w_new * g(t+h)
// (g linear in s; exact linear factor). w_old = h*psi(a h), w_new = h*(phi1-psi).
struct ScalarWeights {
    double w_old, w_new;
};
ScalarWeights scalar_weights(double a, double h);

// e^{-gamma t} cosh(theta t) and e^{-gamma t} sinh(theta t)/theta for
// x = theta^2 of either sign; requires t >= 0 when gamma is large.
struct DampedValues {
    double ec, es;
};
DampedValues damped_exp(double gamma, double x, double t);

// Stable damped-wave eigenvalues of nu z'' + z' + k^2 z = 0:
//   lambda^{+-} = (-1 +- sqrt(1 - 4 nu k^2)) / (2 nu)   (complex if negative disc)
struct WaveEigen {
    double lam_plus = 0.0, lam_minus = 0.0; // valid in the real regime
    double x = 0.0;                         // theta^2 (signed)
    bool real_regime = true;
};
WaveEigen wave_eigen(double nu, double k);

// Companion-form mode matrix of the wave equation, state (z, z'):
//   A = [[0, 1], [-k^2/nu, -1/nu]]
Mat2 wave_companion(double nu, double k);
Mat2 wave_companion_exp(double nu, double k, double t);

// Phase-space mode matrix of the transformed wave system, state (u, v),
// v = nu u' + u/2:  C = [[-1/(2nu), 1/nu], [1/(4nu) - k^2, -1/(2nu)]]
Mat2 phase_matrix(double nu, double k);
Mat2 phase_matrix_exp(double nu, double k, double t);

// Quadrature weights for a 2x2 mode matrix M over step h (same convention as
// scalar_weights): increment ~= W_old g(t) + W_new g(t+h), g vector-valued.
struct Mat2Weights {
    Mat2 w_old, w_new;
};
Mat2Weights mat2_weights(const Mat2& M, const Mat2& expMh, double h);

// --- one-step transition kernels -------------------------------------------

// Heat mode k: z' = -k^2 z + sqrt(q) dW. Exact transition
//   z(t+h) = decay z(t) + I,   I = g1 xi1 + g2 xi2,
// Var I = q (1-e^{-2k^2 h})/(2k^2) exactly and Cov(I, dbeta) = sqrt(q) (1-e^{-k^2 h})/k^2,
// dbeta = sqrt(h) xi1 being the Brownian increment of the shared noise path.
struct HeatModeKernel {
    double decay = 0.0;
    double g1 = 0.0, g2 = 0.0;
    double conv_var = 0.0;

    HeatModeKernel() = default;
    HeatModeKernel(double k, double q, double h);
    double noise(double xi1, double xi2) const { return g1 * xi1 + g2 * xi2; }
};

// Wave mode k, state (z, z'): nu z'' + z' + k^2 z = sqrt(q) dW. Exact transition
//   X(t+h) = E X(t) + I,  I = u xi1 + L (xi2, xi3)^T,
// with exact one-step covariance Sigma = P_inf - E P_inf E^T,
// P_inf = diag(q/(2k^2), q/(2 nu)), and exact Cov(I, dbeta) = Phi1 B sqrt(q).
struct WaveModeKernel {
    Mat2 E;
    Vec2 u;          // xi1 gains
    Mat2 L;          // lower-triangular residual factor (a12 = 0)
    Mat2 sigma_step; // exact one-step covariance (diagnostics/tests)
    Vec2 stat_var;   // stationary variances (position, velocity)

    WaveModeKernel() = default;
    WaveModeKernel(double k, double q, double nu, double h);
    Vec2 noise(const std::array<double, 3>& xi) const {
        return {u.x * xi[0] + L.a11 * xi[1],
                u.y * xi[0] + L.a21 * xi[1] + L.a22 * xi[2]};
    }
};

} // namespace swm
