#include "swm/kernels.hpp"

namespace swm {

double phi1(double z) {
    if (z == 0.0) return 1.0;
    if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    return std::expm1(z) / z;
}

double psi(double z) {
    if (std::abs(z) < 1e-3) {
        // sum (n+1) z^n / (n+2)!
        return 0.5 + z * (1.0 / 3.0 + z * (1.0 / 8.0 + z * (1.0 / 30.0 + z * (1.0 / 144.0 + z / 840.0))));
    }
    return ((z - 1.0) * std::expm1(z) + z) / (z * z);
}

ScalarWeights scalar_weights(double a, double h) {
    double z = a * h;
    return {h * psi(z), h * (phi1(z) - psi(z))};
}

DampedValues damped_exp(double gamma, double x, double t) {
    if (t < 0.0) throw std::invalid_argument("damped_exp: t must be >= 0");
    const double xt2 = x * t * t;
    const double eg = std::exp(-gamma * t);
    if (std::abs(xt2) < 1e-8) {
        double ec = eg * (1.0 + 0.5 * xt2 + xt2 * xt2 / 24.0);
        double es = eg * t * (1.0 + xt2 / 6.0 + xt2 * xt2 / 120.0);
        return {ec, es};
    }
    if (x > 0.0) {
        const double theta = std::sqrt(x);
        const double lam_m_t = -(gamma + theta) * t;
        const double two_tt = 2.0 * theta * t;
        if (two_tt > 500.0) {
            // e^{lam_minus t} negligible against e^{lam_plus t}
            const double ep = std::exp((theta - gamma) * t);
            return {0.5 * ep, 0.5 * ep / theta};
        }
        const double em = std::exp(lam_m_t);
        const double ec = 0.5 * (em * std::exp(two_tt) + em);
        const double es = em * std::expm1(two_tt) / (2.0 * theta);
        return {ec, es};
    }
    const double thc = std::sqrt(-x);
    const double w = thc * t;
    return {eg * std::cos(w), eg * t * (std::sin(w) / w)};
}

WaveEigen wave_eigen(double nu, double k) {
    if (nu <= 0.0) throw std::invalid_argument("wave_eigen: nu must be > 0");
    WaveEigen e;
    const double disc = 1.0 - 4.0 * nu * k * k;
    e.x = disc / (4.0 * nu * nu);
    e.real_regime = disc > 0.0;
    if (e.real_regime) {
        const double r = std::sqrt(disc);
        e.lam_plus = -2.0 * k * k / (1.0 + r);
        e.lam_minus = -(1.0 + r) / (2.0 * nu);
    } else {
        e.lam_plus = e.lam_minus = -0.5 / nu; // real part only
    }
    return e;
}

Mat2 wave_companion(double nu, double k) {
    return {0.0, 1.0, -k * k / nu, -1.0 / nu};
}

Mat2 wave_companion_exp(double nu, double k, double t) {
    const double gamma = 0.5 / nu;
    const auto [ec, es] = damped_exp(gamma, wave_eigen(nu, k).x, t);
    // exp = ec I + es (A + gamma I)
    return {ec + gamma * es, es, -(k * k / nu) * es, ec - gamma * es};
}

Mat2 phase_matrix(double nu, double k) {
    return {-0.5 / nu, 1.0 / nu, 0.25 / nu - k * k, -0.5 / nu};
}

Mat2 phase_matrix_exp(double nu, double k, double t) {
    const double gamma = 0.5 / nu;
    const auto [ec, es] = damped_exp(gamma, wave_eigen(nu, k).x, t);
    // exp = ec I + es D, D = [[0, 1/nu], [(1-4 nu k^2)/(4 nu), 0]]
    return {ec, es / nu, es * (0.25 / nu - k * k), ec};
}

Mat2Weights mat2_weights(const Mat2& M, const Mat2& expMh, double h) {
    const Mat2 Minv = M.inverse();
    const Mat2 phi1m = Minv * (expMh - Mat2::identity());   // int_0^h e^{M tau} dtau
    const Mat2 phi2m = Minv * (expMh * h - phi1m);          // int_0^h e^{M tau} tau dtau
    const Mat2 w_old = phi2m * (1.0 / h);
    return {w_old, phi1m - w_old};
}

HeatModeKernel::HeatModeKernel(double k, double q, double h) {
    const double k2 = k * k;
    decay = std::exp(-k2 * h);
    if (q <= 0.0) return;
    conv_var = q * (-std::expm1(-2.0 * k2 * h)) / (2.0 * k2);
    const double cov = std::sqrt(q) * (-std::expm1(-k2 * h)) / k2;
    g1 = cov / std::sqrt(h);
    g2 = std::sqrt(std::max(conv_var - g1 * g1, 0.0));
}

WaveModeKernel::WaveModeKernel(double k, double q, double nu, double h) {
    E = wave_companion_exp(nu, k, h);
    if (q <= 0.0) return;
    stat_var = {q / (2.0 * k * k), q / (2.0 * nu)};
    const Mat2 P{stat_var.x, 0.0, 0.0, stat_var.y};
    sigma_step = P - E * P * E.transpose();
    // Cov(I, dbeta) = Phi1 * B, B = (0, sqrt(q)/nu)
    const Mat2 A = wave_companion(nu, k);
    const Mat2 phi1m = A.inverse() * (E - Mat2::identity());
    const Vec2 cov{phi1m.a12 * std::sqrt(q) / nu, phi1m.a22 * std::sqrt(q) / nu};
    u = cov * (1.0 / std::sqrt(h));
    const double r11 = std::max(sigma_step.a11 - u.x * u.x, 0.0);
    const double r21 = sigma_step.a21 - u.x * u.y;
    const double r22 = sigma_step.a22 - u.y * u.y;
    L.a11 = std::sqrt(r11);
    L.a21 = (L.a11 > 0.0) ? r21 / L.a11 : 0.0;
    L.a22 = std::sqrt(std::max(r22 - L.a21 * L.a21, 0.0));
}

} // namespace swm
