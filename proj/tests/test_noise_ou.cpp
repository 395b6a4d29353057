#include <doctest.h>

#include <random>
#include <sstream>

#include "swm/ou.hpp"

using namespace swm;

namespace {

// scaling-and-squaring Taylor 2x2 matrix exponential (independent of the
// closed forms under test)
Mat2 expm_taylor(Mat2 A, double t) {
    Mat2 M = A * t;
    const double nrm = std::abs(M.a11) + std::abs(M.a12) + std::abs(M.a21) + std::abs(M.a22);
    int s = 0;
    while (nrm / std::pow(2.0, s) > 0.25) ++s;
    M = M * std::pow(0.5, s);
    Mat2 out = Mat2::identity(), term = Mat2::identity();
    for (int n = 1; n <= 24; ++n) {
        term = term * M * (1.0 / n);
        out = out + term;
    }
    for (int i = 0; i < s; ++i) out = out * out;
    return out;
}

// Gauss-Legendre 16-point rule on [0,1]
struct GL16 {
    static const double x[16], w[16];
};
const double GL16::x[16] = {0.0052995325041750, 0.0277124884633837, 0.0671843988060841,
                            0.1222977958224985, 0.1910618777986781, 0.2709916111713863,
                            0.3591982246103705, 0.4524937450811813, 0.5475062549188187,
                            0.6408017753896295, 0.7290083888286137, 0.8089381222013219,
                            0.8777022041775015, 0.9328156011939159, 0.9722875115366163,
                            0.9947004674958250};
const double GL16::w[16] = {0.0135762297058770, 0.0311267619693239, 0.0475792558412464,
                            0.0623144856277669, 0.0747979944082884, 0.0845782596975013,
                            0.0913017075224618, 0.0947253052275342, 0.0947253052275342,
                            0.0913017075224618, 0.0845782596975013, 0.0747979944082884,
                            0.0623144856277669, 0.0475792558412464, 0.0311267619693239,
                            0.0135762297058770};

// int_0^h e^{A tau} B B^T e^{A^T tau} dtau by composite panels, B = (0, sqrt(q)/nu).
// Two panel layers: a fine layer on [0, 60 nu] resolving the e^{-tau/nu}
// transient and a coarse layer for the slowly decaying remainder.
Mat2 cov_quadrature(double k, double q, double nu, double h) {
    const Mat2 A = wave_companion(nu, k);
    const double bb = q / (nu * nu);
    Mat2 out{};
    auto add_layer = [&](double lo, double hi, int panels) {
        for (int p = 0; p < panels; ++p) {
            const double a = lo + (hi - lo) * p / panels, b = lo + (hi - lo) * (p + 1) / panels;
            for (int i = 0; i < 16; ++i) {
                const double tau = a + (b - a) * GL16::x[i];
                const Mat2 E = expm_taylor(A, tau);
                const Mat2 contrib{E.a12 * E.a12 * bb, E.a12 * E.a22 * bb, E.a22 * E.a12 * bb,
                                   E.a22 * E.a22 * bb};
                out = out + contrib * ((b - a) * GL16::w[i]);
            }
        }
    };
    const double cut = std::min(h, 60.0 * nu);
    add_layer(0.0, cut, 64);
    if (cut < h) add_layer(cut, h, 64);
    return out;
}

double max_abs(const Mat2& m) {
    return std::max(std::max(std::abs(m.a11), std::abs(m.a12)),
                    std::max(std::abs(m.a21), std::abs(m.a22)));
}

} // namespace

TEST_CASE("noise path regenerates bit-exactly and is window-invariant") {
    NoisePath a(123, 4, 1e-3, -100, 100);
    NoisePath b(123, 4, 1e-3, -100, 100);
    NoisePath c(123, 4, 1e-3, -2000, 2000); // extension of the same stream
    for (int k = 1; k <= 4; ++k)
        for (std::int64_t n : {std::int64_t(-100), std::int64_t(-3), std::int64_t(0),
                               std::int64_t(57)}) {
            CHECK(a.dbeta(k, n) == b.dbeta(k, n));
            CHECK(a.dbeta(k, n) == c.dbeta(k, n));
        }
    CHECK(a.dbeta(1, 5) != a.dbeta(2, 5));
    CHECK(a.dbeta(1, 5) != a.dbeta(1, 6));
    CHECK_THROWS_AS(a.dbeta(1, 101), std::out_of_range);
    CHECK_THROWS_AS(a.dbeta(5, 0), std::out_of_range);
}

TEST_CASE("increments have the Brownian law") {
    const double dt = 0.01;
    NoisePath p(7, 1, dt, 0, 200000);
    double s1 = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double d = p.dbeta(1, i);
        s1 += d;
        s2 += d * d;
    }
    const double mean = s1 / n, var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(dt / n));
    CHECK(std::abs(var - dt) < 3.0 * dt * std::sqrt(2.0 / n));
}

TEST_CASE("increments are uncorrelated across modes, steps and the residual normals") {
    const double dt = 0.01;
    NoisePath p(19, 2, dt, 0, 50000);
    const int n = 50000;
    double c_modes = 0.0, c_lag = 0.0, c_xi = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto x1 = p.xi(1, i), x2 = p.xi(2, i), x1n = p.xi(1, i + 1);
        c_modes += x1[0] * x2[0];
        c_lag += x1[0] * x1n[0];
        c_xi += x1[0] * x1[1];
    }
    const double bound = 3.0 / std::sqrt(double(n));
    CHECK(std::abs(c_modes / n) < bound);
    CHECK(std::abs(c_lag / n) < bound);
    CHECK(std::abs(c_xi / n) < bound);
}

TEST_CASE("wave mode exponentials match a Taylor expm oracle") {
    for (auto [k, nu, h] :
         {std::tuple{1.0, 0.01, 1e-3}, {5.0, 0.01, 1e-3} /* degenerate */,
          {20.0, 0.01, 1e-3} /* oscillatory */, {3.0, 0.2, 0.05}, {1.0, 1e-4, 1e-3}}) {
        const Mat2 E = wave_companion_exp(nu, k, h);
        const Mat2 ref = expm_taylor(wave_companion(nu, k), h);
        CHECK(max_abs(E - ref) <= 1e-10 * std::max(1.0, max_abs(ref)));
        const Mat2 Ec = phase_matrix_exp(nu, k, h);
        const Mat2 refc = expm_taylor(phase_matrix(nu, k), h);
        CHECK(max_abs(Ec - refc) <= 1e-10 * std::max(1.0, max_abs(refc)));
    }
}

TEST_CASE("one-step noise covariance matches the Lyapunov integral") {
    for (auto [k, nu, h] : {std::tuple{1.0, 0.01, 1e-3}, {5.0, 0.01, 1e-3}, {20.0, 0.01, 1e-3},
                            {2.0, 1e-6, 1e-3} /* stiff */, {3.0, 0.2, 0.05}}) {
        const double q = 0.7;
        const WaveModeKernel ker(k, q, nu, h);
        const Mat2 ref = cov_quadrature(k, q, nu, h);
        const double scale = std::max(1e-300, max_abs(ref));
        CHECK(max_abs(ker.sigma_step - ref) / scale < 1e-9);

        // gain assembly reproduces the exact covariance: u u^T + L L^T = Sigma
        const Mat2 uu{ker.u.x * ker.u.x, ker.u.x * ker.u.y, ker.u.y * ker.u.x,
                      ker.u.y * ker.u.y};
        const Mat2 LL = ker.L * ker.L.transpose();
        CHECK(max_abs(uu + LL - ker.sigma_step) / scale < 1e-9);
    }
}

TEST_CASE("heat kernel gains reproduce the exact convolution statistics") {
    const double k = 2.0, q = 0.3, h = 1e-2;
    const HeatModeKernel ker(k, q, h);
    const double k2 = k * k;
    CHECK(ker.conv_var == doctest::Approx(q * (1.0 - std::exp(-2 * k2 * h)) / (2 * k2)));
    CHECK(ker.g1 * std::sqrt(h) ==
          doctest::Approx(std::sqrt(q) * (1.0 - std::exp(-k2 * h)) / k2));
    CHECK(ker.g1 * ker.g1 + ker.g2 * ker.g2 == doctest::Approx(ker.conv_var).epsilon(1e-12));
}

TEST_CASE("stationary heat law: q=0 and explicit variances") {
    QSpectrum q0 = QSpectrum::zero(4);
    CHECK(sample_stationary_heat(q0, 5).norm_l2() == 0.0);

    QSpectrum Q = QSpectrum::zero(4);
    Q.q[0] = 1.0;
    Q.q[1] = 1.0 / 16.0;
    const int n = 100000;
    double v1 = 0.0, v2 = 0.0;
    for (int r = 0; r < n; ++r) {
        SpectralField z = sample_stationary_heat(Q, 1000 + r);
        v1 += z.a[0] * z.a[0];
        v2 += z.a[1] * z.a[1];
    }
    v1 /= n;
    v2 /= n;
    CHECK(std::abs(v1 - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / (n - 1.0)));
    const double th2 = 1.0 / 128.0; // q_2/(2 k^2) = (1/16)/8
    CHECK(std::abs(v2 - th2) < 3.0 * th2 * std::sqrt(2.0 / (n - 1.0)));
}

TEST_CASE("stationary wave law against an Euler-Maruyama oracle") {
    // mode k=1, q=1, nu=0.01: velocity variance 50, position variance 0.5
    const double nu = 0.01, q = 1.0;
    QSpectrum Q = QSpectrum::zero(1);
    Q.q[0] = q;

    const int n = 100000;
    double vp = 0.0, vv = 0.0, cpv = 0.0;
    for (int r = 0; r < n; ++r) {
        auto [z, zd] = sample_stationary_wave(Q, nu, 77 + r);
        vp += z.a[0] * z.a[0];
        vv += zd.a[0] * zd.a[0];
        cpv += z.a[0] * zd.a[0];
    }
    vp /= n;
    vv /= n;
    cpv /= n;
    CHECK(std::abs(vp - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / n));
    CHECK(std::abs(vv - 50.0) < 3.0 * 50.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(cpv) < 3.0 * std::sqrt(0.5 * 50.0 / n)); // per-mode independence

    // brute-force long-run simulation of nu z'' + z' + z = dW
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    const double dt = nu / 100.0, T = 400.0;
    const auto steps = static_cast<long>(T / dt);
    double z = 0.0, v = 0.0, acc_v = 0.0, acc_z = 0.0;
    long count = 0;
    for (long i = 0; i < steps; ++i) {
        const double dw = std::sqrt(dt) * gauss(rng);
        const double zn = z + dt * v;
        const double vn = v + dt * (-(v + z) / nu) + std::sqrt(q) / nu * dw;
        z = zn;
        v = vn;
        if (i > steps / 10) {
            acc_z += z * z;
            acc_v += v * v;
            ++count;
        }
    }
    acc_z /= count;
    acc_v /= count;
    // effective samples: T/(2 tau); velocity tau ~ 2 nu, position tau ~ 1
    const double se_v = 50.0 * std::sqrt(8.0 * nu / T);
    const double se_z = 0.5 * std::sqrt(4.0 / T);
    CHECK(std::abs(acc_v - 50.0) < 3.0 * se_v + 0.02 * 50.0); // + O(dt) scheme bias
    CHECK(std::abs(acc_z - 0.5) < 3.0 * se_z);
}

TEST_CASE("position law is nu-independent") {
    QSpectrum Q = QSpectrum::zero(2);
    Q.q[0] = 1.0;
    Q.q[1] = 0.25;
    const int n = 50000;
    for (double nu : {0.1, 0.01}) {
        double vp = 0.0;
        for (int r = 0; r < n; ++r) {
            auto [z, zd] = sample_stationary_wave(Q, nu, 300 + r);
            vp += z.a[0] * z.a[0];
        }
        vp /= n;
        CHECK(std::abs(vp - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / n));
    }
}

TEST_CASE("deterministic OU decay with q=0") {
    QSpectrum Q = QSpectrum::zero(3);
    NoisePath noise(5, 3, 0.01, 0, 300);
    OUInit init;
    init.heat = SpectralField::basis(3, 1);
    init.wave_pos = SpectralField(3);
    init.wave_vel = SpectralField(3);
    OUPath ou(noise, Q, 0.05, init);
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
        CHECK(ou.heat_at(t).a[0] == doctest::Approx(std::exp(-t)).epsilon(1e-12));
        CHECK(ou.wave_at(t).norm_l2() == 0.0);
        CHECK(ou.wave_vel_at(t).norm_l2() == 0.0);
    }
}

TEST_CASE("heat OU one-step autocorrelation is e^{-dt}") {
    const double dt = 0.05;
    QSpectrum Q = QSpectrum::zero(1);
    Q.q[0] = 1.0;
    NoisePath noise(21, 1, dt, 0, 100000);
    OUPath ou(noise, Q, 0.0);
    double s01 = 0.0, s00 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double z0 = ou.heat_at(i * dt).a[0], z1 = ou.heat_at((i + 1) * dt).a[0];
        s01 += z0 * z1;
        s00 += z0 * z0;
    }
    const double rho = s01 / s00, target = std::exp(-dt);
    CHECK(std::abs(rho - target) < 3.0 * (1.0 - target * target) / std::sqrt(double(n)));
}

TEST_CASE("nu^2 E|zdot|^2 equals nu Tr Q / 2 and vanishes linearly in nu") {
    QSpectrum Q = QSpectrum::power_law(8, 4.0);
    const int n = 20000;
    double prev = 0.0;
    for (double nu : {0.1, 0.01}) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r) {
            auto [z, zd] = sample_stationary_wave(Q, nu, 9000 + r);
            acc += zd.norm_l2() * zd.norm_l2();
        }
        const double nu2E = nu * nu * acc / n;
        const double law = nu * Q.trace() / 2.0;
        CHECK(std::abs(nu2E - law) < 3.0 * law * std::sqrt(2.0 / (n / 8.0)));
        if (prev > 0.0) {
            const double ratio = prev / nu2E; // nu drops by 10 => ratio ~ 10
            CHECK(ratio > 8.0);
            CHECK(ratio < 12.0);
        }
        prev = nu2E;
    }
}

TEST_CASE("wiener shift: group property and stationarity") {
    const double dt = 0.01;
    QSpectrum Q = QSpectrum::power_law(2, 4.0);
    NoisePath noise(31, 2, dt, -5000, 5000);
    OUPath ou(noise, Q, 0.02);

    OUPath s0 = ou.shift(0.0);
    CHECK(s0.heat_at(1.0).a[0] == ou.heat_at(1.0).a[0]);

    OUPath fwd = ou.shift(7.0).shift(-7.0);
    for (double t : {-3.0, 0.0, 11.0})
        CHECK(fwd.heat_at(t).a[0] == ou.heat_at(t).a[0]); // bit-exact

    OUPath sh = ou.shift(2.5);
    CHECK(sh.heat_at(0.0).a[0] == ou.heat_at(2.5).a[0]);
    CHECK(sh.wave_at(-1.0).a[1] == ou.wave_at(1.5).a[1]);
    CHECK_THROWS_AS(ou.shift(0.5 * dt), std::invalid_argument);
    CHECK_THROWS_AS(ou.shift(1e9), std::out_of_range);

    // the law of z(0) under random grid shifts stays the stationary law
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> pick(-4000, 4000);
    const int n = 10000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = pick(rng) * dt;
        const double z = ou.heat_at(s).a[0]; // = shift(s) evaluated at 0
        acc += z * z;
    }
    acc /= n;
    const double th = Q.q[0] / 2.0;
    // shifted samples are strongly correlated; slack for the small effective sample
    CHECK(std::abs(acc - th) < 5.0 * th * std::sqrt(2.0 / (n / 50.0)));
}

TEST_CASE("sublinear growth: |z(t)|/t decays tenfold per decade") {
    QSpectrum Q = QSpectrum::power_law(4, 4.0);
    const double dt = 25.0;
    const int seeds = 100;
    std::vector<double> ratios;
    for (int s = 0; s < seeds; ++s) {
        NoisePath noise(300 + s, 4, dt, 0, 400);
        OUPath ou(noise, Q, 0.0);
        auto decade_max = [&](double lo, double hi) {
            double m = 0.0;
            // equal sample count per decade (16 log-spaced grid times)
            for (int i = 0; i < 16; ++i) {
                double t = lo * std::pow(hi / lo, i / 15.0);
                t = std::round(t / dt) * dt;
                m = std::max(m, ou.heat_at(t).norm_l2() / t);
            }
            return m;
        };
        ratios.push_back(decade_max(1000.0, 10000.0) / decade_max(100.0, 1000.0));
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[seeds / 2] <= 0.1);
}

TEST_CASE("OU csv dump has the documented columns") {
    QSpectrum Q = QSpectrum::power_law(2, 4.0);
    NoisePath noise(1, 2, 0.5, 0, 2);
    OUPath ou(noise, Q, 0.05);
    std::ostringstream os;
    ou.dump_csv(os);
    CHECK(os.str().rfind("t,mode,z_heat,z_wave,zdot_wave\n", 0) == 0);
}
