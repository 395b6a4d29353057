#include <doctest.h>

#include <random>
#include <tuple>
#include <vector>

#include "swm/wave_operator.hpp"

using namespace swm;

namespace {

PhasePoint random_point(std::size_t M, double nu, int N, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    PhasePoint U = PhasePoint::zero(M, nu, N);
    for (std::size_t i = 0; i < M; ++i) {
        U.u.a[i] = gauss(rng);
        U.v.a[i] = gauss(rng);
    }
    return U;
}

// naive closed form, independent of the cancellation-safe library path
double lam_plus_naive(double nu, double k) { return (-1.0 + std::sqrt(1.0 - 4 * nu * k * k)) / (2 * nu); }

} // namespace

TEST_CASE("closed-form eigenvalues") {
    // nu = 0.01, k = 4: sqrt(1 - 0.64) = 0.6 => (-20, -80)
    const EigenPair e4 = eigen(4, 0.01);
    CHECK(std::abs(e4.lambda_plus + 20.0) < 1e-12);
    CHECK(std::abs(e4.lambda_minus + 80.0) < 1e-12);
    CHECK(e4.c_k == doctest::Approx(0.3).epsilon(1e-14));

    const EigenPair e1 = eigen(1, 0.01);
    CHECK(e1.lambda_plus == doctest::Approx(-1.01021).epsilon(1e-5));
    CHECK(e1.lambda_minus == doctest::Approx(-98.98979).epsilon(1e-5));
    CHECK(e1.lambda_plus == doctest::Approx(lam_plus_naive(0.01, 1)).epsilon(1e-12));

    // nu -> 0: lambda_k^+ -> -k^2
    const EigenPair small = eigen(1, 1e-6);
    CHECK(std::abs(small.lambda_plus + 1.0) < 1e-5);

    // complex regime flagged
    CHECK_FALSE(eigen(20, 0.01).real_regime);
    CHECK_THROWS_AS(eigenvector(20, true, 0.01, 2, 32), std::invalid_argument);
}

TEST_CASE("lambda_k^+ increases monotonically to -k^2 as nu decreases") {
    for (int k : {1, 2, 3}) {
        double prev = -1e300;
        for (double nu : {1e-2, 1e-3, 1e-5, 1e-7}) {
            const double lp = eigen(k, nu).lambda_plus;
            CHECK(lp > prev);
            CHECK(lp <= -double(k) * k);
            prev = lp;
        }
        CHECK(std::abs(prev + k * k) < 1e-4);
    }
}

TEST_CASE("eigen-residual of C on the eigenvectors is at rounding level") {
    const double nu = 0.01;
    const int N = 3, M = 16;
    const EMetric metric(nu, N);
    for (int k = 1; k <= 4; ++k) { // includes the first fast mode k=4
        for (bool plus : {true, false}) {
            const PhasePoint e = eigenvector(k, plus, nu, N, M);
            const EigenPair ep = eigen(k, nu);
            const double lam = plus ? ep.lambda_plus : ep.lambda_minus;
            const PhasePoint r = apply_C(e) - lam * e;
            CHECK(metric.norm(r) <= 1e-12);
        }
    }
}

TEST_CASE("E-metric geometry") {
    const double nu = 0.01;
    const int N = 2, M = 16;
    const EMetric metric(nu, N);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;

    // |(0, v)|_E = |v|
    for (int t = 0; t < 1000; ++t) {
        PhasePoint U = PhasePoint::zero(M, nu, N);
        for (std::size_t i = 0; i < M; ++i) U.v.a[i] = gauss(rng);
        CHECK(metric.norm(U) == doctest::Approx(U.v.norm_l2()).epsilon(1e-13));
    }

    // <e_k^+, e_k^->_E = 0 for k <= N
    for (int k = 1; k <= N; ++k) {
        const PhasePoint ep = eigenvector(k, true, nu, N, M);
        const PhasePoint em = eigenvector(k, false, nu, N, M);
        CHECK(std::abs(metric.inner(ep, em)) <= 1e-14);
    }

    // |(e_1, 0)|_E^2 = 1/4 - nu
    PhasePoint U1 = PhasePoint::zero(M, nu, N);
    U1.u.a[0] = 1.0;
    CHECK(metric.inner(U1, U1) == doctest::Approx(0.24).epsilon(1e-14));

    // lower bound |U|_E >= sqrt(1/4 - nu (N+1)^2) |u|
    const double c = std::sqrt(0.25 - nu * (N + 1) * (N + 1));
    for (int t = 0; t < 1000; ++t) {
        const PhasePoint U = random_point(M, nu, N, rng);
        CHECK(metric.norm(U) >= c * U.u.norm_l2() - 1e-12);
    }

    // equivalence with the standard H^1_0 x L^2 norm
    const auto [c1, c2] = metric.equivalence_constants(M);
    CHECK(c1 > 0.0);
    for (int t = 0; t < 200; ++t) {
        const PhasePoint U = random_point(M, nu, N, rng);
        const double std_norm = std::sqrt(U.u.norm_h1() * U.u.norm_h1() +
                                          U.v.norm_l2() * U.v.norm_l2());
        CHECK(metric.norm(U) <= c2 * std_norm * (1 + 1e-12));
        CHECK(metric.norm(U) >= c1 * std_norm * (1 - 1e-12));
    }

    CHECK_THROWS_AS(EMetric(0.1, 2), std::invalid_argument); // nu >= 1/(4 (N+1)^2)
}

TEST_CASE("spectral projections decompose the phase space") {
    const double nu = 1e-3;
    const int N = 3, M = 12;
    const EMetric metric(nu, N);
    std::mt19937_64 rng(23);

    // eigenvectors project onto their own subspaces
    const PhasePoint ep = eigenvector(2, true, nu, N, M);
    CHECK(metric.norm(project(ep, Projection::P1) - ep) < 1e-13);
    CHECK(metric.norm(project(ep, Projection::Pm1)) < 1e-14);
    CHECK(metric.norm(project(ep, Projection::P22)) < 1e-14);

    PhasePoint hi = PhasePoint::zero(M, nu, N);
    hi.u.a[7] = 1.0;
    hi.v.a[9] = -2.0;
    CHECK(metric.norm(project(hi, Projection::P22) - hi) < 1e-14);

    for (int t = 0; t < 100; ++t) {
        const PhasePoint U = random_point(M, nu, N, rng);
        const PhasePoint p1 = project(U, Projection::P1);
        const PhasePoint pm = project(U, Projection::Pm1);
        const PhasePoint p22 = project(U, Projection::P22);

        // completeness and idempotence
        CHECK(metric.norm(p1 + pm + p22 - U) < 1e-12 * std::max(1.0, metric.norm(U)));
        CHECK(metric.norm(project(p1, Projection::P1) - p1) < 1e-13);
        CHECK(metric.norm(project(pm, Projection::Pm1) - pm) < 1e-13);

        // mutual E-orthogonality => Pythagoras
        const double total = metric.inner(U, U);
        const double parts =
            metric.inner(p1, p1) + metric.inner(pm, pm) + metric.inner(p22, p22);
        CHECK(parts == doctest::Approx(total).epsilon(1e-12));
        CHECK(std::abs(metric.inner(p1, pm)) < 1e-12 * std::max(1.0, total));
        CHECK(std::abs(metric.inner(p1, p22)) < 1e-12 * std::max(1.0, total));
        CHECK(std::abs(metric.inner(pm, p22)) < 1e-12 * std::max(1.0, total));
    }
}

TEST_CASE("semigroup: identity at t=0 and scalar decay on eigenvectors") {
    const double nu = 1e-3;
    const int N = 2, M = 8;
    const EMetric metric(nu, N);

    const PhasePoint eN = eigenvector(N, true, nu, N, M);
    CHECK(metric.norm(semigroup_apply(eN, 0.0, Branch::C1_backward) - eN) < 1e-14);

    const double lam = eigen(N, nu).lambda_plus;
    const PhasePoint back = semigroup_apply(eN, -1.0, Branch::C1_backward);
    CHECK(metric.norm(back) == doctest::Approx(std::exp(-lam) * metric.norm(eN)).epsilon(1e-12));

    CHECK_THROWS_AS(semigroup_apply(eN, 1.0, Branch::C1_backward), std::invalid_argument);
    CHECK_THROWS_AS(semigroup_apply(eN, -1.0, Branch::C2_forward), std::invalid_argument);
}

TEST_CASE("dichotomy bounds hold with constant 1 in the E-norm") {
    std::mt19937_64 rng(29);
    const double slack = 1.0 + 1e-10;
    // desk-scale real-regime case and a large-M case with oscillatory modes
    const std::vector<std::tuple<double, int, int>> cases{
        {1e-4, 2, 16}, {1e-4, 2, 120}, {0.01, 2, 24}};
    for (auto [nu, N, M] : cases) {
        const EMetric metric(nu, N);
        const double lamN = eigen(N, nu).lambda_plus;
        const double lamN1 = eigen(N + 1, nu).lambda_plus;
        for (int t_i = 0; t_i < 4; ++t_i) {
            const double t = std::vector<double>{0.1, 0.5, 1.0, 5.0}[t_i];
            for (int trial = 0; trial < 100; ++trial) {
                const PhasePoint U = random_point(M, nu, N, rng);
                const PhasePoint p1 = project(U, Projection::P1);
                const PhasePoint p2 = U - p1; // E_{-1} + E_22 component
                const double n1 = metric.norm(semigroup_apply(p1, -t, Branch::C1_backward));
                CHECK(n1 <= std::exp(-lamN * t) * metric.norm(p1) * slack);
                const double n2 = metric.norm(semigroup_apply(p2, t, Branch::C2_forward));
                CHECK(n2 <= std::exp(lamN1 * t) * metric.norm(p2) * slack);
                // fast slow-mode branch alone decays at least at rate lambda_N^-
                const PhasePoint pm = project(U, Projection::Pm1);
                const double nm = metric.norm(semigroup_apply(pm, t, Branch::C2_forward));
                CHECK(nm <= std::exp(eigen(N, nu).lambda_minus * t) * metric.norm(pm) * slack);
            }
        }
    }
}

TEST_CASE("gap arithmetic: heat and wave cases") {
    const GapParams unit{1.0, 1.0, 0.0};

    const GapReport h2 = gap_check_heat(2, unit);
    CHECK(h2.alpha == -4.0);
    CHECK(h2.beta == -9.0);
    CHECK(h2.eta == -6.5);
    CHECK(std::abs(h2.gap_value - 0.8) < 1e-15);
    CHECK(h2.pass);

    const GapReport h1 = gap_check_heat(1, unit);
    CHECK(std::abs(h1.gap_value - 4.0 / 3.0) < 1e-15);
    CHECK_FALSE(h1.pass);

    // wave nu=1e-4, N=2; oracle: naive closed-form eigenvalues + arithmetic
    const GapReport w = gap_check_wave(1e-4, 2, unit);
    const double a = lam_plus_naive(1e-4, 2), b = lam_plus_naive(1e-4, 3);
    const double eta = 0.5 * (a + b);
    const double gap = 1.0 / (a - eta) + 1.0 / (eta - b);
    CHECK(w.gap_value == doctest::Approx(gap).epsilon(1e-10));
    CHECK(w.gap_value == doctest::Approx(0.79896).epsilon(1e-4));
    CHECK(w.pass);

    // strong form adds K^2 L_h L_F/(alpha-eta)
    const GapReport s = gap_check_heat(2, GapParams{1.0, 1.0, 0.25});
    CHECK(s.strong_gap_value == doctest::Approx(0.8 + 0.25 / 2.5).epsilon(1e-14));

    // out-of-regime wave case is reported, not thrown
    const GapReport bad = gap_check_wave(0.1, 2, unit);
    CHECK_FALSE(bad.real_regime_ok);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("wave gap approaches the heat gap from below as nu -> 0") {
    const GapParams unit{1.0, 1.0, 0.0};
    const double heat_gap = gap_check_heat(2, unit).gap_value;
    double prev = 0.0;
    for (double nu : {1e-3, 1e-5, 1e-7}) {
        const double g = gap_check_wave(nu, 2, unit).gap_value;
        CHECK(g < heat_gap);
        CHECK(g > prev); // monotone toward the heat value
        prev = g;
    }
    CHECK(prev == doctest::Approx(heat_gap).epsilon(1e-5));
}

TEST_CASE("effective wave Lipschitz constant") {
    // exact bound L_f / sqrt(1/4 - nu (N+1)^2); paper-regime cap 3 L_f
    CHECK(wave_lipschitz(0.5, 1e-6, 2) == doctest::Approx(1.0).epsilon(1e-4));
    const double nu_max = 5.0 / (36.0 * 9.0); // validity edge for N = 2
    CHECK(wave_lipschitz(1.0, nu_max, 2) <= 3.0 + 1e-12);
    CHECK(wave_lipschitz(1.0, 1e-8, 2) == doctest::Approx(2.0).epsilon(1e-6));
}
