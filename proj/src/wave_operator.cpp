#include "swm/wave_operator.hpp"

namespace swm {

PhasePoint& PhasePoint::operator+=(const PhasePoint& o) {
    u += o.u;
    v += o.v;
    return *this;
}
PhasePoint& PhasePoint::operator-=(const PhasePoint& o) {
    u -= o.u;
    v -= o.v;
    return *this;
}
PhasePoint& PhasePoint::operator*=(double c) {
    u *= c;
    v *= c;
    return *this;
}

EigenPair eigen(int k, double nu) {
    if (k < 1) throw std::invalid_argument("eigen: k must be >= 1");
    const WaveEigen we = wave_eigen(nu, static_cast<double>(k));
    EigenPair e;
    e.k = k;
    e.real_regime = we.real_regime;
    e.lambda_plus = we.lam_plus;
    e.lambda_minus = we.lam_minus;
    e.c_k = we.real_regime ? 0.5 * std::sqrt(1.0 - 4.0 * nu * k * k) : 0.0;
    return e;
}

PhasePoint eigenvector(int k, bool plus, double nu, int N, std::size_t M) {
    const EigenPair e = eigen(k, nu);
    if (!e.real_regime) throw std::invalid_argument("eigenvector: mode in the complex regime");
    PhasePoint U = PhasePoint::zero(M, nu, N);
    U.u.a[k - 1] = 1.0;
    U.v.a[k - 1] = plus ? e.c_k : -e.c_k;
    return U;
}

PhasePoint apply_C(const PhasePoint& U) {
    if (U.nu <= 0.0) throw std::invalid_argument("apply_C: nu must be > 0");
    const double inv = 1.0 / U.nu;
    PhasePoint out = PhasePoint::zero(U.modes(), U.nu, U.N);
    for (std::size_t i = 0; i < U.modes(); ++i) {
        const double k2 = static_cast<double>((i + 1) * (i + 1));
        out.u.a[i] = -0.5 * inv * U.u.a[i] + inv * U.v.a[i];
        out.v.a[i] = (0.25 * inv - k2) * U.u.a[i] - 0.5 * inv * U.v.a[i];
    }
    return out;
}

EMetric::EMetric(double nu, int N) : nu_(nu), N_(N) {
    if (N < 1) throw std::invalid_argument("EMetric: N must be >= 1");
    rho_tail_ = 0.25 - nu * (N + 1.0) * (N + 1.0);
    if (!(nu > 0.0) || rho_tail_ <= 0.0)
        throw std::invalid_argument("EMetric: requires 0 < nu < 1/(4 (N+1)^2)");
}

double EMetric::weight(int k) const {
    const double kk = static_cast<double>(k) * k;
    if (k <= N_) return 0.25 - nu_ * kk;
    return std::max(rho_tail_, nu_ * kk - 0.25);
}

void EMetric::check(const PhasePoint& U) const {
    if (U.nu != nu_ || U.N != N_)
        throw std::invalid_argument("EMetric: PhasePoint parameter mismatch");
}

double EMetric::inner(const PhasePoint& U1, const PhasePoint& U2) const {
    check(U1);
    check(U2);
    if (U1.modes() != U2.modes()) throw std::invalid_argument("EMetric: truncation mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < U1.modes(); ++i) {
        s += weight(static_cast<int>(i + 1)) * U1.u.a[i] * U2.u.a[i] + U1.v.a[i] * U2.v.a[i];
    }
    return s;
}

std::pair<double, double> EMetric::equivalence_constants(int M) const {
    double lo = 1.0, hi = 1.0;
    for (int k = 1; k <= M; ++k) {
        const double r = weight(k) / (static_cast<double>(k) * k);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {std::sqrt(lo), std::sqrt(hi)};
}

PhasePoint project(const PhasePoint& U, Projection which) {
    PhasePoint out = PhasePoint::zero(U.modes(), U.nu, U.N);
    const int N = U.N;
    if (which == Projection::P22) {
        for (std::size_t i = N; i < U.modes(); ++i) {
            out.u.a[i] = U.u.a[i];
            out.v.a[i] = U.v.a[i];
        }
        return out;
    }
    for (int k = 1; k <= N && k <= static_cast<int>(U.modes()); ++k) {
        const EigenPair e = eigen(k, U.nu);
        if (!e.real_regime)
            throw std::invalid_argument("project: mode k <= N in the complex regime");
        const double a_plus = 0.5 * (U.u.a[k - 1] + U.v.a[k - 1] / e.c_k);
        const double a_minus = 0.5 * (U.u.a[k - 1] - U.v.a[k - 1] / e.c_k);
        const double a = (which == Projection::P1) ? a_plus : a_minus;
        const double sgn = (which == Projection::P1) ? 1.0 : -1.0;
        out.u.a[k - 1] = a;
        out.v.a[k - 1] = sgn * a * e.c_k;
    }
    return out;
}

PhasePoint semigroup_apply(const PhasePoint& U, double t, Branch branch) {
    if (branch == Branch::C1_backward && t > 0.0)
        throw std::invalid_argument("semigroup_apply: C1 branch needs t <= 0");
    if (branch == Branch::C2_forward && t < 0.0)
        throw std::invalid_argument("semigroup_apply: C2 branch needs t >= 0");
    PhasePoint out = PhasePoint::zero(U.modes(), U.nu, U.N);
    const int N = U.N;
    for (int k = 1; k <= static_cast<int>(U.modes()); ++k) {
        if (k <= N) {
            const EigenPair e = eigen(k, U.nu);
            if (!e.real_regime)
                throw std::invalid_argument("semigroup_apply: mode k <= N in the complex regime");
            const double a_plus = 0.5 * (U.u.a[k - 1] + U.v.a[k - 1] / e.c_k);
            const double a_minus = 0.5 * (U.u.a[k - 1] - U.v.a[k - 1] / e.c_k);
            if (branch == Branch::C1_backward) {
                const double a = a_plus * std::exp(e.lambda_plus * t);
                out.u.a[k - 1] = a;
                out.v.a[k - 1] = a * e.c_k;
            } else {
                const double a = a_minus * std::exp(e.lambda_minus * t);
                out.u.a[k - 1] = a;
                out.v.a[k - 1] = -a * e.c_k;
            }
        } else if (branch == Branch::C2_forward) {
            const Mat2 E = phase_matrix_exp(U.nu, static_cast<double>(k), t);
            const Vec2 w = E * Vec2{U.u.a[k - 1], U.v.a[k - 1]};
            out.u.a[k - 1] = w.x;
            out.v.a[k - 1] = w.y;
        }
    }
    return out;
}

namespace {
GapReport fill_gap(GapReport r, const GapParams& p) {
    r.K = p.K;
    r.L_F = p.L_F;
    r.L_h = p.L_h;
    r.eta = 0.5 * (r.alpha + r.beta);
    const double da = r.alpha - r.eta;
    const double db = r.eta - r.beta;
    r.gap_value = p.K * p.L_F * (1.0 / da + 1.0 / db);
    r.strong_gap_value = r.gap_value + p.K * p.K * p.L_h * p.L_F / da;
    r.pass = r.real_regime_ok && r.gap_value < 1.0;
    r.strong_pass = r.real_regime_ok && r.strong_gap_value < 1.0;
    return r;
}
} // namespace

GapReport gap_check_heat(int N, const GapParams& p) {
    if (N < 1) throw std::invalid_argument("gap_check: N must be >= 1");
    GapReport r;
    r.heat = true;
    r.N = N;
    r.alpha = -static_cast<double>(N) * N;
    r.beta = -static_cast<double>(N + 1) * (N + 1);
    return fill_gap(r, p);
}

GapReport gap_check_wave(double nu, int N, const GapParams& p) {
    if (N < 1) throw std::invalid_argument("gap_check: N must be >= 1");
    GapReport r;
    r.nu = nu;
    r.N = N;
    r.real_regime_ok = nu > 0.0 && 4.0 * nu * (N + 1.0) * (N + 1.0) < 1.0;
    if (!r.real_regime_ok) {
        r.pass = r.strong_pass = false;
        r.K = p.K;
        r.L_F = p.L_F;
        r.L_h = p.L_h;
        return r;
    }
    r.alpha = eigen(N, nu).lambda_plus;
    r.beta = eigen(N + 1, nu).lambda_plus;
    return fill_gap(r, p);
}

double wave_lipschitz(double L_f, double nu, int N) {
    const double rho = 0.25 - nu * (N + 1.0) * (N + 1.0);
    if (rho <= 0.0) throw std::invalid_argument("wave_lipschitz: nu too large for N");
    return L_f / std::sqrt(rho);
}

} // namespace swm
