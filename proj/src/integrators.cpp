#include "swm/integrators.hpp"

namespace swm {

namespace {
void guard(const SpectralField& u, const char* what) {
    for (double x : u.a)
        if (!std::isfinite(x) || std::abs(x) > kBlowupGuard)
            throw NumericalError(std::string(what) + ": blow-up detected");
}
} // namespace

void TrajectoryRecord::dump_csv(std::ostream& os) const {
    os << "t,u_norm,v_norm";
    if (!u_fields.empty())
        for (int k = 1; k <= M; ++k) os << ",u_" << k;
    os << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << times[i] << ',' << u_norm[i] << ',' << (i < v_norm.size() ? v_norm[i] : 0.0);
        if (!u_fields.empty())
            for (int k = 0; k < M; ++k) os << ',' << u_fields[i].a[k];
        os << '\n';
    }
}

HeatIntegrator::HeatIntegrator(const QSpectrum& Q, const Nonlinearity& f, const GridConfig& grid)
    : f_(f), plan_(grid.M, grid.M_phys), sigma_(Q.sigma) {
    grid.validate();
    Q.validate();
    if (static_cast<int>(Q.modes()) != grid.M)
        throw ConfigError("HeatIntegrator: Q mode count mismatch");
    kern_.reserve(grid.M);
    phi_.resize(grid.M);
    for (int k = 1; k <= grid.M; ++k) {
        kern_.emplace_back(k, Q.q[k - 1], grid.dt);
        phi_[k - 1] = grid.dt * phi1(-static_cast<double>(k) * k * grid.dt);
    }
}

void HeatIntegrator::step(SpectralField& u, const NoisePath& noise, std::int64_t n) const {
    const int M = static_cast<int>(kern_.size());
    SpectralField g(M);
    if (!f_.is_zero()) g = apply_nonlinearity(u, SpectralField(M), f_, plan_);
    for (int k = 0; k < M; ++k) {
        const auto xi = noise.xi(k + 1, n);
        u.a[k] = kern_[k].decay * u.a[k] + phi_[k] * g.a[k] +
                 sigma_ * kern_[k].noise(xi[0], xi[1]);
    }
    guard(u, "HeatIntegrator");
}

WaveIntegrator::WaveIntegrator(const QSpectrum& Q, const Nonlinearity& f, double nu,
                               const GridConfig& grid)
    : f_(f), plan_(grid.M, grid.M_phys), sigma_(Q.sigma), nu_(nu) {
    grid.validate();
    Q.validate();
    if (nu <= 0.0) throw ConfigError("WaveIntegrator: nu must be > 0");
    if (static_cast<int>(Q.modes()) != grid.M)
        throw ConfigError("WaveIntegrator: Q mode count mismatch");
    kern_.reserve(grid.M);
    w_old_.resize(grid.M);
    w_new_.resize(grid.M);
    for (int k = 1; k <= grid.M; ++k) {
        kern_.emplace_back(k, Q.q[k - 1], nu, grid.dt);
        const Mat2 A = wave_companion(nu, k);
        const auto w = mat2_weights(A, kern_.back().E, grid.dt);
        // forcing enters as (0, f/nu)
        w_old_[k - 1] = Vec2{w.w_old.a12, w.w_old.a22} * (1.0 / nu);
        w_new_[k - 1] = Vec2{w.w_new.a12, w.w_new.a22} * (1.0 / nu);
    }
}

void WaveIntegrator::step(SpectralField& u, SpectralField& v, const NoisePath& noise,
                          std::int64_t n) const {
    const int M = static_cast<int>(kern_.size());
    SpectralField g0(M), g1(M);
    SpectralField up(M);
    if (!f_.is_zero()) {
        g0 = apply_nonlinearity(u, SpectralField(M), f_, plan_);
        // predictor for the trapezoidal endpoint
        for (int k = 0; k < M; ++k) {
            const Vec2 x = kern_[k].E * Vec2{u.a[k], v.a[k]} +
                           (w_old_[k] + w_new_[k]) * g0.a[k];
            up.a[k] = x.x;
        }
        g1 = apply_nonlinearity(up, SpectralField(M), f_, plan_);
    }
    for (int k = 0; k < M; ++k) {
        const auto xi = noise.xi(k + 1, n);
        const Vec2 x = kern_[k].E * Vec2{u.a[k], v.a[k]} + w_old_[k] * g0.a[k] +
                       w_new_[k] * g1.a[k] + kern_[k].noise(xi) * sigma_;
        u.a[k] = x.x;
        v.a[k] = x.y;
    }
    guard(u, "WaveIntegrator");
    guard(v, "WaveIntegrator");
}

CoupledResult run_coupled(const SpectralField& u0, const SpectralField& u1, double nu,
                          const QSpectrum& Q, const Nonlinearity& f, const GridConfig& grid,
                          const NoisePath& noise, double T, bool store_fields) {
    if (static_cast<int>(u0.modes()) != grid.M || static_cast<int>(u1.modes()) != grid.M)
        throw ConfigError("run_coupled: initial data truncation mismatch");
    const auto steps = static_cast<std::int64_t>(std::llround(T / grid.dt));
    HeatIntegrator heat(Q, f, grid);
    WaveIntegrator wave(Q, f, nu, grid);

    CoupledResult out;
    auto init_rec = [&](TrajectoryRecord& r, double rec_nu) {
        r.seed = noise.seed();
        r.nu = rec_nu;
        r.sigma = Q.sigma;
        r.dt = grid.dt;
        r.M = grid.M;
    };
    init_rec(out.wave, nu);
    init_rec(out.heat, 0.0);

    SpectralField uh = u0, uw = u0, vw = u1;
    auto record = [&](double t) {
        out.heat.times.push_back(t);
        out.heat.u_norm.push_back(uh.norm_l2());
        out.wave.times.push_back(t);
        out.wave.u_norm.push_back(uw.norm_l2());
        out.wave.v_norm.push_back(vw.norm_l2());
        if (store_fields) {
            out.heat.u_fields.push_back(uh);
            out.wave.u_fields.push_back(uw);
            out.wave.v_fields.push_back(vw);
        }
        out.sup_diff = std::max(out.sup_diff, (uw - uh).norm_l2());
    };
    record(0.0);
    for (std::int64_t n = 0; n < steps; ++n) {
        heat.step(uh, noise, n);
        wave.step(uw, vw, noise, n);
        record(static_cast<double>(n + 1) * grid.dt);
    }
    return out;
}

} // namespace swm
