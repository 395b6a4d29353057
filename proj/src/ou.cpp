#include "swm/ou.hpp"

namespace swm {

SpectralField sample_stationary_heat(const QSpectrum& Q, std::uint64_t seed) {
    Q.validate();
    const int M = static_cast<int>(Q.modes());
    SpectralField z(M);
    for (int k = 1; k <= M; ++k) {
        auto g = gauss4(seed, NoiseStream::heat_init, static_cast<std::uint64_t>(k), 0);
        z.a[k - 1] = std::sqrt(Q.q[k - 1] / (2.0 * k * k)) * g[0];
    }
    return z;
}

std::pair<SpectralField, SpectralField> sample_stationary_wave(const QSpectrum& Q, double nu,
                                                               std::uint64_t seed) {
    if (nu <= 0.0) throw std::invalid_argument("sample_stationary_wave: nu must be > 0");
    Q.validate();
    const int M = static_cast<int>(Q.modes());
    SpectralField z(M), zdot(M);
    for (int k = 1; k <= M; ++k) {
        auto g = gauss4(seed, NoiseStream::wave_init, static_cast<std::uint64_t>(k), 0);
        z.a[k - 1] = std::sqrt(Q.q[k - 1] / (2.0 * k * k)) * g[0];
        zdot.a[k - 1] = std::sqrt(Q.q[k - 1] / (2.0 * nu)) * g[1];
    }
    return {z, zdot};
}

OUPath::OUPath(const NoisePath& noise, const QSpectrum& Q, double nu, const OUInit& init) {
    Q.validate();
    M_ = noise.modes();
    if (static_cast<int>(Q.modes()) != M_)
        throw std::invalid_argument("OUPath: Q/noise mode count mismatch");
    dt_ = noise.dt();
    nu_ = nu;
    n_first_ = noise.first_step();
    const std::int64_t nodes = noise.last_step() - noise.first_step() + 2;

    SpectralField zh = init.heat ? *init.heat : sample_stationary_heat(Q, noise.seed());
    if (static_cast<int>(zh.modes()) != M_) throw std::invalid_argument("OUPath: bad heat init");

    SpectralField zw(M_), zwv(M_);
    if (has_wave()) {
        if (init.wave_pos || init.wave_vel) {
            zw = init.wave_pos ? *init.wave_pos : SpectralField(M_);
            zwv = init.wave_vel ? *init.wave_vel : SpectralField(M_);
        } else {
            auto s = sample_stationary_wave(Q, nu_, noise.seed());
            zw = s.first;
            zwv = s.second;
        }
    }

    std::vector<HeatModeKernel> hk(M_);
    std::vector<WaveModeKernel> wk(has_wave() ? M_ : 0);
    for (int k = 1; k <= M_; ++k) {
        hk[k - 1] = HeatModeKernel(k, Q.q[k - 1], dt_);
        if (has_wave()) wk[k - 1] = WaveModeKernel(k, Q.q[k - 1], nu_, dt_);
    }

    z_heat_.reserve(nodes);
    z_heat_.push_back(zh);
    if (has_wave()) {
        z_wave_.reserve(nodes);
        zdot_wave_.reserve(nodes);
        z_wave_.push_back(zw);
        zdot_wave_.push_back(zwv);
    }
    for (std::int64_t n = noise.first_step(); n <= noise.last_step(); ++n) {
        for (int k = 1; k <= M_; ++k) {
            const auto xi = noise.xi(k, n);
            zh.a[k - 1] = hk[k - 1].decay * zh.a[k - 1] + hk[k - 1].noise(xi[0], xi[1]);
            if (has_wave()) {
                const Vec2 cur{zw.a[k - 1], zwv.a[k - 1]};
                const Vec2 nxt = wk[k - 1].E * cur + wk[k - 1].noise(xi);
                zw.a[k - 1] = nxt.x;
                zwv.a[k - 1] = nxt.y;
            }
        }
        z_heat_.push_back(zh);
        if (has_wave()) {
            z_wave_.push_back(zw);
            zdot_wave_.push_back(zwv);
        }
    }
}

std::int64_t OUPath::node(double t) const {
    const double raw = t / dt_;
    const auto n = static_cast<std::int64_t>(std::llround(raw));
    if (std::abs(raw - static_cast<double>(n)) > 1e-6)
        throw std::invalid_argument("OUPath: time not on the grid");
    return n;
}

OUPath OUPath::shift(double s) const {
    const double raw = s / dt_;
    const auto m = static_cast<std::int64_t>(std::llround(raw));
    if (std::abs(raw - static_cast<double>(m)) > 1e-6)
        throw std::invalid_argument("OUPath::shift: s must be a grid multiple");
    if (std::llabs(m) > size())
        throw std::out_of_range("OUPath::shift: offset exceeds grid span");
    OUPath out(*this);
    out.n_first_ -= m; // value at new time t is the old value at t + s
    return out;
}

void OUPath::dump_csv(std::ostream& os) const {
    os << "t,mode,z_heat,z_wave,zdot_wave\n";
    for (std::int64_t i = 0; i < size(); ++i) {
        const double t = static_cast<double>(n_first_ + i) * dt_;
        for (int k = 1; k <= M_; ++k) {
            os << t << ',' << k << ',' << z_heat_[i].a[k - 1] << ','
               << (has_wave() ? z_wave_[i].a[k - 1] : 0.0) << ','
               << (has_wave() ? zdot_wave_[i].a[k - 1] : 0.0) << '\n';
        }
    }
}

} // namespace swm
