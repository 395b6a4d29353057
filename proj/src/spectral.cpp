#include "swm/spectral.hpp"

#include <numbers>

namespace swm {

SineTransform::SineTransform(int M, int M_phys) : M_(M), Mp_(M_phys) {
    if (M < 1 || M_phys < M)
        throw std::invalid_argument("SineTransform: need M_phys >= M >= 1");
    sin_.resize(static_cast<std::size_t>(M) * Mp_);
    const double w = std::numbers::pi / (Mp_ + 1);
    for (int k = 0; k < M; ++k)
        for (int j = 0; j < Mp_; ++j)
            sin_[static_cast<std::size_t>(k) * Mp_ + j] = std::sin((k + 1) * (j + 1) * w);
}

SpectralField SineTransform::forward(const std::vector<double>& samples) const {
    if (static_cast<int>(samples.size()) != Mp_)
        throw std::invalid_argument("SineTransform::forward: sample count mismatch");
    for (double s : samples)
        if (!std::isfinite(s)) throw std::invalid_argument("SineTransform::forward: non-finite sample");
    SpectralField u(M_);
    const double scale = std::sqrt(2.0 * std::numbers::pi) / (Mp_ + 1);
    for (int k = 0; k < M_; ++k) {
        const double* row = &sin_[static_cast<std::size_t>(k) * Mp_];
        double s = 0.0;
        for (int j = 0; j < Mp_; ++j) s += row[j] * samples[j];
        u.a[k] = scale * s;
    }
    return u;
}

std::vector<double> SineTransform::backward(const SpectralField& u) const {
    if (static_cast<int>(u.modes()) > M_)
        throw std::invalid_argument("SineTransform::backward: too many modes");
    std::vector<double> s(Mp_, 0.0);
    const double scale = std::sqrt(2.0 / std::numbers::pi);
    for (std::size_t k = 0; k < u.modes(); ++k) {
        const double c = scale * u.a[k];
        if (c == 0.0) continue;
        const double* row = &sin_[k * Mp_];
        for (int j = 0; j < Mp_; ++j) s[j] += c * row[j];
    }
    return s;
}

double Nonlinearity::bound_l2() const {
    // ||f(w)||_{L^2} <= sup|f| * sqrt(pi)
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::scaled_sine: return std::abs(a) * std::sqrt(std::numbers::pi);
        case Kind::linear: return 0.0;
        case Kind::custom: return 0.0;
    }
    return 0.0;
}

Nonlinearity Nonlinearity::scaled_sine(double a) {
    Nonlinearity f;
    f.kind = Kind::scaled_sine;
    f.a = a;
    f.lipschitz = std::abs(a);
    return f;
}

Nonlinearity Nonlinearity::linear(double slope) {
    Nonlinearity f;
    f.kind = Kind::linear;
    f.a = slope;
    f.lipschitz = std::abs(slope);
    return f;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> fn, double L) {
    Nonlinearity f;
    f.kind = Kind::custom;
    f.fn = std::move(fn);
    f.lipschitz = L;
    if (std::abs(f.fn(0.0)) > 1e-14)
        throw std::invalid_argument("Nonlinearity::custom: f(0) must vanish");
    return f;
}

SpectralField apply_nonlinearity(const SpectralField& u, const SpectralField& z,
                                 const Nonlinearity& f, const SineTransform& plan) {
    if (u.modes() != z.modes())
        throw std::invalid_argument("apply_nonlinearity: truncation mismatch");
    if (f.is_zero()) return SpectralField(u.modes());
    std::vector<double> w = plan.backward(u + z);
    for (double& x : w) x = f(x);
    SpectralField out = plan.forward(w);
    out.a.resize(u.modes());
    return out;
}

SpectralField project_low(const SpectralField& u, int N) {
    if (N < 1 || N > static_cast<int>(u.modes()))
        throw std::invalid_argument("project_low: N out of range");
    SpectralField out(u.modes());
    for (int i = 0; i < N; ++i) out.a[i] = u.a[i];
    return out;
}

SpectralField project_high(const SpectralField& u, int N) {
    if (N < 1 || N > static_cast<int>(u.modes()))
        throw std::invalid_argument("project_high: N out of range");
    SpectralField out(u.modes());
    for (std::size_t i = N; i < u.modes(); ++i) out.a[i] = u.a[i];
    return out;
}

} // namespace swm
