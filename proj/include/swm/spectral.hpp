#pragma once

// Sine-pseudospectral layer: type-I discrete sine transform between spectral
// coefficients and physical samples on the interior grid x_j = j*pi/(M_phys+1),
// the per-mode noise spectrum, pointwise nonlinearities, and mode projections.
//
// The quadrature a_k = sqrt(2*pi)/(M_phys+1) * sum_j s_j sin(k x_j) is exact for
// inputs band-limited to M_phys sine modes, so backward/forward round-trips are
// exact to rounding for M <= M_phys.

#include <functional>
#include <string>

#include "swm/field.hpp"

namespace swm {

struct GridConfig {
    int M = 16;          // spectral truncation
    int M_phys = 32;     // physical quadrature points, >= 2M
    double dt = 1e-3;    // time step
    double T_back = 0.0; // backward horizon (0 = auto from the gap data)
    double T_fwd = 1.0;  // forward horizon

    void validate() const {
        if (M < 1) throw std::invalid_argument("GridConfig: M must be >= 1");
        if (M_phys < 2 * M) throw std::invalid_argument("GridConfig: M_phys must be >= 2M");
        if (dt <= 0.0) throw std::invalid_argument("GridConfig: dt must be > 0");
        if (T_back < 0.0) throw std::invalid_argument("GridConfig: T_back must be >= 0");
    }
};

// Precomputed sine matrix for one (M, M_phys) pair.
class SineTransform {
  public:
    SineTransform(int M, int M_phys);

    int modes() const { return M_; }
    int points() const { return Mp_; }

    // physical samples (length M_phys) -> coefficients (length M)
    SpectralField forward(const std::vector<double>& samples) const;
    // coefficients (length <= M) -> physical samples (length M_phys)
    std::vector<double> backward(const SpectralField& u) const;

  private:
    int M_, Mp_;
    std::vector<double> sin_; // [k * Mp_ + j] = sin((k+1)(j+1) pi/(Mp_+1))
};

struct QSpectrum {
    std::vector<double> q; // per-mode variance rates q_k, k = 1..M
    double sigma = 1.0;    // noise intensity of the full SPDEs

    std::size_t modes() const { return q.size(); }
    double trace() const {
        double s = 0.0;
        for (double v : q) s += v;
        return s;
    }
    void validate() const {
        for (double v : q)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("QSpectrum: q_k must be finite and >= 0");
    }

    static QSpectrum zero(int M) {
        QSpectrum Q;
        Q.q.assign(M, 0.0);
        return Q;
    }
    // q_k = scale * k^(-p); summable closed form for p > 1.
    static QSpectrum power_law(int M, double p, double scale = 1.0, double sigma = 1.0) {
        QSpectrum Q;
        Q.sigma = sigma;
        Q.q.resize(M);
        for (int k = 1; k <= M; ++k) Q.q[k - 1] = scale * std::pow(double(k), -p);
        return Q;
    }
};

struct Nonlinearity {
    enum class Kind { zero, scaled_sine, linear, custom };

    Kind kind = Kind::zero;
    double a = 0.0;        // amplitude (scaled_sine) or slope (linear)
    double lipschitz = 0.0;
    std::function<double(double)> fn; // custom pointwise map, f(0) = 0

    double operator()(double x) const {
        switch (kind) {
            case Kind::zero: return 0.0;
            case Kind::scaled_sine: return a * std::sin(x);
            case Kind::linear: return a * x;
            case Kind::custom: return fn(x);
        }
        return 0.0;
    }
    bool is_zero() const { return kind == Kind::zero; }

    // sup_w ||f(w)||_{L^2(0,pi)} when f is bounded pointwise; 0 means unbounded.
    double bound_l2() const;

    static Nonlinearity zero() { return {}; }
    static Nonlinearity scaled_sine(double a);
    static Nonlinearity linear(double slope);
    static Nonlinearity custom(std::function<double(double)> f, double L);
};

// Nemytskii map f(u + z), evaluated pseudo-spectrally through `plan`.
SpectralField apply_nonlinearity(const SpectralField& u, const SpectralField& z,
                                 const Nonlinearity& f, const SineTransform& plan);

// Orthogonal projections onto modes 1..N and N+1..M.
SpectralField project_low(const SpectralField& u, int N);
SpectralField project_high(const SpectralField& u, int N);

} // namespace swm
