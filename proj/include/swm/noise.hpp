#pragma once

// Two-sided mode-wise Brownian increments on a uniform grid. Step n covers
// [n*dt, (n+1)*dt); negative indices reach into negative time, so the same
// seeded stream serves backward Lyapunov-Perron solves and forward SDE runs.
//
// Each (mode, step) owns three iid standard normals (xi1, xi2, xi3):
//   - dbeta = sqrt(dt) * xi1 is the plain Brownian increment;
//   - the exact heat and wave stochastic-convolution increments are linear
//     maps of the same triple (see ou.hpp), which keeps the heat and wave
//     systems coupled through the identical realization of W.

#include <cstdint>
#include <stdexcept>

#include "swm/rng.hpp"

namespace swm {

class NoisePath {
  public:
    NoisePath(std::uint64_t seed, int modes, double dt, std::int64_t n_first, std::int64_t n_last)
        : seed_(seed), modes_(modes), dt_(dt), n_first_(n_first), n_last_(n_last) {
        if (modes < 1) throw std::invalid_argument("NoisePath: modes must be >= 1");
        if (dt <= 0.0) throw std::invalid_argument("NoisePath: dt must be > 0");
        if (n_last < n_first) throw std::invalid_argument("NoisePath: empty step window");
    }

    // window covering [t0, t1] (grid-aligned, t0 <= 0 <= t1 allowed anywhere)
    static NoisePath covering(std::uint64_t seed, int modes, double dt, double t0, double t1) {
        auto lo = static_cast<std::int64_t>(std::floor(t0 / dt + 0.5)) - 1;
        auto hi = static_cast<std::int64_t>(std::floor(t1 / dt + 0.5));
        return NoisePath(seed, modes, dt, lo, hi);
    }

    std::uint64_t seed() const { return seed_; }
    int modes() const { return modes_; }
    double dt() const { return dt_; }
    std::int64_t first_step() const { return n_first_; }
    std::int64_t last_step() const { return n_last_; }

    std::array<double, 3> xi(int k, std::int64_t n) const {
        check(k, n);
        auto g = gauss4(seed_, NoiseStream::step, static_cast<std::uint64_t>(k), n);
        return {g[0], g[1], g[2]};
    }

    // Brownian increment of mode k over step n, ~ N(0, dt).
    double dbeta(int k, std::int64_t n) const { return std::sqrt(dt_) * xi(k, n)[0]; }

    // Stationary-law draws (independent of the step stream).
    std::array<double, 2> init_draw(NoiseStream which, int k) const {
        auto g = gauss4(seed_, which, static_cast<std::uint64_t>(k), 0);
        return {g[0], g[1]};
    }

  private:
    void check(int k, std::int64_t n) const {
        if (k < 1 || k > modes_) throw std::out_of_range("NoisePath: mode out of range");
        if (n < n_first_ || n > n_last_) throw std::out_of_range("NoisePath: step outside window");
    }

    std::uint64_t seed_;
    int modes_;
    double dt_;
    std::int64_t n_first_, n_last_;
};

} // namespace swm
