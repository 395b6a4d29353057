#pragma once

// Stationary linear solutions on a two-sided grid: the heat process z* solving
// z' = Dz z + dW and the wave pair (z*nu, dz*nu) solving nu z'' + z' = Dz z + dW,
// both simulated mode-wise with exact Gaussian transitions built from the same
// NoisePath triples (identical Brownian increments couple the two systems).
//
// Stationary laws (per mode k): position ~ N(0, q_k/(2k^2)) for both systems,
// wave velocity ~ N(0, q_k/(2 nu)), position/velocity independent.
//
// Paths are deterministic functions of (seed, grid) and immutable after
// construction; sharing one OUPath read-only across threads is safe.

#include <cstdint>
#include <optional>
#include <ostream>

#include "swm/field.hpp"
#include "swm/kernels.hpp"
#include "swm/noise.hpp"
#include "swm/spectral.hpp"

namespace swm {

SpectralField sample_stationary_heat(const QSpectrum& Q, std::uint64_t seed);
std::pair<SpectralField, SpectralField> sample_stationary_wave(const QSpectrum& Q, double nu,
                                                               std::uint64_t seed);

struct OUInit {
    // Empty optionals mean: draw from the exact stationary law.
    std::optional<SpectralField> heat;
    std::optional<SpectralField> wave_pos;
    std::optional<SpectralField> wave_vel;
};

class OUPath {
  public:
    // Realize both processes over the node range [n_first, n_last] of `noise`.
    // nu <= 0 builds the heat process only.
    OUPath(const NoisePath& noise, const QSpectrum& Q, double nu, const OUInit& init = {});

    double dt() const { return dt_; }
    double nu() const { return nu_; }
    int modes() const { return M_; }
    double t_first() const { return static_cast<double>(n_first_) * dt_; }
    double t_last() const { return static_cast<double>(n_first_ + size() - 1) * dt_; }
    std::int64_t size() const { return static_cast<std::int64_t>(z_heat_.size()); }
    bool has_wave() const { return nu_ > 0.0; }

    // Node index of grid time t (t must sit on the grid).
    std::int64_t node(double t) const;

    const SpectralField& heat_at(double t) const { return z_heat_[idx(node(t))]; }
    const SpectralField& wave_at(double t) const { return z_wave_[idx(node(t))]; }
    const SpectralField& wave_vel_at(double t) const { return zdot_wave_[idx(node(t))]; }

    // Wiener shift theta_s: shifted.at(t) == original.at(t + s); s must be a
    // grid multiple, |s| bounded by the grid span. Pure relabeling, so
    // shift(s) then shift(-s) restores the original path bit-exactly.
    OUPath shift(double s) const;

    // columns: t, mode, z_heat, z_wave, zdot_wave
    void dump_csv(std::ostream& os) const;

  private:
    OUPath() = default;
    std::size_t idx(std::int64_t n) const {
        if (n < n_first_ || n >= n_first_ + size())
            throw std::out_of_range("OUPath: time outside realized window");
        return static_cast<std::size_t>(n - n_first_);
    }

    double dt_ = 0.0, nu_ = 0.0;
    int M_ = 0;
    std::int64_t n_first_ = 0;
    std::vector<SpectralField> z_heat_, z_wave_, zdot_wave_;
};

} // namespace swm
