#pragma once

// Counter-based Gaussian streams. Every draw is a pure function of
// (seed, stream tag, mode, step index), so two-sided paths can be regenerated,
// restricted or extended bit-exactly and sampled in any order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace swm {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// signed step index -> zig-zag encoded unsigned
inline std::uint64_t zigzag(std::int64_t n) {
    return (static_cast<std::uint64_t>(n) << 1) ^ static_cast<std::uint64_t>(n >> 63);
}

inline double to_unit(std::uint64_t r) {
    // (0, 1]; never 0 so log() below is safe
    return (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
}

} // namespace detail

enum class NoiseStream : std::uint64_t {
    step = 0,      // per-step driving triple
    heat_init = 1, // stationary draw, heat mode
    wave_init = 2, // stationary draw, wave mode (position, velocity)
    aux = 3,       // scratch draws for experiments
};

// Four iid standard normals for the given counter.
inline std::array<double, 4> gauss4(std::uint64_t seed, NoiseStream stream, std::uint64_t mode,
                                    std::int64_t index) {
    std::uint64_t s = seed;
    s ^= detail::splitmix64(s) + static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL;
    s ^= detail::splitmix64(s) + mode * 0xc2b2ae3d27d4eb4fULL;
    s ^= detail::splitmix64(s) + detail::zigzag(index) * 0x165667b19e3779f9ULL;
    const double u1 = detail::to_unit(detail::splitmix64(s));
    const double u2 = detail::to_unit(detail::splitmix64(s));
    const double u3 = detail::to_unit(detail::splitmix64(s));
    const double u4 = detail::to_unit(detail::splitmix64(s));
    const double r1 = std::sqrt(-2.0 * std::log(u1));
    const double r2 = std::sqrt(-2.0 * std::log(u3));
    const double twopi = 2.0 * std::numbers::pi;
    return {r1 * std::cos(twopi * u2), r1 * std::sin(twopi * u2),
            r2 * std::cos(twopi * u4), r2 * std::sin(twopi * u4)};
}

} // namespace swm
