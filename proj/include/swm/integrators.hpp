#pragma once

// Pathwise forward integration of the full nonlinear systems
//   heat:  u' = Dz u + f(u) + sigma dW
//   wave:  nu u'' + u' = Dz u + f(u) + sigma dW
// under shared noise. The linear part and the stochastic convolution are exact
// per mode (no stiffness constraint in nu); the nonlinearity is explicit:
// frozen over the step for the heat system, trapezoidal predictor-corrector
// for the wave system.

#include <cstdint>
#include <ostream>

#include "swm/errors.hpp"
#include "swm/kernels.hpp"
#include "swm/noise.hpp"
#include "swm/spectral.hpp"

namespace swm {

inline constexpr double kBlowupGuard = 1e8;

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> u_norm;
    std::vector<double> v_norm;          // wave only
    std::vector<SpectralField> u_fields; // filled when store_fields
    std::vector<SpectralField> v_fields; // wave only, when store_fields
    std::uint64_t seed = 0;
    double nu = 0.0, sigma = 0.0, dt = 0.0;
    int M = 0;

    // columns: t, u_norm, v_norm[, u_1..u_M when fields were stored]
    void dump_csv(std::ostream& os) const;
};

class HeatIntegrator {
  public:
    HeatIntegrator(const QSpectrum& Q, const Nonlinearity& f, const GridConfig& grid);

    // one exponential-Euler step consuming the noise triple of step n
    void step(SpectralField& u, const NoisePath& noise, std::int64_t n) const;

  private:
    std::vector<HeatModeKernel> kern_;
    std::vector<double> phi_; // dt * phi1(-k^2 dt)
    Nonlinearity f_;
    SineTransform plan_;
    double sigma_;
};

class WaveIntegrator {
  public:
    WaveIntegrator(const QSpectrum& Q, const Nonlinearity& f, double nu, const GridConfig& grid);

    // exact linear propagator + trapezoidal nonlinear increment + exact noise
    void step(SpectralField& u, SpectralField& v, const NoisePath& noise, std::int64_t n) const;

  private:
    std::vector<WaveModeKernel> kern_;
    std::vector<Vec2> w_old_, w_new_; // quadrature weights applied to (0, f/nu)
    Nonlinearity f_;
    SineTransform plan_;
    double sigma_, nu_;
};

struct CoupledResult {
    TrajectoryRecord wave;
    TrajectoryRecord heat;
    double sup_diff = 0.0; // sup_{0<=t<=T} |u_wave(t) - u_heat(t)|_{L^2}
};

// Run both systems from t=0 over [0, T] with the same noise path; u1 is the
// initial wave velocity. Throws NumericalError on blow-up in either system.
CoupledResult run_coupled(const SpectralField& u0, const SpectralField& u1, double nu,
                          const QSpectrum& Q, const Nonlinearity& f, const GridConfig& grid,
                          const NoisePath& noise, double T, bool store_fields = false);

} // namespace swm
