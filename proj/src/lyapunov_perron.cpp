#include "swm/lyapunov_perron.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace swm {

namespace {

std::int64_t floordiv(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

double forcing_bound_estimate(const Nonlinearity& f, const LPConfig& cfg) {
    if (cfg.forcing_bound > 0.0) return cfg.forcing_bound;
    if (f.is_zero()) return 0.0;
    const double b = f.bound_l2();
    return b > 0.0 ? b : 5.0 * f.lipschitz;
}

LPSetup make_setup(double alpha, double beta, double L_F, const Nonlinearity& f,
                   const LPConfig& cfg, double noise_dt) {
    LPSetup s{};
    s.alpha = alpha;
    s.beta = beta;
    s.L_F = L_F;
    s.eta = (cfg.eta != 0.0) ? cfg.eta : 0.5 * (alpha + beta);
    if (!(beta < s.eta && s.eta < alpha))
        throw ConfigError("lp_setup: eta must lie strictly between beta and alpha");
    s.gap_value = cfg.K * L_F * (1.0 / (alpha - s.eta) + 1.0 / (s.eta - beta));
    if (s.gap_value >= 1.0)
        throw ConfigError("lp_setup: spectral gap condition fails (gap >= 1)");
    s.h = noise_dt / cfg.refine;
    double Tb = cfg.T_back;
    if (Tb <= 0.0) {
        const double B = forcing_bound_estimate(f, cfg);
        Tb = (B > 0.0) ? std::log(10.0 * B / cfg.tol) / (s.eta - beta) : 1.0;
        Tb = std::clamp(Tb, 1.0, 60.0);
    }
    s.n_steps = static_cast<std::int64_t>(std::ceil(Tb / s.h - 1e-9));
    s.T_back = static_cast<double>(s.n_steps) * s.h;
    return s;
}

// Nemytskii evaluator with per-node cache of the physical forcing samples.
class NemytskiiEval {
  public:
    NemytskiiEval(const HeatForcing& forcing, const Nonlinearity& f, const SineTransform& plan)
        : forcing_(forcing), f_(f), plan_(plan) {}

    // out = coefficients of f(state + z(node))  [minus f(z(node)) if centered]
    void eval(const SpectralField& state, std::int64_t node, SpectralField& out) {
        const auto& zc = cache(node);
        std::vector<double> w = plan_.backward(state);
        if (forcing_.centered) {
            for (std::size_t j = 0; j < w.size(); ++j)
                w[j] = f_(w[j] + zc.phys[j]) - zc.fphys[j];
        } else {
            for (std::size_t j = 0; j < w.size(); ++j) w[j] = f_(w[j] + zc.phys[j]);
        }
        SpectralField g = plan_.forward(w);
        g.a.resize(state.modes());
        out = std::move(g);
    }

  private:
    struct Cached {
        std::vector<double> phys;
        std::vector<double> fphys; // f(z), centered mode only
    };
    const Cached& cache(std::int64_t node) {
        auto it = cache_.find(node);
        if (it != cache_.end()) return it->second;
        Cached c;
        c.phys = plan_.backward(forcing_.at_node(node));
        if (forcing_.centered) {
            c.fphys.resize(c.phys.size());
            for (std::size_t j = 0; j < c.phys.size(); ++j) c.fphys[j] = f_(c.phys[j]);
        }
        return cache_.emplace(node, std::move(c)).first->second;
    }

    const HeatForcing& forcing_;
    const Nonlinearity& f_;
    const SineTransform& plan_;
    std::unordered_map<std::int64_t, Cached> cache_;
};

struct ResidualTracker {
    std::vector<double> residuals;
    double divergence_scale = 0.0;
    int grew = 0;

    // returns true when converged
    bool push(double r, double tol, int max_iters) {
        residuals.push_back(r);
        divergence_scale = std::max(divergence_scale, residuals.front());
        if (r > 10.0 * std::max(divergence_scale, 1.0)) {
            if (++grew >= 3)
                throw NumericalError("lp_solve: residuals diverge (gap violated or grid too coarse?)");
        } else {
            grew = 0;
        }
        if (r <= tol) return true;
        if (static_cast<int>(residuals.size()) >= max_iters)
            throw NumericalError("lp_solve: no convergence within max_iters");
        return false;
    }

    void fill(LPDiagnostics& d) const {
        d.iterations = static_cast<int>(residuals.size());
        d.final_residual = residuals.empty() ? 0.0 : residuals.back();
        d.residuals = residuals;
        d.contraction_estimate = 0.0;
        for (std::size_t j = 2; j < residuals.size(); ++j) {
            if (residuals[j - 1] > 0.0)
                d.contraction_estimate =
                    std::max(d.contraction_estimate, residuals[j] / residuals[j - 1]);
        }
    }
};

} // namespace

HeatForcing HeatForcing::from_ou(const OUPath& ou, OUForcing kind) {
    HeatForcing f;
    f.dt = ou.dt();
    f.centered = false;
    const double dt = ou.dt();
    if (kind == OUForcing::heat_z) {
        f.at_node = [&ou, dt](std::int64_t n) -> const SpectralField& {
            return ou.heat_at(static_cast<double>(n) * dt);
        };
    } else {
        if (!ou.has_wave()) throw ConfigError("HeatForcing: OU path has no wave component");
        f.at_node = [&ou, dt](std::int64_t n) -> const SpectralField& {
            return ou.wave_at(static_cast<double>(n) * dt);
        };
    }
    return f;
}

HeatForcing HeatForcing::from_trajectory(const std::vector<SpectralField>& traj,
                                         std::int64_t first_node, double dt, bool centered) {
    HeatForcing f;
    f.dt = dt;
    f.centered = centered;
    f.at_node = [&traj, first_node](std::int64_t n) -> const SpectralField& {
        const std::int64_t i = n - first_node;
        if (i < 0 || i >= static_cast<std::int64_t>(traj.size()))
            throw std::out_of_range("HeatForcing: node outside recorded trajectory");
        return traj[static_cast<std::size_t>(i)];
    };
    return f;
}

ManifoldSample ManifoldSample::tensor(int M, int N, double R, int per_axis, std::uint64_t seed) {
    if (R <= 0.0) throw ConfigError("ManifoldSample: R must be > 0");
    if (per_axis < 1) throw ConfigError("ManifoldSample: per_axis must be >= 1");
    ManifoldSample s;
    s.R = R;
    s.seed = seed;
    const int axes = std::min(N, 2);
    if (M < axes) throw ConfigError("ManifoldSample: truncation smaller than the grid axes");
    std::vector<double> ticks(per_axis);
    for (int i = 0; i < per_axis; ++i)
        ticks[i] = (per_axis == 1) ? 0.0 : -R + 2.0 * R * i / (per_axis - 1);
    if (axes == 1) {
        for (double x : ticks) {
            SpectralField z(M);
            z.a[0] = x;
            s.bases.push_back(std::move(z));
        }
        return s;
    }
    for (double x : ticks)
        for (double y : ticks) {
            if (x * x + y * y > R * R + 1e-12) continue; // keep |zeta| <= R
            SpectralField z(M);
            z.a[0] = x;
            z.a[1] = y;
            s.bases.push_back(std::move(z));
        }
    if (s.bases.empty())
        throw ConfigError("ManifoldSample: no tensor points inside the radius-R ball; "
                          "increase grid_per_axis");
    return s;
}

LPSetup lp_setup_heat(int N, const Nonlinearity& f, const LPConfig& cfg, double noise_dt) {
    if (N < 1) throw ConfigError("lp_setup_heat: N must be >= 1");
    const double alpha = -static_cast<double>(N) * N;
    const double beta = -static_cast<double>(N + 1) * (N + 1);
    return make_setup(alpha, beta, f.lipschitz, f, cfg, noise_dt);
}

LPSetup lp_setup_wave(double nu, int N, const Nonlinearity& f, const LPConfig& cfg,
                      double noise_dt) {
    if (N < 1) throw ConfigError("lp_setup_wave: N must be >= 1");
    if (!(nu > 0.0) || 4.0 * nu * (N + 1.0) * (N + 1.0) >= 1.0)
        throw ConfigError("lp_setup_wave: requires 0 < nu < 1/(4 (N+1)^2)");
    const double alpha = eigen(N, nu).lambda_plus;
    const double beta = eigen(N + 1, nu).lambda_plus;
    return make_setup(alpha, beta, wave_lipschitz(f.lipschitz, nu, N), f, cfg, noise_dt);
}

LPSolutionHeat lp_solve_heat(const SpectralField& zeta, const HeatForcing& forcing,
                             const Nonlinearity& f, int N, const LPConfig& cfg,
                             const SineTransform& plan) {
    const int M = static_cast<int>(zeta.modes());
    if (N < 1 || N > M) throw ConfigError("lp_solve_heat: need 1 <= N <= M");
    if (plan.modes() != M) throw ConfigError("lp_solve_heat: plan/field mismatch");
    if (project_high(zeta, N).norm_l2() > 1e-12 * std::max(1.0, zeta.norm_l2()))
        throw ConfigError("lp_solve_heat: zeta must lie in the low-mode subspace");

    const LPSetup su = lp_setup_heat(N, f, cfg, forcing.dt);
    const double h = su.h;
    const auto n = su.n_steps;

    std::vector<double> times(n + 1);
    std::vector<double> wgt(n + 1); // e^{-eta t_j} <= 1
    for (std::int64_t j = 0; j <= n; ++j) {
        times[j] = static_cast<double>(j - n) * h;
        wgt[j] = std::exp(-su.eta * times[j]);
    }

    // per-mode step factors and quadrature weights
    std::vector<double> fwd(M), bwd(M), w_old(M), w_new(M);
    for (int k = 1; k <= M; ++k) {
        const double a = -static_cast<double>(k) * k;
        fwd[k - 1] = std::exp(a * h);
        bwd[k - 1] = std::exp(-a * h);
        const auto w = scalar_weights(a, h);
        w_old[k - 1] = w.w_old;
        w_new[k - 1] = w.w_new;
    }

    // e^{Dz t_j} zeta on the low modes
    std::vector<SpectralField> lin(n + 1, SpectralField(M));
    for (std::int64_t j = 0; j <= n; ++j)
        for (int k = 1; k <= N; ++k)
            lin[j].a[k - 1] = zeta.a[k - 1] * std::exp(-double(k) * k * times[j]);

    std::vector<SpectralField> state(lin);
    std::vector<SpectralField> next(n + 1, SpectralField(M));
    std::vector<SpectralField> g_old(n, SpectralField(M)), g_new(n, SpectralField(M));
    std::vector<std::int64_t> node(n);
    for (std::int64_t i = 0; i < n; ++i) node[i] = floordiv((i - n) * 1, cfg.refine);

    NemytskiiEval nem(forcing, f, plan);
    ResidualTracker tracker;
    LPSolutionHeat sol;

    SpectralField J(M), H(M);
    while (true) {
        if (!f.is_zero()) {
            for (std::int64_t i = 0; i < n; ++i) {
                nem.eval(state[i], node[i], g_old[i]);
                nem.eval(state[i + 1], node[i], g_new[i]);
            }
        }
        // slow branch: J(t_j) = e^{-Dz h} [ J(t_{j+1}) - (W_old g(t_j) + W_new g(t_{j+1})) ]
        std::fill(J.a.begin(), J.a.end(), 0.0);
        for (std::int64_t j = 0; j <= n; ++j)
            for (int k = 0; k < N; ++k) next[j].a[k] = 0.0;
        for (std::int64_t j = n - 1; j >= 0; --j) {
            for (int k = 0; k < N; ++k) {
                const double inner = w_old[k] * g_old[j].a[k] + w_new[k] * g_new[j].a[k];
                J.a[k] = bwd[k] * (J.a[k] - inner);
                next[j].a[k] = lin[j].a[k] + J.a[k];
            }
            // next[n] low part filled below (J(0) = 0)
        }
        for (int k = 0; k < N; ++k) next[n].a[k] = lin[n].a[k];

        // fast branch: H(t_{j+1}) = e^{Dz h} H(t_j) + W_old g(t_j) + W_new g(t_{j+1})
        std::fill(H.a.begin(), H.a.end(), 0.0);
        for (int k = N; k < M; ++k) next[0].a[k] = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
            for (int k = N; k < M; ++k) {
                H.a[k] = fwd[k] * H.a[k] + w_old[k] * g_old[j].a[k] + w_new[k] * g_new[j].a[k];
                next[j + 1].a[k] = H.a[k];
            }
        }

        double res = 0.0, wnorm = 0.0;
        for (std::int64_t j = 0; j <= n; ++j) {
            res = std::max(res, wgt[j] * (next[j] - state[j]).norm_l2());
            wnorm = std::max(wnorm, wgt[j] * next[j].norm_l2());
        }
        state.swap(next);
        if (wnorm > cfg.tempered_bound)
            throw NumericalError("lp_solve_heat: weighted norm overflow (eta misordered?)");
        sol.diag.weighted_norm = wnorm;
        if (tracker.push(res, cfg.tol, cfg.max_iters)) break;
    }

    tracker.fill(sol.diag);
    sol.diag.eta = su.eta;
    sol.diag.T_back = su.T_back;
    sol.diag.gap_value = su.gap_value;
    sol.diag.L_F = su.L_F;
    sol.trajectory.times = std::move(times);
    sol.trajectory.eta = su.eta;
    sol.base = project_low(zeta, N);
    sol.graph_value = project_high(state[n], N);
    sol.trajectory.states = std::move(state);
    return sol;
}

LPSolutionWave lp_solve_wave(const PhasePoint& xi, const OUPath& ou, const Nonlinearity& f, int N,
                             const LPConfig& cfg, const SineTransform& plan) {
    const int M = static_cast<int>(xi.modes());
    const double nu = xi.nu;
    if (xi.N != N) throw ConfigError("lp_solve_wave: xi.N mismatch");
    if (!ou.has_wave()) throw ConfigError("lp_solve_wave: OU path has no wave component");
    if (ou.nu() != nu) throw ConfigError("lp_solve_wave: xi.nu differs from the OU path nu");
    if (plan.modes() != M) throw ConfigError("lp_solve_wave: plan/field mismatch");

    const EMetric metric(nu, N);
    {
        const PhasePoint q = xi - project(xi, Projection::P1);
        if (metric.norm(q) > 1e-10 * std::max(1.0, metric.norm(xi)))
            throw ConfigError("lp_solve_wave: xi must lie in E_1");
    }

    const LPSetup su = lp_setup_wave(nu, N, f, cfg, ou.dt());
    const double h = su.h;
    const auto n = su.n_steps;

    std::vector<double> times(n + 1), wgt(n + 1);
    for (std::int64_t j = 0; j <= n; ++j) {
        times[j] = static_cast<double>(j - n) * h;
        wgt[j] = std::exp(-su.eta * times[j]);
    }

    // slow-mode data (k <= N) and fast-mode data (k > N)
    std::vector<EigenPair> ep(N);
    std::vector<double> bwdP(N), wPo(N), wPn(N), fwdM(N), wMo(N), wMn(N);
    for (int k = 1; k <= N; ++k) {
        ep[k - 1] = eigen(k, nu);
        bwdP[k - 1] = std::exp(-ep[k - 1].lambda_plus * h);
        const auto wp = scalar_weights(ep[k - 1].lambda_plus, h);
        wPo[k - 1] = wp.w_old;
        wPn[k - 1] = wp.w_new;
        fwdM[k - 1] = std::exp(ep[k - 1].lambda_minus * h);
        const auto wm = scalar_weights(ep[k - 1].lambda_minus, h);
        wMo[k - 1] = wm.w_old;
        wMn[k - 1] = wm.w_new;
    }
    std::vector<Mat2> E22(M - N);
    std::vector<Vec2> v22o(M - N), v22n(M - N); // weights applied to (0, g)
    for (int k = N + 1; k <= M; ++k) {
        const Mat2 C = phase_matrix(nu, k);
        const Mat2 E = phase_matrix_exp(nu, k, h);
        const auto w = mat2_weights(C, E, h);
        E22[k - N - 1] = E;
        v22o[k - N - 1] = {w.w_old.a12, w.w_old.a22};
        v22n[k - N - 1] = {w.w_new.a12, w.w_new.a22};
    }

    // slow coordinates of xi along e_k^+
    std::vector<double> xi_plus(N);
    for (int k = 1; k <= N; ++k)
        xi_plus[k - 1] = 0.5 * (xi.u.a[k - 1] + xi.v.a[k - 1] / ep[k - 1].c_k);

    auto make_state = [&](std::int64_t j, const std::vector<double>& aP,
                          const std::vector<double>& aM, const std::vector<Vec2>& hi,
                          PhasePoint& out) {
        for (int k = 1; k <= N; ++k) {
            const double ap = xi_plus[k - 1] * std::exp(ep[k - 1].lambda_plus * times[j]) + aP[k - 1];
            const double am = aM[k - 1];
            out.u.a[k - 1] = ap + am;
            out.v.a[k - 1] = ep[k - 1].c_k * (ap - am);
        }
        for (int k = N + 1; k <= M; ++k) {
            out.u.a[k - 1] = hi[k - N - 1].x;
            out.v.a[k - 1] = hi[k - N - 1].y;
        }
    };

    std::vector<PhasePoint> state(n + 1, PhasePoint::zero(M, nu, N));
    {
        std::vector<double> z(N, 0.0);
        std::vector<Vec2> zh(M - N);
        for (std::int64_t j = 0; j <= n; ++j) make_state(j, z, z, zh, state[j]);
    }
    std::vector<PhasePoint> next(n + 1, PhasePoint::zero(M, nu, N));
    std::vector<SpectralField> g_old(n, SpectralField(M)), g_new(n, SpectralField(M));
    std::vector<std::int64_t> node(n);
    for (std::int64_t i = 0; i < n; ++i) node[i] = floordiv(i - n, cfg.refine);

    const HeatForcing forcing = HeatForcing::from_ou(ou, OUForcing::wave_z);
    NemytskiiEval nem(forcing, f, plan);
    ResidualTracker tracker;
    LPSolutionWave sol;

    std::vector<double> JP(N), HM(N);
    std::vector<Vec2> H22(M - N);
    std::vector<std::vector<double>> aP(n + 1, std::vector<double>(N)),
        aM(n + 1, std::vector<double>(N));
    std::vector<std::vector<Vec2>> hi(n + 1, std::vector<Vec2>(M - N));

    while (true) {
        if (!f.is_zero()) {
            for (std::int64_t i = 0; i < n; ++i) {
                nem.eval(state[i].u, node[i], g_old[i]);
                nem.eval(state[i + 1].u, node[i], g_new[i]);
            }
        }
        // F = (0, g): slow eigen-coordinates a_F^{+-} = +- g/(2 c_k)
        std::fill(JP.begin(), JP.end(), 0.0);
        for (int k = 0; k < N; ++k) aP[n][k] = 0.0;
        for (std::int64_t j = n - 1; j >= 0; --j) {
            for (int k = 0; k < N; ++k) {
                const double c2 = 2.0 * ep[k].c_k;
                const double go = g_old[j].a[k] / c2, gn = g_new[j].a[k] / c2;
                JP[k] = bwdP[k] * (JP[k] - (wPo[k] * go + wPn[k] * gn));
                aP[j][k] = JP[k];
            }
        }
        std::fill(HM.begin(), HM.end(), 0.0);
        std::fill(H22.begin(), H22.end(), Vec2{});
        for (int k = 0; k < N; ++k) aM[0][k] = 0.0;
        for (auto& v : hi[0]) v = Vec2{};
        for (std::int64_t j = 0; j < n; ++j) {
            for (int k = 0; k < N; ++k) {
                const double c2 = 2.0 * ep[k].c_k;
                const double go = -g_old[j].a[k] / c2, gn = -g_new[j].a[k] / c2;
                HM[k] = fwdM[k] * HM[k] + wMo[k] * go + wMn[k] * gn;
                aM[j + 1][k] = HM[k];
            }
            for (int k = 0; k < M - N; ++k) {
                H22[k] = E22[k] * H22[k] + v22o[k] * g_old[j].a[N + k] + v22n[k] * g_new[j].a[N + k];
                hi[j + 1][k] = H22[k];
            }
        }
        for (std::int64_t j = 0; j <= n; ++j) make_state(j, aP[j], aM[j], hi[j], next[j]);

        double res = 0.0, wnorm = 0.0;
        for (std::int64_t j = 0; j <= n; ++j) {
            res = std::max(res, wgt[j] * metric.norm(next[j] - state[j]));
            wnorm = std::max(wnorm, wgt[j] * metric.norm(next[j]));
        }
        state.swap(next);
        if (wnorm > cfg.tempered_bound)
            throw NumericalError("lp_solve_wave: weighted norm overflow (tempered bound exceeded)");
        sol.diag.weighted_norm = wnorm;
        if (tracker.push(res, cfg.tol, cfg.max_iters)) break;
    }

    tracker.fill(sol.diag);
    sol.diag.eta = su.eta;
    sol.diag.T_back = su.T_back;
    sol.diag.gap_value = su.gap_value;
    sol.diag.L_F = su.L_F;
    sol.trajectory.times = std::move(times);
    sol.trajectory.eta = su.eta;
    sol.base = project(xi, Projection::P1);
    sol.graph_value = state[n] - sol.base;
    sol.trajectory.states = std::move(state);
    return sol;
}

HeatManifoldPoint manifold_point_heat(const LPSolutionHeat& sol, const HeatForcing& forcing,
                                      const Nonlinearity& f, const SineTransform& plan) {
    HeatManifoldPoint p;
    p.u0 = sol.trajectory.at_zero();
    const int M = static_cast<int>(p.u0.modes());
    SpectralField g(M);
    if (!f.is_zero()) {
        NemytskiiEval nem(forcing, f, plan);
        nem.eval(p.u0, 0, g);
    }
    p.u0_t = g;
    for (int k = 1; k <= M; ++k)
        p.u0_t.a[k - 1] -= static_cast<double>(k) * k * p.u0.a[k - 1];
    return p;
}

MatchedDistance matched_wave_distance(const SpectralField& u0, const SpectralField& u0_t,
                                      double nu, const OUPath& ou, const Nonlinearity& f, int N,
                                      const LPConfig& cfg, const SineTransform& plan) {
    const EMetric metric(nu, N);
    MatchedDistance out;
    out.heat_embedded = PhasePoint(u0, 0.5 * u0 + nu * u0_t, nu, N);
    const PhasePoint xi = project(out.heat_embedded, Projection::P1);
    LPSolutionWave ws = lp_solve_wave(xi, ou, f, N, cfg, plan);
    out.wave_point = ws.trajectory.at_zero();
    out.wave_diag = ws.diag;
    const PhasePoint d = out.heat_embedded - out.wave_point;
    out.dist_E = metric.norm(d);
    out.dist_L2 = d.u.norm_l2();
    return out;
}

SpectralField integrate_rds_heat(const SpectralField& u0, const HeatForcing& forcing,
                                 const Nonlinearity& f, const SineTransform& plan, double t0,
                                 double h, std::int64_t n_steps,
                                 std::vector<SpectralField>* trajectory) {
    const int M = static_cast<int>(u0.modes());
    const double ratio = forcing.dt / h;
    const auto refine = static_cast<std::int64_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(refine)) > 1e-9 || refine < 1)
        throw ConfigError("integrate_rds_heat: h must divide the forcing grid step");
    const double a0r = t0 / h;
    const auto a0 = static_cast<std::int64_t>(std::llround(a0r));
    if (std::abs(a0r - static_cast<double>(a0)) > 1e-6)
        throw ConfigError("integrate_rds_heat: t0 must sit on the solver grid");

    std::vector<double> dec(M), w_old(M), w_new(M);
    for (int k = 1; k <= M; ++k) {
        const double a = -static_cast<double>(k) * k;
        dec[k - 1] = std::exp(a * h);
        const auto w = scalar_weights(a, h);
        w_old[k - 1] = w.w_old;
        w_new[k - 1] = w.w_new;
    }

    NemytskiiEval nem(forcing, f, plan);
    SpectralField u = u0, g0(M), g1(M), up(M);
    if (trajectory) {
        trajectory->clear();
        trajectory->push_back(u);
    }
    for (std::int64_t i = 0; i < n_steps; ++i) {
        const std::int64_t nd = floordiv(a0 + i, refine);
        if (!f.is_zero()) {
            nem.eval(u, nd, g0);
            for (int k = 0; k < M; ++k)
                up.a[k] = dec[k] * u.a[k] + (w_old[k] + w_new[k]) * g0.a[k];
            nem.eval(up, nd, g1);
            for (int k = 0; k < M; ++k)
                u.a[k] = dec[k] * u.a[k] + w_old[k] * g0.a[k] + w_new[k] * g1.a[k];
        } else {
            for (int k = 0; k < M; ++k) u.a[k] = dec[k] * u.a[k];
        }
        if (!u.finite()) throw NumericalError("integrate_rds_heat: blow-up");
        if (trajectory) trajectory->push_back(u);
    }
    return u;
}

InvarianceReport invariance_residual(const SpectralField& u_start, const OUPath& ou,
                                     OUForcing forcing, const Nonlinearity& f, int N,
                                     const LPConfig& cfg, const SineTransform& plan, double T_inv,
                                     int samples) {
    if (samples < 1) throw ConfigError("invariance_residual: samples must be >= 1");
    const double dtN = ou.dt();
    const double h = dtN / cfg.refine;
    InvarianceReport rep;
    const HeatForcing base_forcing = HeatForcing::from_ou(ou, forcing);

    SpectralField u = u_start;
    std::int64_t cur = 0; // solver-step index of current time
    for (int s = 0; s <= samples; ++s) {
        const double target = T_inv * static_cast<double>(s) / samples;
        const auto tgt_node = static_cast<std::int64_t>(std::llround(target / dtN));
        const std::int64_t tgt_step = tgt_node * cfg.refine;
        if (tgt_step > cur) {
            u = integrate_rds_heat(u, base_forcing, f, plan, static_cast<double>(cur) * h, h,
                                   tgt_step - cur);
            cur = tgt_step;
        }
        const double t = static_cast<double>(tgt_node) * dtN;
        const OUPath shifted = ou.shift(t);
        const HeatForcing ff = HeatForcing::from_ou(shifted, forcing);
        LPSolutionHeat sol = lp_solve_heat(project_low(u, N), ff, f, N, cfg, plan);
        const double r = (project_high(u, N) - sol.graph_value).norm_l2();
        rep.times.push_back(t);
        rep.residuals.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
    }
    return rep;
}

SpectralField pullback_stationary(const OUPath& ou, OUForcing forcing, const Nonlinearity& f,
                                  const SineTransform& plan, double T_pull, double record_from,
                                  std::vector<SpectralField>* trajectory,
                                  std::int64_t* first_node) {
    const double dtN = ou.dt();
    const auto n_total = static_cast<std::int64_t>(std::llround(T_pull / dtN));
    if (n_total < 1) throw ConfigError("pullback_stationary: T_pull too small");
    const auto rec_node =
        static_cast<std::int64_t>(std::floor(record_from / dtN + 1e-9));
    const HeatForcing ff = HeatForcing::from_ou(ou, forcing);
    const std::int64_t node0 = -n_total;

    if (trajectory) trajectory->clear();
    auto maybe_record = [&](std::int64_t nd, const SpectralField& x) {
        if (!trajectory || nd < rec_node) return;
        if (trajectory->empty() && first_node) *first_node = nd;
        trajectory->push_back(x);
    };

    SpectralField u(static_cast<std::size_t>(plan.modes()));
    maybe_record(node0, u);
    for (std::int64_t i = 0; i < n_total; ++i) {
        u = integrate_rds_heat(u, ff, f, plan, static_cast<double>(node0 + i) * dtN, dtN, 1);
        maybe_record(node0 + i + 1, u);
    }
    return u;
}

} // namespace swm
