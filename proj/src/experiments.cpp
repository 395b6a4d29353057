#include "swm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace swm {

json config_echo(const ExperimentConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.resolved()) j[k] = v;
    return j;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mx;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            int i;
            while ((i = next.fetch_add(1)) < n) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::vector<SpectralField> base_grid(int M, int N, double R, int per_axis) {
    return ManifoldSample::tensor(M, N, R, per_axis, 0).bases;
}

// --- gap-check ---------------------------------------------------------------

GapReport run_gap(const ExperimentConfig& cfg, bool heat) {
    cfg.validate();
    const GapParams p{cfg.K, cfg.L_F, cfg.L_h};
    return heat ? gap_check_heat(cfg.N, p) : gap_check_wave(cfg.nu, cfg.N, p);
}

json gap_to_json(const GapReport& r, const ExperimentConfig& cfg) {
    json j;
    j["side"] = r.heat ? "heat" : "wave";
    j["nu"] = r.nu;
    j["N"] = r.N;
    j["K"] = r.K;
    j["L_F"] = r.L_F;
    j["L_h"] = r.L_h;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["eta"] = r.eta;
    j["gap_value"] = r.gap_value;
    j["strong_gap_value"] = r.strong_gap_value;
    j["pass"] = r.pass;
    j["strong_pass"] = r.strong_pass;
    j["real_regime_ok"] = r.real_regime_ok;
    j["config"] = config_echo(cfg);
    return j;
}

// --- stationary --------------------------------------------------------------

StationaryResult run_stationary(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.replicas < 1000) throw ConfigError("stationary: replicas must be >= 1000");
    const int M = cfg.M;
    const int n = cfg.replicas;
    const QSpectrum Q = cfg.make_q();
    StationaryResult res;
    res.j["config"] = config_echo(cfg);

    // z* (heat) law: per-mode variance q_k/(2k^2)
    std::vector<double> var_h(M, 0.0);
    for (int r = 0; r < n; ++r) {
        SpectralField z = sample_stationary_heat(Q, cfg.seed + static_cast<std::uint64_t>(r));
        for (int k = 0; k < M; ++k) var_h[k] += z.a[k] * z.a[k];
    }
    const double se_fac = std::sqrt(2.0 / (n - 1.0));
    json heat_rows = json::array();
    for (int k = 1; k <= M; ++k) {
        const double v = var_h[k - 1] / n;
        const double th = Q.q[k - 1] / (2.0 * k * k);
        const double se = th * se_fac;
        const bool ok = std::abs(v - th) <= 3.0 * se || th == 0.0;
        res.pass = res.pass && ok;
        heat_rows.push_back({{"k", k}, {"var", v}, {"expected", th}, {"se", se}, {"pass", ok}});
    }
    res.j["z_heat"] = heat_rows;

    // wave laws per nu: position q_k/(2k^2) (nu-independent), velocity q_k/(2 nu)
    json wave_blocks = json::array();
    for (double nu : cfg.nu_list) {
        if (nu <= 0.0) throw ConfigError("stationary: nu values must be > 0");
        std::vector<double> var_p(M, 0.0), var_v(M, 0.0);
        for (int r = 0; r < n; ++r) {
            auto [zp, zv] =
                sample_stationary_wave(Q, nu, cfg.seed + static_cast<std::uint64_t>(r));
            for (int k = 0; k < M; ++k) {
                var_p[k] += zp.a[k] * zp.a[k];
                var_v[k] += zv.a[k] * zv.a[k];
            }
        }
        json rows = json::array();
        double nu2_E = 0.0;
        for (int k = 1; k <= M; ++k) {
            const double vp = var_p[k - 1] / n, vv = var_v[k - 1] / n;
            const double thp = Q.q[k - 1] / (2.0 * k * k), thv = Q.q[k - 1] / (2.0 * nu);
            const double sep = thp * se_fac, sev = thv * se_fac;
            const bool okp = std::abs(vp - thp) <= 3.0 * sep || thp == 0.0;
            const bool okv = std::abs(vv - thv) <= 3.0 * sev || thv == 0.0;
            res.pass = res.pass && okp && okv;
            nu2_E += nu * nu * vv;
            rows.push_back({{"k", k},
                            {"var_pos", vp},
                            {"expected_pos", thp},
                            {"se_pos", sep},
                            {"pass_pos", okp},
                            {"var_vel", vv},
                            {"expected_vel", thv},
                            {"se_vel", sev},
                            {"pass_vel", okv}});
        }
        res.nu_values.push_back(nu);
        res.nu2_E_zdot2.push_back(nu2_E);
        wave_blocks.push_back({{"nu", nu},
                               {"modes", rows},
                               {"nu2_E_zdot2", nu2_E},
                               {"nu2_E_zdot2_law", nu * Q.trace() / 2.0}});
    }
    res.j["z_wave"] = wave_blocks;
    res.j["pass"] = res.pass;
    return res;
}

// --- sk ------------------------------------------------------------------------

SkResult run_sk(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!(cfg.delta > 0.0)) throw ConfigError("sk: delta must be > 0");
    GridConfig grid;
    grid.M = cfg.M;
    grid.M_phys = cfg.phys_points();
    grid.dt = cfg.dt;
    const QSpectrum Q = cfg.make_q();
    const Nonlinearity f = cfg.make_f();
    const SpectralField u0(cfg.M), u1(cfg.M);

    std::vector<double> nus = cfg.nu_list;
    std::sort(nus.begin(), nus.end(), std::greater<>());

    SkResult res;
    for (double nu : nus) {
        if (nu <= 0.0) throw ConfigError("sk: nu values must be > 0");
        std::vector<double> sup(cfg.replicas, -1.0); // -1 marks blow-up
        parallel_for(cfg.replicas, cfg.threads, [&](int r) {
            const NoisePath noise = NoisePath::covering(
                cfg.seed + static_cast<std::uint64_t>(r), cfg.M, cfg.dt, 0.0, cfg.T);
            try {
                sup[r] = run_coupled(u0, u1, nu, Q, f, grid, noise, cfg.T).sup_diff;
            } catch (const NumericalError&) {
                sup[r] = -1.0;
            }
        });
        SkRow row;
        row.nu = nu;
        row.replicas = cfg.replicas;
        double s1 = 0.0, s2 = 0.0;
        int ok = 0, exceed = 0;
        for (double s : sup) {
            if (s < 0.0) {
                ++row.blowups;
                continue;
            }
            ++ok;
            s1 += s;
            s2 += s * s;
            if (s >= cfg.delta) ++exceed;
        }
        if (ok > 1) {
            row.mean_sup = s1 / ok;
            row.se_sup = std::sqrt(std::max(s2 / ok - row.mean_sup * row.mean_sup, 0.0) /
                                   (ok - 1.0));
            row.exceedance = static_cast<double>(exceed) / ok;
        }
        res.rows.push_back(row);
    }
    res.monotone = res.rows.size() >= 2;
    for (std::size_t i = 1; i < res.rows.size(); ++i)
        res.monotone = res.monotone && res.rows[i].exceedance < res.rows[i - 1].exceedance;

    std::ostringstream csv;
    csv << "nu,exceedance,mean_supdiff,se_supdiff,blowups,replicas\n";
    json rows = json::array();
    for (const auto& r : res.rows) {
        csv << r.nu << ',' << r.exceedance << ',' << r.mean_sup << ',' << r.se_sup << ','
            << r.blowups << ',' << r.replicas << '\n';
        rows.push_back({{"nu", r.nu},
                        {"exceedance", r.exceedance},
                        {"mean_supdiff", r.mean_sup},
                        {"se_supdiff", r.se_sup},
                        {"blowups", r.blowups},
                        {"replicas", r.replicas}});
    }
    res.csv = csv.str();
    res.j["rows"] = rows;
    res.j["delta"] = cfg.delta;
    res.j["monotone"] = res.monotone;
    res.j["config"] = config_echo(cfg);
    return res;
}

// --- manifold ------------------------------------------------------------------

namespace {

struct BasePointData {
    std::vector<double> coords;
    double graph_norm = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double contraction = 0.0;
    SpectralField graph_l2;   // heat graphs (for L_h slopes)
    PhasePoint graph_e;       // wave graphs
};

double measure_lh(const std::vector<SpectralField>& bases, const std::vector<BasePointData>& pts,
                  bool heat, const EMetric* metric) {
    double lh = 0.0;
    for (std::size_t i = 0; i < bases.size(); ++i)
        for (std::size_t j = i + 1; j < bases.size(); ++j) {
            const double db = (bases[i] - bases[j]).norm_l2();
            if (db <= 0.0) continue;
            double dh;
            if (heat) {
                dh = (pts[i].graph_l2 - pts[j].graph_l2).norm_l2();
            } else {
                dh = metric->norm(pts[i].graph_e - pts[j].graph_e);
            }
            lh = std::max(lh, dh / db);
        }
    return lh;
}

} // namespace

ManifoldResult run_manifold(const ExperimentConfig& cfg, bool heat) {
    cfg.validate();
    if (!heat) cfg.validate_wave(cfg.nu);
    const Nonlinearity f = cfg.make_f();
    const QSpectrum Q = cfg.make_q();
    const SineTransform plan(cfg.M, cfg.phys_points());

    LPConfig lp;
    lp.eta = cfg.eta;
    lp.T_back = cfg.T_back;
    lp.refine = cfg.refine;
    lp.tol = cfg.tol;
    lp.max_iters = cfg.max_iters;
    lp.K = cfg.K;

    const LPSetup setup = heat ? lp_setup_heat(cfg.N, f, lp, cfg.dt)
                               : lp_setup_wave(cfg.nu, cfg.N, f, lp, cfg.dt);
    const NoisePath noise =
        NoisePath::covering(cfg.seed, cfg.M, cfg.dt, -setup.T_back - 2.0 * cfg.dt, cfg.dt);
    const OUPath ou(noise, Q, heat ? 0.0 : cfg.nu);

    const auto bases = base_grid(cfg.M, cfg.N, cfg.R, cfg.grid_per_axis);
    std::vector<BasePointData> pts(bases.size());
    const int axes = std::min(cfg.N, 2);

    ManifoldResult res;
    std::optional<EMetric> metric;
    if (!heat) metric.emplace(cfg.nu, cfg.N);
    const EMetric* metric_ptr = metric ? &*metric : nullptr;

    parallel_for(static_cast<int>(bases.size()), cfg.threads, [&](int i) {
        BasePointData& p = pts[i];
        for (int a = 0; a < axes; ++a) p.coords.push_back(bases[i].a[a]);
        try {
        if (heat) {
            const HeatForcing forcing = HeatForcing::from_ou(ou, OUForcing::heat_z);
            LPSolutionHeat sol = lp_solve_heat(bases[i], forcing, f, cfg.N, lp, plan);
            p.graph_l2 = sol.graph_value;
            p.graph_norm = sol.graph_value.norm_l2();
            p.iterations = sol.diag.iterations;
            p.residual = sol.diag.final_residual;
            p.contraction = sol.diag.contraction_estimate;
        } else {
            PhasePoint xi = PhasePoint::zero(cfg.M, cfg.nu, cfg.N);
            for (int a = 0; a < axes; ++a) {
                const EigenPair e = eigen(a + 1, cfg.nu);
                xi.u.a[a] = bases[i].a[a];
                xi.v.a[a] = bases[i].a[a] * e.c_k;
            }
            LPSolutionWave sol = lp_solve_wave(xi, ou, f, cfg.N, lp, plan);
            p.graph_e = sol.graph_value;
            p.graph_norm = metric_ptr->norm(sol.graph_value);
            p.iterations = sol.diag.iterations;
            p.residual = sol.diag.final_residual;
            p.contraction = sol.diag.contraction_estimate;
        }
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at base point (" +
                                 std::to_string(bases[i].a[0]) + ", " +
                                 std::to_string(axes > 1 ? bases[i].a[1] : 0.0) + ")");
        }
    });

    std::ostringstream csv;
    csv << "base1,base2,graph_norm,iterations,residual,contraction\n";
    json rows = json::array();
    for (const auto& p : pts) {
        csv << p.coords[0] << ',' << (axes > 1 ? p.coords[1] : 0.0) << ',' << p.graph_norm << ','
            << p.iterations << ',' << p.residual << ',' << p.contraction << '\n';
        rows.push_back({{"base", p.coords},
                        {"graph_norm", p.graph_norm},
                        {"iterations", p.iterations},
                        {"residual", p.residual},
                        {"contraction", p.contraction}});
        res.sup_graph_norm = std::max(res.sup_graph_norm, p.graph_norm);
        res.max_contraction = std::max(res.max_contraction, p.contraction);
        res.max_residual = std::max(res.max_residual, p.residual);
    }
    res.csv = csv.str();

    res.L_h_measured = measure_lh(bases, pts, heat, metric_ptr);
    const double db = setup.eta - setup.beta;
    res.L_h_bound = cfg.K * cfg.K * setup.L_F / (db * (1.0 - setup.gap_value));
    const GapParams strong{cfg.K, setup.L_F, res.L_h_measured};
    res.strong_recheck =
        heat ? gap_check_heat(cfg.N, strong) : gap_check_wave(cfg.nu, cfg.N, strong);

    res.j["rows"] = rows;
    res.j["sup_graph_norm"] = res.sup_graph_norm;
    res.j["max_contraction"] = res.max_contraction;
    res.j["max_residual"] = res.max_residual;
    res.j["gap_value"] = setup.gap_value;
    res.j["L_F"] = setup.L_F;
    res.j["eta"] = setup.eta;
    res.j["T_back"] = setup.T_back;
    res.j["L_h_measured"] = res.L_h_measured;
    res.j["L_h_bound"] = res.L_h_bound;
    res.j["strong_gap_value"] = res.strong_recheck.strong_gap_value;
    res.j["strong_pass"] = res.strong_recheck.strong_pass;
    res.j["config"] = config_echo(cfg);
    return res;
}

// --- manifold-dist ---------------------------------------------------------------

ManifoldDistResult run_manifold_dist(const ExperimentConfig& cfg) {
    cfg.validate();
    const Nonlinearity f = cfg.make_f();
    const QSpectrum Q = cfg.make_q();
    const SineTransform plan(cfg.M, cfg.phys_points());

    LPConfig lp;
    lp.eta = cfg.eta;
    lp.T_back = cfg.T_back;
    lp.refine = cfg.refine;
    lp.tol = cfg.tol;
    lp.max_iters = cfg.max_iters;
    lp.K = cfg.K;

    std::vector<double> nus = cfg.nu_list;
    std::sort(nus.begin(), nus.end(), std::greater<>());
    for (double nu : nus) cfg.validate_wave(nu);

    const auto bases = base_grid(cfg.M, cfg.N, cfg.R, cfg.grid_per_axis);

    ManifoldDistResult res;
    std::ostringstream detail;
    detail << "nu,base1,base2,dist_E,dist_L2,heat_iters,wave_iters\n";
    json blocks = json::array();

    for (double nu : nus) {
        const LPSetup sh = lp_setup_heat(cfg.N, f, lp, cfg.dt);
        const LPSetup sw = lp_setup_wave(nu, cfg.N, f, lp, cfg.dt);
        const double Tb = std::max(sh.T_back, sw.T_back);
        const NoisePath noise =
            NoisePath::covering(cfg.seed, cfg.M, cfg.dt, -Tb - 2.0 * cfg.dt, cfg.dt);
        const OUPath ou(noise, Q, nu);
        const HeatForcing forcing = HeatForcing::from_ou(ou, OUForcing::wave_z);

        struct Row {
            double dE, dL2;
            int hit, wit;
        };
        std::vector<Row> rows(bases.size());
        parallel_for(static_cast<int>(bases.size()), cfg.threads, [&](int i) {
            try {
                LPSolutionHeat hs = lp_solve_heat(bases[i], forcing, f, cfg.N, lp, plan);
                const HeatManifoldPoint mp = manifold_point_heat(hs, forcing, f, plan);
                const MatchedDistance md =
                    matched_wave_distance(mp.u0, mp.u0_t, nu, ou, f, cfg.N, lp, plan);
                rows[i] = {md.dist_E, md.dist_L2, hs.diag.iterations, md.wave_diag.iterations};
            } catch (const NumericalError& e) {
                throw NumericalError(std::string(e.what()) + " at base point (" +
                                     std::to_string(bases[i].a[0]) + ", " +
                                     std::to_string(cfg.N > 1 ? bases[i].a[1] : 0.0) + ")");
            }
        });

        DistRow dr;
        dr.nu = nu;
        json jrows = json::array();
        for (std::size_t i = 0; i < bases.size(); ++i) {
            dr.sup_E = std::max(dr.sup_E, rows[i].dE);
            dr.sup_L2 = std::max(dr.sup_L2, rows[i].dL2);
            detail << nu << ',' << bases[i].a[0] << ',' << (cfg.N > 1 ? bases[i].a[1] : 0.0) << ','
                   << rows[i].dE << ',' << rows[i].dL2 << ',' << rows[i].hit << ',' << rows[i].wit
                   << '\n';
            jrows.push_back({{"base", {bases[i].a[0], cfg.N > 1 ? bases[i].a[1] : 0.0}},
                             {"dist_E", rows[i].dE},
                             {"dist_L2", rows[i].dL2}});
        }
        res.rows.push_back(dr);
        blocks.push_back(
            {{"nu", nu}, {"sup_dist_E", dr.sup_E}, {"sup_dist_L2", dr.sup_L2}, {"points", jrows}});
    }

    res.monotone_E = res.monotone_L2 = res.rows.size() >= 2;
    for (std::size_t i = 1; i < res.rows.size(); ++i) {
        res.monotone_E = res.monotone_E && res.rows[i].sup_E < res.rows[i - 1].sup_E;
        res.monotone_L2 = res.monotone_L2 && res.rows[i].sup_L2 < res.rows[i - 1].sup_L2;
    }

    std::ostringstream csv;
    csv << "nu,sup_dist_E,sup_dist_L2\n";
    for (const auto& r : res.rows) csv << r.nu << ',' << r.sup_E << ',' << r.sup_L2 << '\n';
    res.csv = csv.str();
    res.detail_csv = detail.str();
    res.j["rows"] = blocks;
    res.j["monotone_E"] = res.monotone_E;
    res.j["monotone_L2"] = res.monotone_L2;
    res.j["config"] = config_echo(cfg);
    return res;
}

// --- consistency -------------------------------------------------------------------

ConsistencyResult run_consistency(const ExperimentConfig& cfg) {
    cfg.validate();
    const Nonlinearity f = cfg.make_f();
    QSpectrum Q = cfg.make_q();
    Q.sigma = 1.0; // the z*-transformation removes exactly unit-intensity noise
    const SineTransform plan(cfg.M, cfg.phys_points());

    LPConfig lp;
    lp.eta = cfg.eta;
    lp.T_back = cfg.T_back;
    lp.refine = cfg.refine;
    lp.tol = cfg.tol;
    lp.max_iters = cfg.max_iters;
    lp.K = cfg.K;

    const LPSetup setup = lp_setup_heat(cfg.N, f, lp, cfg.dt);
    double T1 = cfg.pullback_T;
    if (T1 <= 0.0) {
        const double rate = std::max(1.0 - f.lipschitz, 0.1);
        T1 = setup.T_back + std::clamp(std::log(1.0 / cfg.pullback_tol) / rate, 5.0, 60.0);
    }
    const auto n1 = static_cast<std::int64_t>(std::ceil(T1 / cfg.dt));
    T1 = static_cast<double>(n1) * cfg.dt;
    const double T2 = 2.0 * T1;

    const NoisePath noise = NoisePath::covering(cfg.seed, cfg.M, cfg.dt, -T2 - 2.0 * cfg.dt, cfg.dt);
    const OUPath ou(noise, Q, 0.0); // heat-side check

    // route (a): manifold of the z*-shifted equation, shifted back by z*(0)
    SpectralField zeta(cfg.M);
    zeta.a[0] = cfg.base_amp;
    const HeatForcing zf = HeatForcing::from_ou(ou, OUForcing::heat_z);
    LPSolutionHeat sol_a = lp_solve_heat(zeta, zf, f, cfg.N, lp, plan);
    const SpectralField z0 = ou.heat_at(0.0);
    const SpectralField point_a = sol_a.trajectory.at_zero() + z0;

    // pullback stationary state V* of the z*-driven random equation; u* = V* + z*
    const SpectralField v1 = pullback_stationary(ou, OUForcing::heat_z, f, plan, T1);
    std::vector<SpectralField> vtraj;
    std::int64_t first_node = 0;
    const SpectralField v2 = pullback_stationary(ou, OUForcing::heat_z, f, plan, T2,
                                                 -setup.T_back - 2.0 * cfg.dt, &vtraj, &first_node);
    ConsistencyResult res;
    res.pullback_T = T2;
    res.pullback_change = (v2 - v1).norm_l2();
    res.settled = res.pullback_change <= cfg.pullback_tol;

    std::vector<SpectralField> ustar(vtraj.size(), SpectralField(cfg.M));
    for (std::size_t i = 0; i < vtraj.size(); ++i)
        ustar[i] = vtraj[i] + ou.heat_at(static_cast<double>(first_node + static_cast<std::int64_t>(i)) * cfg.dt);
    const SpectralField ustar0 = ustar.back();

    // route (b): manifold around u*, matched at the same point
    const SpectralField chi = project_low(point_a - ustar0, cfg.N);
    const HeatForcing uf = HeatForcing::from_trajectory(ustar, first_node, cfg.dt, true);
    LPSolutionHeat sol_b = lp_solve_heat(chi, uf, f, cfg.N, lp, plan);
    const SpectralField point_b = sol_b.trajectory.at_zero() + ustar0;

    res.discrepancy = (point_a - point_b).norm_l2();
    res.pass = res.discrepancy <= 10.0 * (cfg.tol + cfg.pullback_tol);

    res.j["discrepancy"] = res.discrepancy;
    res.j["pullback_T"] = res.pullback_T;
    res.j["pullback_change"] = res.pullback_change;
    res.j["settled"] = res.settled;
    res.j["pass"] = res.pass;
    res.j["lp_tol"] = cfg.tol;
    res.j["pullback_tol"] = cfg.pullback_tol;
    res.j["T_back"] = setup.T_back;
    res.j["config"] = config_echo(cfg);
    if (!res.settled)
        res.j["warning"] = "pullback estimate has not settled (successive-horizon change > tol)";
    return res;
}

} // namespace swm
