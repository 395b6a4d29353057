// swmlab: command-line laboratory for the stochastic damped wave equation, its
// heat-equation limit, and their random inertial manifolds.
//
// Subcommands: gap-check, stationary, sk, manifold, manifold-dist, consistency.
// Exit codes: 0 all checks pass, 1 a check fails, 2 invalid configuration,
// 3 numerical failure (blow-up / non-convergence).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "swm/experiments.hpp"

namespace fs = std::filesystem;
using swm::ExperimentConfig;

namespace {

struct Common {
    std::string config_file;
    std::string out_dir;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_file, "flat key = value configuration file");
    cmd->add_option("--out", c.out_dir, "output directory (default: config out_dir)");
    cmd->add_option("--set", c.sets, "override a config key, e.g. --set dt=5e-4")
        ->take_all();
}

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = c.config_file.empty() ? ExperimentConfig{}
                                                 : ExperimentConfig::from_file(c.config_file);
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw swm::ConfigError("--set expects key=value, got '" + s + "'");
        cfg.apply_override(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
    return cfg;
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

void write_json(const fs::path& p, const swm::json& j) { write_text(p, j.dump(2) + "\n"); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic damped wave / heat manifold laboratory"};
    app.require_subcommand(1);

    Common c_gap, c_stat, c_sk, c_mani, c_dist, c_cons;
    bool gap_heat = false, mani_heat = false;
    double gap_nu = -1.0, mani_nu = -1.0;
    std::string dump_ou;

    auto* gap = app.add_subcommand("gap-check", "spectral gap condition report");
    add_common(gap, c_gap);
    gap->add_flag("--heat", gap_heat, "heat case (alpha=-N^2, beta=-(N+1)^2)");
    gap->add_option("--nu", gap_nu, "wave case with this nu");

    auto* stat = app.add_subcommand("stationary", "stationary laws of z*, z*nu, dz*nu");
    add_common(stat, c_stat);
    stat->add_option("--dump-ou", dump_ou, "also dump one realized OU path to this CSV file");

    std::string dump_traj;
    auto* sk = app.add_subcommand("sk", "finite-time wave->heat convergence table");
    add_common(sk, c_sk);
    sk->add_option("--dump-traj", dump_traj,
                   "also dump one coupled trajectory pair (wave/heat CSV prefix)");

    auto* mani = app.add_subcommand("manifold", "manifold graph survey over a base grid");
    add_common(mani, c_mani);
    mani->add_flag("--heat", mani_heat, "heat-side manifold");
    mani->add_option("--nu", mani_nu, "wave-side manifold with this nu");

    auto* dist = app.add_subcommand("manifold-dist", "matched manifold distance vs nu");
    add_common(dist, c_dist);

    auto* cons = app.add_subcommand("consistency", "z*-shift vs pullback-u* manifold point");
    add_common(cons, c_cons);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gap->parsed()) {
            ExperimentConfig cfg = load(c_gap);
            if (gap_nu > 0.0) cfg.nu = gap_nu;
            if (!gap_heat && gap_nu <= 0.0 && cfg.nu <= 0.0)
                throw swm::ConfigError("gap-check: pass --heat or --nu");
            const swm::GapReport r = swm::run_gap(cfg, gap_heat);
            const swm::json j = swm::gap_to_json(r, cfg);
            write_json(fs::path(cfg.out_dir) / "gap.json", j);
            std::cout << j.dump(2) << std::endl;
            return r.pass ? 0 : 1;
        }
        if (stat->parsed()) {
            ExperimentConfig cfg = load(c_stat);
            const auto res = swm::run_stationary(cfg);
            write_json(fs::path(cfg.out_dir) / "stationary.json", res.j);
            if (!dump_ou.empty()) {
                const auto noise =
                    swm::NoisePath::covering(cfg.seed, cfg.M, cfg.dt, 0.0, cfg.T);
                const swm::OUPath ou(noise, cfg.make_q(), cfg.nu_list.front());
                std::ofstream os(dump_ou);
                ou.dump_csv(os);
            }
            std::cout << "stationary: pass=" << (res.pass ? "true" : "false") << "  ("
                      << (fs::path(cfg.out_dir) / "stationary.json").string() << ")\n";
            return res.pass ? 0 : 1;
        }
        if (sk->parsed()) {
            ExperimentConfig cfg = load(c_sk);
            const auto res = swm::run_sk(cfg);
            write_text(fs::path(cfg.out_dir) / "sk.csv", res.csv);
            write_json(fs::path(cfg.out_dir) / "sk.json", res.j);
            if (!dump_traj.empty()) {
                swm::GridConfig grid;
                grid.M = cfg.M;
                grid.M_phys = cfg.phys_points();
                grid.dt = cfg.dt;
                const auto noise =
                    swm::NoisePath::covering(cfg.seed, cfg.M, cfg.dt, 0.0, cfg.T);
                const auto rec =
                    swm::run_coupled(swm::SpectralField(cfg.M), swm::SpectralField(cfg.M),
                                     cfg.nu_list.front(), cfg.make_q(), cfg.make_f(), grid,
                                     noise, cfg.T, true);
                std::ofstream ow(dump_traj + "_wave.csv"), oh(dump_traj + "_heat.csv");
                rec.wave.dump_csv(ow);
                rec.heat.dump_csv(oh);
            }
            std::cout << res.csv;
            std::cout << "sk: monotone=" << (res.monotone ? "true" : "false") << "\n";
            return res.monotone ? 0 : 1;
        }
        if (mani->parsed()) {
            ExperimentConfig cfg = load(c_mani);
            if (mani_nu > 0.0) cfg.nu = mani_nu;
            if (!mani_heat && mani_nu <= 0.0)
                throw swm::ConfigError("manifold: pass --heat or --nu");
            const auto res = swm::run_manifold(cfg, mani_heat);
            write_text(fs::path(cfg.out_dir) / "manifold.csv", res.csv);
            write_json(fs::path(cfg.out_dir) / "manifold.json", res.j);
            std::cout << "manifold: sup|h|=" << res.sup_graph_norm
                      << " max_contraction=" << res.max_contraction
                      << " L_h=" << res.L_h_measured << "\n";
            return res.ok ? 0 : 1;
        }
        if (dist->parsed()) {
            ExperimentConfig cfg = load(c_dist);
            const auto res = swm::run_manifold_dist(cfg);
            write_text(fs::path(cfg.out_dir) / "manifold_dist.csv", res.csv);
            write_text(fs::path(cfg.out_dir) / "manifold_dist_points.csv", res.detail_csv);
            write_json(fs::path(cfg.out_dir) / "manifold_dist.json", res.j);
            std::cout << res.csv;
            std::cout << "manifold-dist: monotone_E=" << (res.monotone_E ? "true" : "false")
                      << " monotone_L2=" << (res.monotone_L2 ? "true" : "false") << "\n";
            return (res.monotone_E && res.monotone_L2) ? 0 : 1;
        }
        if (cons->parsed()) {
            ExperimentConfig cfg = load(c_cons);
            const auto res = swm::run_consistency(cfg);
            write_json(fs::path(cfg.out_dir) / "consistency.json", res.j);
            std::cout << res.j.dump(2) << std::endl;
            return res.pass ? 0 : 1;
        }
    } catch (const swm::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << std::endl;
        return 2;
    } catch (const swm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    }
    return 2;
}
