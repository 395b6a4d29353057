#pragma once

// Experiment drivers behind the CLI subcommands. Each driver returns a result
// struct carrying machine-readable JSON (with the fully resolved config echoed
// under "config") and CSV tables where applicable. Replica and base-point
// fan-out is deterministic under a fixed seed: work items derive their own
// seeds and land in preallocated slots, so thread scheduling cannot reorder
// aggregation.

#include <json.hpp>

#include "swm/config.hpp"
#include "swm/integrators.hpp"
#include "swm/lyapunov_perron.hpp"

namespace swm {

using json = nlohmann::json;

json config_echo(const ExperimentConfig& cfg);
void parallel_for(int n, int threads, const std::function<void(int)>& body);

// Tensor base grid over the first min(N,2) modes, per_axis points per axis in
// [-R, R], keeping points with l2 norm <= R.
std::vector<SpectralField> base_grid(int M, int N, double R, int per_axis);

// --- gap-check ---------------------------------------------------------------
GapReport run_gap(const ExperimentConfig& cfg, bool heat);
json gap_to_json(const GapReport& r, const ExperimentConfig& cfg);

// --- stationary --------------------------------------------------------------
struct StationaryResult {
    bool pass = true;
    std::vector<double> nu_values;
    std::vector<double> nu2_E_zdot2; // nu^2 E|zdot|^2 per nu (law value: nu Tr Q / 2)
    json j;
};
StationaryResult run_stationary(const ExperimentConfig& cfg);

// --- sk (finite-time Smolukowski-Kramers) ------------------------------------
struct SkRow {
    double nu = 0.0;
    double exceedance = 0.0;
    double mean_sup = 0.0;
    double se_sup = 0.0;
    int blowups = 0;
    int replicas = 0;
};
struct SkResult {
    std::vector<SkRow> rows; // in decreasing-nu order
    bool monotone = false;   // exceedance strictly decreasing along rows
    json j;
    std::string csv;
};
SkResult run_sk(const ExperimentConfig& cfg);

// --- manifold (single-side survey over a base grid) ---------------------------
struct ManifoldResult {
    bool ok = true;
    double sup_graph_norm = 0.0;
    double max_contraction = 0.0;
    double max_residual = 0.0;
    double L_h_measured = 0.0;
    double L_h_bound = 0.0;    // K^2 L_F / ((eta-beta)(1-gap))
    GapReport strong_recheck;  // gap report re-evaluated with L_h_measured
    json j;
    std::string csv;
};
ManifoldResult run_manifold(const ExperimentConfig& cfg, bool heat);

// --- manifold-dist (matched distance vs nu) -----------------------------------
struct DistRow {
    double nu = 0.0;
    double sup_E = 0.0;
    double sup_L2 = 0.0;
};
struct ManifoldDistResult {
    std::vector<DistRow> rows; // decreasing nu
    bool monotone_E = false, monotone_L2 = false;
    json j;
    std::string csv;
    std::string detail_csv;
};
ManifoldDistResult run_manifold_dist(const ExperimentConfig& cfg);

// --- consistency (z*-shift manifold vs pullback-u* manifold) ------------------
struct ConsistencyResult {
    double discrepancy = 0.0;
    double pullback_T = 0.0;
    double pullback_change = 0.0; // successive-horizon change of the pullback state
    bool settled = true;
    bool pass = false;
    json j;
};
ConsistencyResult run_consistency(const ExperimentConfig& cfg);

} // namespace swm
