#pragma once

// Flat `key = value` experiment configuration with `#` comments. Every field
// has a default; unknown keys are rejected. CLI flags override file values.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swm/errors.hpp"
#include "swm/spectral.hpp"

namespace swm {

struct ExperimentConfig {
    // discretization
    int M = 16;
    int M_phys = 0; // 0 => 2M
    int N = 2;
    double dt = 1e-3;
    int refine = 1;

    // horizons and tolerances
    double T = 1.0;
    double T_back = 0.0; // 0 => auto
    double T_inv = 0.5;
    double tol = 1e-8;
    int max_iters = 400;
    double eta = 0.0; // 0 => midpoint
    double pullback_T = 0.0; // 0 => auto
    double pullback_tol = 1e-6;

    // physics
    double nu = 1e-3;
    std::vector<double> nu_list{1e-2, 1e-3, 1e-4};
    double sigma = 1.0;
    std::string q_law = "power";
    double q_p = 4.0;
    double q_scale = 1.0;
    std::string f_kind = "sin"; // zero | sin | linear
    double f_a = 0.5;

    // gap parameters
    double K = 1.0;
    double L_F = 1.0;
    double L_h = 0.0;

    // experiment shape
    double R = 1.0;
    int grid_per_axis = 5;
    double base_amp = 0.3;
    int replicas = 200;
    std::uint64_t seed = 42;
    double delta = 0.1;
    int samples = 10;
    int threads = 0; // 0 => hardware concurrency
    std::string out_dir = "out";

    int phys_points() const { return M_phys > 0 ? M_phys : 2 * M; }
    QSpectrum make_q() const;
    Nonlinearity make_f() const;

    // generic invariants; wave-side nu constraints are checked where nu is used
    void validate() const;
    void validate_wave(double nu_value) const;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
    void apply_override(const std::string& key, const std::string& value);

    // resolved key=value view (echoed into every experiment output)
    std::map<std::string, std::string> resolved() const;
};

} // namespace swm
