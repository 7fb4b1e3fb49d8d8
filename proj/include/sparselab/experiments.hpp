#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparselab/problem.hpp"

namespace sparselab {

struct LambdaGrid {
    enum class Mode { log, linear, explicit_values };
    Mode mode = Mode::log;
    int count = 60;
    double min_factor = 1e-3;          // grid floor as a fraction of lambda_inf
    std::vector<double> values;        // explicit mode only, in lambda/lambda_inf units

    // Grid factors in descending order, starting at 1 (= lambda_inf).
    std::vector<double> factors() const;
};

struct SweepConfig {
    int m = 0;
    int N = 0;
    int k = 0;
    std::vector<double> noise_levels;
    int trials = 0;
    std::uint64_t base_seed = 1;
    LambdaGrid lambda_grid;
    double delta_for_bounds = 0.7;
    bool warm_start = true;
    SignalDist signal_dist = SignalDist::gaussian;
};

// One row per (noise level, grid point): aggregate statistics across trials
// plus the bound overlays evaluated from the same row's scalars.
struct SweepRecord {
    double noise_level = 0.0;
    double lambda_factor = 0.0;   // lambda / lambda_inf
    double lambda = 0.0;          // lambda_factor * mean lambda_inf
    double lambda_inf_mean = 0.0;
    double mu = 0.0;
    double theta = 0.0;
    bool in_regime = true;        // theta <= 1
    int trials = 0;
    int defects = 0;              // flagged (non-certified) solves, excluded from stats

    double s_mean = 0.0, s_std = 0.0;
    double l1_norm_mean = 0.0, l1_norm_std = 0.0;
    double rescaled_residual_mean = 0.0, rescaled_residual_std = 0.0;
    double residual_norm_mean = 0.0;
    double entropy_mean = 0.0, entropy_std = 0.0;
    double l1_error_mean = 0.0, l1_error_std = 0.0;
    double l2_error_mean = 0.0, l2_error_std = 0.0;
    double target_l1_mean = 0.0;  // mean ||x*(k)||_1

    double residual_upper = 0.0;
    double residual_lower_from_mean_support = 0.0;
    long long sparsity_limit = 0;
    double chi = 0.0;
    double l1_upper_improved = 0.0;
    double l2_upper = 0.0;
    double l2_lower = 0.0;
    double delta_used = 0.0;
    int k = 0;
};

enum class Figure { support, l1norm, residual, entropy, l1error };

// Flat "key = value" config file, one key per line; '#' starts a comment.
// Unknown keys are errors. See the README for the key list.
SweepConfig parse_sweep_config(const std::string& path);
SweepConfig parse_sweep_config_text(const std::string& text);

// Runs the full sweep: per noise level and trial, a fresh (A, x*, eps) from
// seeds base_seed + trial, solved over the descending lambda grid
// (warm-started when enabled); per-grid-point aggregation in fixed trial
// order. threads = 0 means hardware concurrency.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, int threads = 0);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRecord& r);

// Writes the figure's columns (plus bound overlays) for one noise level and a
// companion gnuplot script next to it.
void emit_figure_data(const std::vector<SweepRecord>& records, Figure figure,
                      const std::string& path);

Figure figure_from_name(const std::string& name); // throws on unknown name
std::string figure_name(Figure f);

} // namespace sparselab
