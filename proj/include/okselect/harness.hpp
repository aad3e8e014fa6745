#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "okselect/data.hpp"
#include "okselect/engine.hpp"

namespace okselect {

// Experiment description. NaN overrides mean "auto": resolve from the
// parameter formulas before the run starts and record the resolved values.
struct RunConfig {
    std::string algorithm = "okspp";
    std::string loss = "square";
    std::vector<double> widths = default_widths();
    double radius = std::numeric_limits<double>::quiet_NaN();  // U; default by loss
    long horizon = 0;  // 0 = stream length
    double delta_override = std::numeric_limits<double>::quiet_NaN();
    double eta_override = std::numeric_limits<double>::quiet_NaN();
    double lambda_override = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> lambda_multipliers = {1.0, 5.0, 10.0, 25.0};  // oks grid
    int features = 400;  // D per arm
    std::uint64_t seed = 1;
    int perms = 10;
    std::vector<std::uint64_t> seeds;  // explicit list; else seed .. seed+perms-1
    std::string output_dir;
    double ell_max_override = std::numeric_limits<double>::quiet_NaN();  // formulas only
    double g_override = std::numeric_limits<double>::quiet_NaN();       // oks formulas only
    std::string ioks_variant = "experiment";
    // data source
    std::string data_path;
    std::string format = "csv";  // libsvm | csv
    std::string task;            // cls | reg; default from loss
    int label_column = -1;       // -1 = last column
    long limit = 0;              // 0 = all rows (first n post-permutation otherwise)
    std::string dataset_name;
    std::string synthetic;  // "rkhs" generates a stream instead of reading data_path
    long synth_rows = 2000;
    int synth_dim = 2;
    double synth_width = 1.0;
    double synth_noise = 0.0;
    std::string trace_path;  // per-round CSV of the first run

    bool is_classification() const;
    double resolved_radius() const;
};

struct ResultRow {
    std::string algorithm;  // label, e.g. "oks[x5]" or "okspp"
    std::string dataset;
    double mean_metric = 0.0;
    double std_metric = 0.0;
    double mean_seconds = 0.0;
    long runs = 0;
    std::vector<double> per_run_metric;  // one entry per seed, provenance
    std::vector<std::uint64_t> run_seeds;
};

struct ResultTable {
    std::string metric_name;  // "AMR" or "AL"
    std::vector<ResultRow> rows;
};

struct BudgetPlan {
    std::vector<int> dims;  // per-arm D_i
    std::vector<std::string> warnings;
};

// Uniform realization of the time budget: D_i = D for every arm, with a
// warning when D is too small for the feature-approximation guarantee
// D > (32/9) C0^2 U^2 B^2 ln(1/confidence).
BudgetPlan budget_emulation(const RunConfig& config, double confidence = 0.05);

ResultTable run_experiment(const RunConfig& config);

// Writes <dir>/results.json and <dir>/results.txt. AMR is printed in percent
// with 2 decimals, AL with 4 decimals. Timing fields can be suppressed to
// make reports byte-for-byte reproducible.
void emit_report(const ResultTable& table, const std::string& directory,
                 bool include_timing = true);

std::string format_metric(const std::string& metric_name, double value);

// Flat key = value config document (strings, numbers, booleans, [lists]).
RunConfig load_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

// Shared by the harness and the CLI: loads + preprocesses the configured
// dataset (or generates the synthetic stream).
Dataset load_dataset(const RunConfig& config);

// Builds the fully resolved engine configuration for one run of `algorithm`
// (OKS lambda gets multiplied separately per grid point).
EngineConfig make_engine_config(const RunConfig& config, const Dataset& data,
                                long horizon, std::uint64_t run_seed);

}  // namespace okselect
