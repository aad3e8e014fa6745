#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "okselect/harness.hpp"

namespace {

void add_run_options(CLI::App& cmd, okselect::RunConfig& config) {
    cmd.add_option("--algo", config.algorithm,
                   "oks | okspp | ioks | rf-oks | rf-okspp | rf-ioks");
    cmd.add_option("--loss", config.loss,
                   "logistic | square | squared_hinge | absolute | hinge");
    cmd.add_option("--widths", config.widths, "Gaussian kernel widths (one arm each)")
        ->delimiter(',');
    cmd.add_option("-U,--radius", config.radius, "hypothesis-class radius U");
    cmd.add_option("--horizon", config.horizon, "cap on the number of rounds");
    cmd.add_option("--delta", config.delta_override, "exploration rate override");
    cmd.add_option("--eta", config.eta_override, "learning-rate override");
    cmd.add_option("--lambda", config.lambda_override, "gradient stepsize override (oks)");
    cmd.add_option("--lambda-grid", config.lambda_multipliers,
                   "stepsize multipliers for the oks grid")
        ->delimiter(',');
    cmd.add_option("--features", config.features, "random features D per arm");
    cmd.add_option("--seed", config.seed, "base seed");
    cmd.add_option("--perms", config.perms, "number of permutations (seeds)");
    cmd.add_option("--out-dir", config.output_dir, "directory for results.json / results.txt");
    cmd.add_option("--ell-max", config.ell_max_override, "loss bound used in parameter formulas");
    cmd.add_option("-G,--g-bound", config.g_override, "derivative bound used in oks formulas");
    cmd.add_option("--ioks-variant", config.ioks_variant, "theorem | experiment");
    cmd.add_option("--data", config.data_path, "dataset file");
    cmd.add_option("--format", config.format, "libsvm | csv");
    cmd.add_option("--task", config.task, "cls | reg");
    cmd.add_option("--label-col", config.label_column, "csv label column (default: last)");
    cmd.add_option("--limit", config.limit, "use only the first n rows post-permutation");
    cmd.add_option("--name", config.dataset_name, "dataset label in reports");
    cmd.add_option("--synthetic", config.synthetic, "generate a stream instead: rkhs");
    cmd.add_option("--rows", config.synth_rows, "synthetic stream length");
    cmd.add_option("--dim", config.synth_dim, "synthetic feature dimension");
    cmd.add_option("--synth-width", config.synth_width, "synthetic target kernel width");
    cmd.add_option("--noise", config.synth_noise, "synthetic label noise");
    cmd.add_option("--trace", config.trace_path, "write a per-round CSV for the first run");
}

std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    okselect::RunConfig config;
    const std::string config_path = find_config_path(argc, argv);
    try {
        if (!config_path.empty()) config = okselect::load_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    CLI::App app{"online kernel selection under bandit feedback"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "execute an experiment and report metrics");
    std::string config_path_opt;
    run->add_option("--config", config_path_opt, "flat key = value config file");
    // Bound variables are assigned only for flags actually passed, so the
    // command line overrides the file.
    add_run_options(*run, config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (okselect::algorithm_uses_features(okselect::algorithm_from_name(config.algorithm))) {
            const auto plan = okselect::budget_emulation(config);
            for (const auto& w : plan.warnings) std::cerr << "[okselect] warning: " << w << '\n';
        }

        const okselect::ResultTable table = okselect::run_experiment(config);
        for (const auto& row : table.rows) {
            std::cout << row.algorithm << " @ " << row.dataset << ": " << table.metric_name
                      << " = " << okselect::format_metric(table.metric_name, row.mean_metric)
                      << " +/- " << okselect::format_metric(table.metric_name, row.std_metric)
                      << "  (" << row.runs << " runs, " << row.mean_seconds << " s/run)\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
