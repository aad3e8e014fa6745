#include "okselect/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "okselect/errors.hpp"

namespace okselect {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double sample_std(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

void write_trace(const std::string& path, const OnlineRun& run) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace to " + path);
    out << "round,arm,prediction,label,loss,mistake";
    const int arms = run.selector().arms;
    for (int i = 0; i < arms; ++i) out << ",p" << i;
    out << '\n';
    out << std::setprecision(12);
    for (const auto& rec : run.records()) {
        out << rec.round << ',' << rec.arm << ',' << rec.prediction << ',' << rec.label
            << ',' << rec.loss << ',' << (rec.mistake ? 1 : 0);
        for (int i = 0; i < arms; ++i) {
            out << ',' << (rec.p_snapshot.empty() ? std::nan("") : rec.p_snapshot[static_cast<std::size_t>(i)]);
        }
        out << '\n';
    }
}

struct BatchResult {
    std::vector<double> metrics;
    std::vector<double> seconds;
};

BatchResult run_batch(const RunConfig& config, const Dataset& data, long horizon,
                      const std::vector<std::uint64_t>& seeds, double lambda_scale) {
    BatchResult result;
    bool traced = false;
    for (const std::uint64_t s : seeds) {
        StreamOrder order = permute(data.rows, s);
        if (config.limit > 0) order = truncate(std::move(order), config.limit);

        EngineConfig ecfg = make_engine_config(config, data, horizon, s);
        if (ecfg.algo == Algorithm::oks || ecfg.algo == Algorithm::rf_oks) {
            ecfg.oks.lambda *= lambda_scale;
        }
        ecfg.record_p = !config.trace_path.empty() && !traced;

        OnlineRun run(ecfg);
        const RunSummary summary = run.run_stream(data.view(&order.permutation));
        result.metrics.push_back(config.is_classification() ? summary.mistake_rate
                                                            : summary.average_loss);
        result.seconds.push_back(summary.seconds);
        if (ecfg.record_p) {
            write_trace(config.trace_path, run);
            traced = true;
        }
    }
    return result;
}

std::vector<std::uint64_t> resolve_seeds(const RunConfig& config) {
    if (!config.seeds.empty()) return config.seeds;
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(config.perms));
    for (int i = 0; i < config.perms; ++i) seeds.push_back(config.seed + static_cast<std::uint64_t>(i));
    return seeds;
}

ResultRow summarize(std::string label, std::string dataset, const BatchResult& batch,
                    const std::vector<std::uint64_t>& seeds) {
    ResultRow row;
    row.algorithm = std::move(label);
    row.dataset = std::move(dataset);
    row.runs = static_cast<long>(batch.metrics.size());
    double m = 0.0;
    double sec = 0.0;
    for (double v : batch.metrics) m += v;
    for (double v : batch.seconds) sec += v;
    row.mean_metric = m / static_cast<double>(row.runs);
    row.mean_seconds = sec / static_cast<double>(row.runs);
    row.std_metric = sample_std(batch.metrics, row.mean_metric);
    row.per_run_metric = batch.metrics;
    row.run_seeds = seeds;
    return row;
}

}  // namespace

bool RunConfig::is_classification() const {
    if (!task.empty()) return task_from_name(task) == Task::classification;
    return loss_is_classification(loss_kind_from_name(loss));
}

double RunConfig::resolved_radius() const {
    if (!std::isnan(radius)) return radius;
    return loss_kind_from_name(loss) == LossKind::logistic ? 15.0 : 1.0;
}

BudgetPlan budget_emulation(const RunConfig& config, double confidence) {
    if (config.features < 1) throw InvalidInput("budget_emulation: features must be >= 1");
    BudgetPlan plan;
    const double u = config.resolved_radius();
    const LossFunction loss =
        make_loss(loss_kind_from_name(config.loss), u, std::numbers::sqrt2);
    const double b2 = 2.0;  // feature bound squared for cosine features
    const double required =
        (32.0 / 9.0) * loss.c0 * loss.c0 * u * u * b2 * std::log(1.0 / confidence);
    for (std::size_t i = 0; i < config.widths.size(); ++i) {
        plan.dims.push_back(config.features);
        if (static_cast<double>(config.features) <= required) {
            plan.warnings.push_back(
                "arm " + std::to_string(i) + ": feature count " +
                std::to_string(config.features) +
                " below the approximation-guarantee threshold " +
                std::to_string(required));
        }
    }
    return plan;
}

Dataset load_dataset(const RunConfig& config) {
    if (!config.synthetic.empty()) {
        if (config.synthetic != "rkhs") {
            throw InvalidInput("unknown synthetic stream: " + config.synthetic);
        }
        KernelSpec spec{KernelFamily::gaussian, config.synth_width, 0};
        Dataset data = synth_rkhs_regression(config.synth_rows, config.synth_dim, spec,
                                             config.resolved_radius(), config.synth_noise,
                                             derive_seed(config.seed, 0xDA7A));
        data.name = config.dataset_name.empty() ? data.name : config.dataset_name;
        return data;
    }
    if (config.data_path.empty()) throw InvalidInput("no data path or synthetic stream given");
    const std::string text = read_file(config.data_path);
    std::vector<std::string> warnings;
    Dataset raw;
    if (config.format == "libsvm") {
        raw = parse_libsvm(text, &warnings);
    } else if (config.format == "csv") {
        const int label_col = config.label_column;
        if (label_col >= 0) {
            raw = parse_csv(text, label_col, &warnings);
        } else {
            // default: last column
            const std::size_t probe = text.find('\n');
            const std::string head = text.substr(0, probe);
            const int columns = static_cast<int>(std::count(head.begin(), head.end(), ',')) + 1;
            raw = parse_csv(text, columns - 1, &warnings);
        }
    } else {
        throw InvalidInput("unknown data format: " + config.format);
    }
    for (const auto& w : warnings) std::cerr << "[okselect] warning: " << w << '\n';

    const Task task = config.task.empty()
                          ? (config.is_classification() ? Task::classification : Task::regression)
                          : task_from_name(config.task);
    Dataset data = preprocess(raw, task);
    data.name = config.dataset_name.empty()
                    ? std::filesystem::path(config.data_path).stem().string()
                    : config.dataset_name;
    return data;
}

EngineConfig make_engine_config(const RunConfig& config, const Dataset& data,
                                long horizon, std::uint64_t run_seed) {
    EngineConfig ecfg;
    ecfg.algo = algorithm_from_name(config.algorithm);
    ecfg.loss_kind = loss_kind_from_name(config.loss);
    ecfg.radius = config.resolved_radius();
    ecfg.kernels = width_grid(config.widths);
    ecfg.input_dim = data.dim;
    ecfg.horizon = horizon;
    ecfg.classification = config.is_classification();
    ecfg.features = config.features;
    ecfg.seed = run_seed;

    const bool rf = algorithm_uses_features(ecfg.algo);
    const double feature_bound = rf ? std::numbers::sqrt2 : 1.0;
    const LossFunction loss = make_loss(ecfg.loss_kind, ecfg.radius, feature_bound);
    const double ell_max =
        std::isnan(config.ell_max_override) ? loss.ell_max : config.ell_max_override;
    const int num_arms = static_cast<int>(config.widths.size());

    if (ecfg.algo == Algorithm::oks || ecfg.algo == Algorithm::rf_oks) {
        const double g = std::isnan(config.g_override) ? loss.g_scalar : config.g_override;
        OksParameters params = oks_parameters(num_arms, horizon, g, ell_max);
        if (params.delta_clipped) {
            std::cerr << "[okselect] warning: exploration rate clipped to " << params.delta
                      << " (horizon too small for the schedule)\n";
        }
        if (!std::isnan(config.delta_override)) params.delta = config.delta_override;
        if (!std::isnan(config.eta_override)) params.eta = config.eta_override;
        if (!std::isnan(config.lambda_override)) params.lambda = config.lambda_override;
        ecfg.oks = params;
    } else if (ecfg.algo == Algorithm::ioks || ecfg.algo == Algorithm::rf_ioks) {
        const IoksVariant variant = config.ioks_variant == "theorem"
                                        ? IoksVariant::theorem
                                        : IoksVariant::experiment;
        IoksParameters params =
            ioks_parameters(num_arms, horizon, ecfg.radius, loss.g_rkhs, ell_max, variant);
        if (!std::isnan(config.delta_override)) params.delta = config.delta_override;
        if (!std::isnan(config.eta_override)) params.eta_init = config.eta_override;
        ecfg.ioks = params;
    }
    return ecfg;
}

ResultTable run_experiment(const RunConfig& config) {
    const Dataset data = load_dataset(config);
    const std::vector<std::uint64_t> seeds = resolve_seeds(config);
    if (seeds.empty()) throw InvalidInput("run_experiment: no seeds configured");

    long horizon = config.limit > 0 ? std::min(config.limit, data.rows) : data.rows;
    if (config.horizon > 0) horizon = std::min(horizon, config.horizon);

    ResultTable table;
    table.metric_name = config.is_classification() ? "AMR" : "AL";

    const Algorithm algo = algorithm_from_name(config.algorithm);
    const bool grid = (algo == Algorithm::oks || algo == Algorithm::rf_oks) &&
                      std::isnan(config.lambda_override) &&
                      config.lambda_multipliers.size() > 1;
    if (grid) {
        std::size_t best = 0;
        for (std::size_t m = 0; m < config.lambda_multipliers.size(); ++m) {
            const double mult = config.lambda_multipliers[m];
            const BatchResult batch = run_batch(config, data, horizon, seeds, mult);
            std::ostringstream label;
            label << config.algorithm << "[x" << mult << "]";
            table.rows.push_back(summarize(label.str(), data.name, batch, seeds));
            if (table.rows[table.rows.size() - 1].mean_metric <
                table.rows[best].mean_metric) {
                best = table.rows.size() - 1;
            }
        }
        ResultRow tuned = table.rows[best];
        tuned.algorithm = config.algorithm + "[oracle-tuned]";
        table.rows.push_back(std::move(tuned));
    } else {
        const BatchResult batch = run_batch(config, data, horizon, seeds, 1.0);
        table.rows.push_back(summarize(config.algorithm, data.name, batch, seeds));
    }

    if (!config.output_dir.empty()) emit_report(table, config.output_dir);
    return table;
}

std::string format_metric(const std::string& metric_name, double value) {
    std::ostringstream out;
    if (metric_name == "AMR") {
        out << std::fixed << std::setprecision(2) << value * 100.0;
    } else {
        out << std::fixed << std::setprecision(4) << value;
    }
    return out.str();
}

void emit_report(const ResultTable& table, const std::string& directory,
                 bool include_timing) {
    if (table.rows.empty()) throw InvalidInput("emit_report: empty table");
    std::filesystem::create_directories(directory);

    nlohmann::ordered_json doc;
    doc["metric"] = table.metric_name;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r;
        r["algorithm"] = row.algorithm;
        r["dataset"] = row.dataset;
        r["mean"] = row.mean_metric;
        r["std"] = row.std_metric;
        r["runs"] = row.runs;
        r["per_run"] = row.per_run_metric;
        r["seeds"] = row.run_seeds;
        if (include_timing) r["mean_seconds"] = row.mean_seconds;
        doc["rows"].push_back(std::move(r));
    }
    {
        std::ofstream out(std::filesystem::path(directory) / "results.json");
        if (!out) throw IoError("cannot write results.json under " + directory);
        out << doc.dump(2) << '\n';
    }

    std::ofstream out(std::filesystem::path(directory) / "results.txt");
    if (!out) throw IoError("cannot write results.txt under " + directory);
    const std::string metric_header =
        table.metric_name == "AMR" ? "AMR (%)" : "AL";
    out << std::left << std::setw(24) << "algorithm" << std::setw(16) << "dataset"
        << std::setw(20) << metric_header;
    if (include_timing) out << std::setw(12) << "time (s)";
    out << '\n';
    for (const auto& row : table.rows) {
        std::ostringstream metric;
        metric << format_metric(table.metric_name, row.mean_metric) << " +/- "
               << format_metric(table.metric_name, row.std_metric);
        out << std::left << std::setw(24) << row.algorithm << std::setw(16) << row.dataset
            << std::setw(20) << metric.str();
        if (include_timing) {
            out << std::fixed << std::setprecision(2) << row.mean_seconds;
        }
        out << '\n';
    }
}

namespace {

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<double> parse_number_list(std::string_view value, const std::string& key) {
    std::string body(value);
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw ParseError("config key " + key + ": unterminated list");
        body = body.substr(1, body.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto tok = trim_view(item);
        if (tok.empty()) continue;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw ParseError("config key " + key + ": bad number '" + std::string(tok) + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("config key " + key + ": empty list");
    return out;
}

std::string unquote(std::string_view value) {
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\''))) {
        return std::string(value.substr(1, value.size() - 2));
    }
    return std::string(value);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    RunConfig config = std::move(base);
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim_view(line);
        if (view.empty() || view.front() == '#') continue;
        const std::size_t eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key{trim_view(view.substr(0, eq))};
        const std::string_view value = trim_view(view.substr(eq + 1));
        const auto num = [&] {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw ParseError("config line " + std::to_string(line_no) + ": bad number for " + key);
            }
            return v;
        };

        if (key == "algo" || key == "algorithm") config.algorithm = unquote(value);
        else if (key == "loss") config.loss = unquote(value);
        else if (key == "widths") config.widths = parse_number_list(value, key);
        else if (key == "U" || key == "radius") config.radius = num();
        else if (key == "horizon") config.horizon = static_cast<long>(num());
        else if (key == "delta") config.delta_override = num();
        else if (key == "eta") config.eta_override = num();
        else if (key == "lambda") config.lambda_override = num();
        else if (key == "lambda_grid") config.lambda_multipliers = parse_number_list(value, key);
        else if (key == "features" || key == "D") config.features = static_cast<int>(num());
        else if (key == "seed") config.seed = static_cast<std::uint64_t>(num());
        else if (key == "perms") config.perms = static_cast<int>(num());
        else if (key == "out_dir" || key == "output") config.output_dir = unquote(value);
        else if (key == "ell_max") config.ell_max_override = num();
        else if (key == "G" || key == "g") config.g_override = num();
        else if (key == "ioks_variant") config.ioks_variant = unquote(value);
        else if (key == "data") config.data_path = unquote(value);
        else if (key == "format") config.format = unquote(value);
        else if (key == "task") config.task = unquote(value);
        else if (key == "label_col") config.label_column = static_cast<int>(num());
        else if (key == "limit") config.limit = static_cast<long>(num());
        else if (key == "name") config.dataset_name = unquote(value);
        else if (key == "synthetic") config.synthetic = unquote(value);
        else if (key == "rows") config.synth_rows = static_cast<long>(num());
        else if (key == "dim") config.synth_dim = static_cast<int>(num());
        else if (key == "synth_width") config.synth_width = num();
        else if (key == "noise") config.synth_noise = num();
        else if (key == "trace") config.trace_path = unquote(value);
        else throw ParseError("config line " + std::to_string(line_no) + ": unknown key " + key);
    }
    return config;
}

RunConfig load_config_file(const std::string& path) {
    return parse_config_text(read_file(path));
}

}  // namespace okselect
