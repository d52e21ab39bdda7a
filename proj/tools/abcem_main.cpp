// Command-line front end: run, sweep, analyze, bench.
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "abcem/output.hpp"
#include "abcem/runner.hpp"
#include "abcem/stats.hpp"

namespace fs = std::filesystem;
using namespace abcem;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string format;
    std::int64_t seed = -1;
    bool seed_set = false;
    std::int64_t reps = 0;
    unsigned threads = 1;
};

std::string load_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read config file \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Applies CLI/environment overrides by rewriting the configuration text, so
/// the embedded config always matches the effective run.
SimulationConfig effective_config(const CliOptions& opts) {
    std::string text = load_text(opts.config_path);
    std::vector<std::pair<std::string, std::string>> overrides;
    if (const char* env_seed = std::getenv("SABCEMM_SEED"); env_seed && !opts.seed_set)
        overrides.emplace_back("runPlan.masterSeed", env_seed);
    if (opts.seed_set) overrides.emplace_back("runPlan.masterSeed", std::to_string(opts.seed));
    if (opts.reps > 0) overrides.emplace_back("runPlan.repetitions", std::to_string(opts.reps));
    if (!opts.format.empty()) overrides.emplace_back("outputSettings.format", opts.format);
    if (!opts.out_dir.empty()) overrides.emplace_back("outputSettings.destination", opts.out_dir);
    if (!overrides.empty()) text = override_config_values(text, overrides);
    return parse_config_text(text);
}

void write_run(const SimulationConfig& config, const RunOutput& output) {
    const fs::path destination(config.output.destination);
    if (config.output.format == OutputFormat::CsvDirectory) {
        write_csv_run(output, destination / run_directory_name(output.run_index));
    } else {
        std::error_code ec;
        fs::create_directories(destination, ec);
        write_container_run(output, destination / (run_directory_name(output.run_index) + ".h5"));
    }
}

int cmd_run(const CliOptions& opts) {
    const SimulationConfig config = effective_config(opts);
    const auto outputs = run_plan(config, opts.threads);
    for (const RunOutput& output : outputs) write_run(config, output);
    std::cout << outputs.size() << " run(s) written to " << config.output.destination << "\n";
    return 0;
}

int cmd_sweep(const CliOptions& opts, const std::vector<std::string>& params) {
    std::vector<SweepParam> sweep_params;
    for (const std::string& raw : params) {
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", "--param expects path=v1,v2,..., got \"" + raw + "\"");
        SweepParam param;
        param.path = raw.substr(0, eq);
        std::stringstream values(raw.substr(eq + 1));
        std::string value;
        while (std::getline(values, value, ',')) param.values.push_back(value);
        sweep_params.push_back(std::move(param));
    }
    std::string text = load_text(opts.config_path);
    if (opts.seed_set)
        text = override_config_values(text, {{"runPlan.masterSeed", std::to_string(opts.seed)}});
    const auto configs = expand_sweep(text, std::move(sweep_params));
    const fs::path base_dir(opts.out_dir.empty() ? "sweep" : opts.out_dir);
    std::ofstream manifest;
    std::error_code ec;
    fs::create_directories(base_dir, ec);
    if (ec) throw OutputError("cannot create " + base_dir.string());
    manifest.open(base_dir / "manifest.csv", std::ios::binary);
    manifest << "sweep_index,config\n";
    for (std::size_t i = 0; i < configs.size(); ++i) {
        SimulationConfig config = configs[i];
        char name[32];
        std::snprintf(name, sizeof name, "sweep_%03zu", i);
        config.output.destination = (base_dir / name).string();
        const auto outputs = run_plan(config, opts.threads);
        for (const RunOutput& output : outputs) write_run(config, output);
        std::ofstream config_copy(base_dir / name / "config.xml", std::ios::binary);
        config_copy << config.source_text;
        manifest << i << "," << name << "\n";
    }
    std::cout << configs.size() << " sweep point(s) written to " << base_dir.string() << "\n";
    return 0;
}

int cmd_analyze(const std::string& run_dir, const std::string& stats_list, int lags, int bins) {
    const fs::path dir(run_dir);
    const auto prices_vec = read_csv_series(dir / "price.csv");
    Eigen::Map<const Eigen::ArrayXd> prices(prices_vec.data(),
                                            static_cast<Eigen::Index>(prices_vec.size()));
    const Eigen::ArrayXd returns = stats::log_returns(prices);
    std::stringstream selected(stats_list);
    std::string stat;
    while (std::getline(selected, stat, ',')) {
        if (stat == "kurtosis") {
            std::ofstream out(dir / "stats_kurtosis.csv", std::ios::binary);
            out << "series,excess_kurtosis\n";
            out << "log_returns," << format_double(stats::excess_kurtosis(returns)) << "\n";
        } else if (stat == "acf") {
            const Eigen::ArrayXd raw = stats::autocorrelation(returns, lags);
            const Eigen::ArrayXd abs = stats::autocorrelation(returns.abs(), lags);
            std::ofstream out(dir / "stats_acf.csv", std::ios::binary);
            out << "lag,log_returns,abs_log_returns\n";
            for (Eigen::Index l = 0; l < raw.size(); ++l)
                out << l << "," << format_double(raw[l]) << "," << format_double(abs[l]) << "\n";
        } else if (stat == "qq") {
            std::ofstream out(dir / "stats_qq.csv", std::ios::binary);
            out << "theoretical,empirical\n";
            for (const auto& point : stats::qq_points(returns))
                out << format_double(point.theoretical) << "," << format_double(point.empirical)
                    << "\n";
        } else if (stat == "hist") {
            const auto h = stats::histogram(returns, bins);
            std::ofstream out(dir / "stats_hist.csv", std::ios::binary);
            out << "bin_lo,bin_hi,count\n";
            for (std::size_t b = 0; b < h.counts.size(); ++b)
                out << format_double(h.edges[static_cast<Eigen::Index>(b)]) << ","
                    << format_double(h.edges[static_cast<Eigen::Index>(b) + 1]) << ","
                    << h.counts[b] << "\n";
        } else {
            throw ConfigError("", "unknown statistic \"" + stat +
                                      "\" (expected kurtosis, acf, qq or hist)");
        }
    }
    std::cout << "statistics written to " << dir.string() << "\n";
    return 0;
}

int cmd_bench(const std::string& model, const std::vector<std::size_t>& agents,
              const std::vector<std::int64_t>& steps, int reps, std::uint64_t seed,
              const std::string& out_file) {
    if (model != "cross")
        throw ConfigError("", "bench supports --model cross (the linear-scaling workhorse)");
    const auto rows = bench_cross(agents, steps, reps, seed);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_file.empty()) {
        file.open(out_file, std::ios::binary);
        if (!file) throw OutputError("cannot write " + out_file);
        out = &file;
    }
    *out << "model,agents,steps,repetition,wall_seconds\n";
    for (const auto& row : rows)
        *out << row.model << "," << row.agents << "," << row.steps << "," << row.repetition
             << "," << format_double(row.wall_seconds) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based market model simulator"};
    app.require_subcommand(1);

    CliOptions opts;

    auto* run = app.add_subcommand("run", "Run all repetitions of a configuration");
    run->add_option("config", opts.config_path, "XML configuration file")->required();
    run->add_option("--seed", opts.seed, "Override the master seed");
    run->add_option("--reps", opts.reps, "Override the repetition count");
    run->add_option("--out", opts.out_dir, "Override the output destination");
    run->add_option("--format", opts.format, "Output format: csv or container");
    run->add_option("--threads", opts.threads, "Worker threads across repetitions");

    std::vector<std::string> sweep_params;
    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    sweep->add_option("config", opts.config_path, "XML configuration file")->required();
    sweep->add_option("--param", sweep_params, "path=v1,v2,... (repeatable)")->required();
    sweep->add_option("--seed", opts.seed, "Override the master seed");
    sweep->add_option("--out", opts.out_dir, "Sweep output directory");
    sweep->add_option("--threads", opts.threads, "Worker threads across repetitions");

    std::string run_dir, stats_list = "kurtosis,acf,qq,hist";
    int lags = 20, bins = 50;
    auto* analyze = app.add_subcommand("analyze", "Stylized-fact statistics for a run");
    analyze->add_option("run-dir", run_dir, "Run directory with csv output")->required();
    analyze->add_option("--stats", stats_list, "Comma list of kurtosis,acf,qq,hist");
    analyze->add_option("--lags", lags, "Autocorrelation lags");
    analyze->add_option("--bins", bins, "Histogram bins");

    std::string bench_model = "cross", bench_out;
    std::vector<std::size_t> bench_agents{1000};
    std::vector<std::int64_t> bench_steps{10000};
    int bench_reps = 1;
    std::uint64_t bench_seed = 20170913;
    auto* bench = app.add_subcommand("bench", "Runtime scaling measurements");
    bench->add_option("--model", bench_model, "Model to time (cross)");
    bench->add_option("--agents", bench_agents, "Agent counts")->delimiter(',');
    bench->add_option("--steps", bench_steps, "Step counts")->delimiter(',');
    bench->add_option("--reps", bench_reps, "Repetitions per point");
    bench->add_option("--seed", bench_seed, "Master seed");
    bench->add_option("--out", bench_out, "Timing CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }
    opts.seed_set = run->count("--seed") > 0 || sweep->count("--seed") > 0;

    try {
        if (run->parsed()) return cmd_run(opts);
        if (sweep->parsed()) return cmd_sweep(opts, sweep_params);
        if (analyze->parsed()) return cmd_analyze(run_dir, stats_list, lags, bins);
        if (bench->parsed())
            return cmd_bench(bench_model, bench_agents, bench_steps, bench_reps, bench_seed,
                             bench_out);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
