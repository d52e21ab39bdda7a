#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "abcem/output.hpp"

namespace abcem {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string run_directory_name(std::int64_t run_index) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "run_%03" PRId64, run_index);
    return buffer;
}

namespace {

void write_series_file(const std::filesystem::path& file, const std::string& name,
                       const std::vector<double>& values) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw OutputError("cannot write " + file.string());
    out << name << "\n";
    for (double v : values) out << format_double(v) << "\n";
    if (!out) throw OutputError("failed while writing " + file.string());
}

}  // namespace

void write_csv_run(const RunOutput& output, const std::filesystem::path& run_dir) {
    std::error_code ec;
    std::filesystem::create_directories(run_dir, ec);
    if (ec) throw OutputError("cannot create " + run_dir.string() + ": " + ec.message());

    write_series_file(run_dir / "price.csv", "price", output.price_series);
    write_series_file(run_dir / "excess_demand.csv", "excess_demand", output.ed_series);
    for (const auto& [name, values] : output.observables)
        write_series_file(run_dir / (name + ".csv"), name, values);
    for (const auto& [name, values] : output.snapshots)
        write_series_file(run_dir / ("snapshot_" + name + ".csv"), name, values);

    {
        std::ofstream config(run_dir / "config.xml", std::ios::binary);
        if (!config) throw OutputError("cannot write config.xml");
        config << output.embedded_config;
    }
    std::ofstream meta(run_dir / "meta.csv", std::ios::binary);
    if (!meta) throw OutputError("cannot write meta.csv");
    meta << "key,value\n";
    meta << "master_seed," << output.master_seed << "\n";
    meta << "run_seed," << output.run_seed << "\n";
    meta << "run_index," << output.run_index << "\n";
    meta << "wall_time_seconds," << format_double(output.wall_time_seconds) << "\n";
}

std::vector<double> read_csv_series(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw OutputError("cannot read " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw OutputError(file.string() + " is empty");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        values.push_back(std::strtod(line.c_str(), nullptr));
    }
    return values;
}

}  // namespace abcem
