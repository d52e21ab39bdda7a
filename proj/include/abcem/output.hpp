#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "abcem/engine.hpp"

namespace abcem {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One CSV per recorded series (header row naming it, 17 significant digits
/// so 64-bit floats round-trip exactly), snapshots as snapshot_<name>.csv,
/// the configuration text copied verbatim to config.xml, and seeds/timing in
/// meta.csv.
void write_csv_run(const RunOutput& output, const std::filesystem::path& run_dir);

/// Reads back a single-column CSV written by write_csv_run.
std::vector<double> read_csv_series(const std::filesystem::path& file);

/// Self-describing HDF5 container: /series/<name> and /snapshots/<name>
/// datasets, /meta/config (verbatim configuration text), /meta/seed
/// ([master, run] pair), /meta/run_index, /meta/wall_time.
void write_container_run(const RunOutput& output, const std::filesystem::path& file);

std::vector<double> read_container_series(const std::filesystem::path& file,
                                          const std::string& dataset_path);
std::string read_container_text(const std::filesystem::path& file,
                                const std::string& dataset_path);

/// run_000, run_001, ... subdirectory (or .h5 file stem) name for a run.
std::string run_directory_name(std::int64_t run_index);

/// Serializes a double with 17 significant digits.
std::string format_double(double value);

}  // namespace abcem
