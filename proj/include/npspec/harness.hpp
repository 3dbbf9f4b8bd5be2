#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "npspec/bootstrap.hpp"
#include "npspec/dgp.hpp"
#include "npspec/kernels.hpp"
#include "npspec/smoothing.hpp"
#include "npspec/spectest.hpp"
#include "npspec/stats.hpp"

namespace npspec {

struct ModelGrid {
    Model model = Model::s_null;
    std::vector<double> thetas{0.0};

    friend bool operator==(const ModelGrid&, const ModelGrid&) = default;
};

/// A size/power grid: every (model, theta) x error law x n is one cell, and
/// every cell reports every test under every requested calibration and level.
struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<ModelGrid> models{ModelGrid{}};
    std::vector<ErrorLaw> errors{ErrorLaw::normal};
    std::vector<Index> sizes{100};
    std::vector<TestSpec> tests;  // empty means q, q0, glr with quadratic loss
    KernelSpec kernel;
    BandwidthSelector bandwidth;
    Calibration calibration = Calibration::bootstrap;
    int b = 99;
    BootstrapMode mode = BootstrapMode::conditional;
    std::vector<double> levels{0.10, 0.05};
    int reps = 500;
    std::uint64_t seed = 1;
    Truncation truncation = Truncation::clip;
    DeltaShape shape = DeltaShape::quadratic;
    int local_dim = 1;
    std::optional<double> omega_measure;

    // Execution only; never part of the hash and never changes a result.
    unsigned threads = 0;
    int shard_index = 0;
    int shard_count = 1;

    std::vector<TestSpec> effective_tests() const;
    /// Throws std::invalid_argument describing the first problem found.
    void validate() const;
};

/// key = value lines in a fixed order covering every field that affects results.
std::string canonical_config_text(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a over canonical_config_text.
std::string config_hash(const ExperimentConfig& config);

/// Flat `key = value` format, one per line, `#` starts a comment. Keys:
///   name, models, thetas, thetas.<model>, errors, n, tests, kernel, bandwidth,
///   calibration, bootstrap, boot_mode, levels, reps, seed, truncation,
///   local.shape, local.dim, omega, threads, shard
/// Unknown or repeated keys are errors (std::invalid_argument with the line number).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Reference size and power grids: table2 .. table6.
std::optional<ExperimentConfig> preset_config(std::string_view name);
std::span<const std::string_view> preset_names();

struct CellResult {
    std::uint64_t ordinal = 0;  // position in the full grid; fixes ordering across shards
    std::string model;
    double theta = 0.0;
    std::string errors;
    Index n = 0;
    std::string test;
    std::string calibration;
    double level = 0.0;
    int reps = 0;
    int valid = 0;       // reps minus degenerate replications
    int degenerate = 0;
    int rejections = 0;
    double rate = 0.0;   // percent of valid replications
    double se = 0.0;     // 100 sqrt(r(1 - r)/valid)

    friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct ReportMetadata {
    std::string started_utc;
    double wall_seconds = 0.0;
    unsigned threads = 1;
    std::string shard = "0/1";

    friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct MCReport {
    int schema_version = 1;
    std::string name;
    std::string config_hash;
    std::string config_text;
    std::uint64_t master_seed = 0;
    int reps = 0;
    std::vector<CellResult> cells;
    ReportMetadata metadata;

    friend bool operator==(const MCReport&, const MCReport&) = default;
};

/// Stream layout: the data stream of replication r in a cell is
///   derive_seed(derive_seed(derive_seed(seed, key), r), 0)
/// and its bootstrap stream uses index 1 in place of 0, where key hashes the
/// error law and n only. Models and theta values therefore share draws
/// (common random numbers), and adding cells never moves existing streams.
std::uint64_t replication_seed(std::uint64_t master_seed, ErrorLaw errors, Index n, int rep);

/// Runs this config's shard. Throws DegenerateError if more than 1% of a
/// cell's replications are degenerate.
MCReport run_experiment(const ExperimentConfig& config);

std::string report_to_json(const MCReport& report);
/// Throws DataError with a line number on malformed input.
MCReport report_from_json(std::string_view json);
void persist_report(const MCReport& report, const std::filesystem::path& path);
MCReport load_report(const std::filesystem::path& path);

/// Union of two reports of the same config (e.g. shards). Overlapping cells
/// must agree exactly. Throws std::invalid_argument on a hash mismatch.
MCReport merge_reports(const MCReport& a, const MCReport& b);

std::string format_report_csv(const MCReport& report);
std::string format_report_text(const MCReport& report);

const CellResult* find_cell(const MCReport& report, std::string_view model, double theta, std::string_view errors,
                            Index n, std::string_view test, std::string_view calibration, double level);

}  // namespace npspec
