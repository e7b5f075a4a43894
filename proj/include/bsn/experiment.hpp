#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsn/link_sim.hpp"
#include "bsn/rf.hpp"
#include "bsn/scenario.hpp"

namespace bsn {

enum class ExperimentKind { Echo, Star, Classify, Energy, Scan };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

struct ExperimentParams {
    std::optional<int> channel;           ///< overrides the scenario channel
    std::optional<double> tx_power_dbm;   ///< overrides the scenario power
    std::size_t runs = 10;
    std::size_t messages = 1000;
    std::uint64_t seed = 1;
    InterferenceModel model;
    /// Activity replayed by classify, energy and star runs.
    std::string activity = "Fall";
    double duration_s = 60.0;
};

/// Outcome of one experiment. `config` holds everything needed to run it
/// again; `files` maps output file names to their contents.
struct ExperimentResult {
    std::string scenario;
    ExperimentKind kind = ExperimentKind::Echo;
    std::uint64_t seed = 0;
    std::string config_json;
    std::string summary_json;
    std::map<std::string, std::string> files;
};

ExperimentResult run_experiment(ExperimentKind kind, const Scenario& scenario, const ExperimentParams& params);

/// Runs the experiment described by a result's config again.
ExperimentResult rerun(const std::string& config_json);

/// Writes result.json plus every output file into `dir`, atomically.
void write_result(const ExperimentResult& result, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Table reproduction and calibration
// ---------------------------------------------------------------------------

/// One measured configuration of the echo test.
struct TableTarget {
    std::string table;
    std::string scenario;
    int channel = kFirstWpanChannel;
    double power_dbm = 0.0;
    /// Interferer switched off for this row, empty when none.
    std::string disabled;
    double mean_pct = 0.0;
    double std_pct = 0.0;
    /// Rows marked holdout are checked but never fitted.
    bool holdout = false;
};

/// CSV with header `table,scenario,channel,power_dbm,disabled,mean_pct,std_pct,role`
/// where `disabled` is `-` for none and role is `fit` or `holdout`.
std::vector<TableTarget> parse_targets(std::string_view csv);

/// Scenario of a target row, with the named interferer disabled.
Scenario target_scenario(const TableTarget& target);

struct TableRow {
    TableTarget target;
    RunStats stats;
    double expected_pct = 0.0;
};

/// Runs the echo test for each target.
std::vector<TableRow> reproduce_tables(std::span<const TableTarget> targets, const InterferenceModel& model,
                                       std::size_t runs, std::size_t messages, std::uint64_t seed);

/// CSV laid out like the measurement tables:
/// `table,power_dbm,channel,condition,mean_pct,std_pct,expected_pct,target_mean_pct,target_std_pct`.
/// Percentages carry two decimals; the condition is `ON`/`OFF` for rows with
/// a switchable interferer and `-` otherwise.
std::string export_table(std::span<const TableRow> rows);

struct CalibrationResult {
    InterferenceModel model;
    double rms_error_pct = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Fits the interference-model constants to the non-holdout targets by
/// minimizing the squared error of the expected round-trip success.
CalibrationResult calibrate(std::span<const TableTarget> targets, const InterferenceModel& start = {});

}  // namespace bsn
