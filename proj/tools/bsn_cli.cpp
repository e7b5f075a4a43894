// Command-line front end: runs experiments, fits the interference model and
// decodes frame logs.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bsn/errors.hpp"
#include "bsn/experiment.hpp"
#include "bsn/link_sim.hpp"
#include "bsn/scenario.hpp"

namespace {

bsn::InterferenceModel load_model(const std::string& path) {
    if (path.empty()) return {};
    return bsn::parse_calibration(bsn::read_file(path));
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        bsn::write_file_atomic(out_path, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Body sensor network simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run one experiment");
    std::string kind;
    std::string scenario_name = "apartment";
    std::optional<int> channel;
    std::optional<double> power;
    bsn::ExperimentParams params;
    std::string out_dir = "out";
    std::string calibration_path;
    run->add_option("kind", kind, "echo | star | classify | energy | scan")
        ->required()
        ->check(CLI::IsMember({"echo", "star", "classify", "energy", "scan"}));
    run->add_option("--scenario", scenario_name, "Scenario file or preset name");
    run->add_option("--channel", channel, "802.15.4 channel")->check(CLI::Range(11, 26));
    run->add_option("--power", power, "Transmit power in dBm");
    run->add_option("--seed", params.seed, "Random seed");
    run->add_option("--runs", params.runs, "Echo runs")->check(CLI::PositiveNumber);
    run->add_option("--messages", params.messages, "Messages per echo run")->check(CLI::PositiveNumber);
    run->add_option("--activity", params.activity, "Activity for classify, energy and star runs");
    run->add_option("--duration", params.duration_s, "Trace duration in seconds")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--calibration", calibration_path, "Interference model file");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Fit the interference model to measured tables");
    std::string targets_path;
    std::string cal_out = "calibration.cal";
    cal->add_option("--targets", targets_path, "Targets CSV")->required()->check(CLI::ExistingFile);
    cal->add_option("--out", cal_out, "Where to write the fitted model");

    // tables
    auto* tables = app.add_subcommand("tables", "Reproduce the measurement tables with the echo test");
    std::string tables_targets;
    std::string tables_out;
    std::string tables_cal;
    std::size_t tables_runs = 10;
    std::size_t tables_messages = 1000;
    std::uint64_t tables_seed = 1;
    tables->add_option("--targets", tables_targets, "Targets CSV")->required()->check(CLI::ExistingFile);
    tables->add_option("--calibration", tables_cal, "Interference model file");
    tables->add_option("--runs", tables_runs)->check(CLI::PositiveNumber);
    tables->add_option("--messages", tables_messages)->check(CLI::PositiveNumber);
    tables->add_option("--seed", tables_seed);
    tables->add_option("--out", tables_out, "Output CSV (stdout when omitted)");

    // replay-log
    auto* replay = app.add_subcommand("replay-log", "Decode a binary frame log to CSV");
    std::string log_path;
    std::string replay_out;
    replay->add_option("file", log_path)->required()->check(CLI::ExistingFile);
    replay->add_option("--out", replay_out, "Output CSV (stdout when omitted)");

    // presets
    auto* export_preset = app.add_subcommand("export-preset", "Print a built-in scenario");
    std::string preset;
    export_preset->add_option("name", preset)->required();
    auto* list = app.add_subcommand("presets", "List built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            params.channel = channel;
            params.tx_power_dbm = power;
            params.model = load_model(calibration_path);
            const bsn::Scenario scenario = bsn::load_scenario(scenario_name);
            const auto result = bsn::run_experiment(bsn::experiment_kind_from_string(kind), scenario, params);
            bsn::write_result(result, out_dir);
            std::cout << result.summary_json << '\n';
        } else if (*cal) {
            const auto targets = bsn::parse_targets(bsn::read_file(targets_path));
            const auto fit = bsn::calibrate(targets);
            bsn::write_file_atomic(cal_out, bsn::serialize_calibration(fit.model));
            std::cout << bsn::serialize_calibration(fit.model) << "# rms error " << fit.rms_error_pct << " points, "
                      << fit.iterations << " iterations" << (fit.converged ? "" : " (not converged)") << '\n';
        } else if (*tables) {
            const auto targets = bsn::parse_targets(bsn::read_file(tables_targets));
            const auto rows =
                bsn::reproduce_tables(targets, load_model(tables_cal), tables_runs, tables_messages, tables_seed);
            emit(tables_out, bsn::export_table(rows));
        } else if (*replay) {
            std::ifstream in(log_path, std::ios::binary);
            const auto decoded = bsn::replay_frame_log(in);
            std::ostringstream csv;
            bsn::write_frames_csv(csv, decoded.frames);
            emit(replay_out, csv.str());
            if (decoded.crc_errors > 0) {
                std::cerr << decoded.crc_errors << " records failed the CRC check\n";
                return 2;
            }
        } else if (*export_preset) {
            const auto text = bsn::preset_text(preset);
            if (!text) throw bsn::ScenarioError("no preset named '" + preset + "'");
            std::cout << *text;
        } else if (*list) {
            for (const auto& name : bsn::preset_names()) std::cout << name << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
