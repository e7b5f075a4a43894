#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsn/link_sim.hpp"
#include "bsn/rf.hpp"

namespace bsn {

/// A home layout: node positions, walls and objects, and the radios that
/// share the band.
struct Scenario {
    std::string name;
    std::optional<Vec2> base;
    std::optional<Vec2> remote;
    std::vector<Vec2> sensors;
    std::vector<Obstacle> obstacles;
    std::vector<Interferer> interferers;
    int channel = kFirstWpanChannel;
    double tx_power_dbm = 0.0;
    double sensitivity_dbm = kDefaultSensitivityDbm;
    MaterialTable materials;

    RadioEnvironment environment() const;
    LinkScenario link() const;
    /// Copy with every interferer named `name` disabled. Throws
    /// ScenarioError when there is none.
    Scenario with_disabled(std::string_view interferer_name) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses the scenario text format:
///
///   # comment
///   name = apartment
///   channel = 12                 802.15.4 channel, 11..26
///   tx_power_dbm = 0
///   sensitivity_dbm = -92
///
///   [materials]                  optional per-material overrides
///   Brick = 6                    loss in dB
///   PlantFoliage = 15 0.5        loss in dB, near-field distance in m
///
///   [node base]                  also [node remote], [node sensor]
///   position = 0 0
///
///   [obstacle]
///   material = Brick
///   segment = x1 y1 x2 y2        or: disc = cx cy radius
///   loss_db = 5                  optional, defaults to the material table
///   near_field_m = 0             optional, defaults to the material table
///
///   [interferer neighbor-1]
///   standard = wlan              wlan | wpan | oven
///   channel = 1                  oven uses channel 0
///   position = 1.3 9.4
///   tx_power_dbm = 15
///   activity_factor = 0.0016
///   falloff_exponent = 2         optional
///   enabled = true               optional
///
/// Throws ParseError with the line number on malformed input and
/// ScenarioError when the result fails validation.
Scenario parse_scenario(std::string_view text);

/// Writes `s` in the format above; parse_scenario reads it back unchanged.
std::string serialize_scenario(const Scenario& s);

/// Throws ScenarioError unless base and remote are present, the channel is a
/// valid 802.15.4 channel and every interferer is well formed.
void validate(const Scenario& s);

/// Names of the scenarios compiled into the library.
std::vector<std::string> preset_names();
std::optional<std::string_view> preset_text(std::string_view name);

/// Reads a scenario file, or a built-in preset when `path_or_preset` is not
/// an existing file but names one.
Scenario load_scenario(const std::string& path_or_preset);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Interference-model constants as `key = value` lines under
/// `[interference_model]`.
std::string serialize_calibration(const InterferenceModel& model);
InterferenceModel parse_calibration(std::string_view text);

}  // namespace bsn
