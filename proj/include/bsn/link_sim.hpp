#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bsn/frame.hpp"
#include "bsn/rf.hpp"
#include "bsn/sensor_node.hpp"

namespace bsn {

struct EchoTestConfig {
    std::size_t n_messages = 1000;
    std::size_t message_len_chars = 32;
    double timeout_ms = 100.0;
    std::size_t runs = 10;
    ChannelSpec channel = wpan_channel(11);
    double tx_power_dbm = 0.0;
};

/// Throws ParameterError unless messages, runs and timeout are positive.
void validate(const EchoTestConfig& cfg);

struct RunStats {
    std::vector<std::size_t> per_run_success;
    std::size_t n_messages = 0;
    double mean_ratio = 0.0;
    /// Sample standard deviation of the per-run ratios (0 for a single run).
    double std_ratio = 0.0;

    friend bool operator==(const RunStats&, const RunStats&) = default;
};

RunStats summarize_runs(std::span<const std::size_t> successes, std::size_t n_messages);

/// Base and remote nodes placed in a radio environment.
struct LinkScenario {
    RadioEnvironment environment;
    std::optional<Vec2> base;
    std::optional<Vec2> remote;
};

/// Per-message success probabilities of the two legs of an echo.
struct EchoLink {
    double p_out = 1.0;
    double p_in = 1.0;
};

/// Throws ScenarioError when either node is missing.
EchoLink echo_link(const EchoTestConfig& cfg, const LinkScenario& scenario, const InterferenceModel& model);

struct EchoResult {
    RunStats stats;
    /// Simulated wall-clock time of each run in seconds.
    std::vector<double> run_elapsed_s;
    /// Per-message outcome (1 = echo received), runs concatenated.
    std::vector<std::uint8_t> outcomes;

    friend bool operator==(const EchoResult&, const EchoResult&) = default;
};

/// Base sends `n_messages` messages; the remote loops each one back. A
/// message counts only if both legs get through. A completed round trip costs
/// two airtimes, a loss costs the timeout. Run r draws from its own stream
/// seeded with (seed, r).
EchoResult run_echo_test(const EchoTestConfig& cfg, const EchoLink& link, std::uint64_t seed);
EchoResult run_echo_test(const EchoTestConfig& cfg, const LinkScenario& scenario, const InterferenceModel& model,
                         std::uint64_t seed);

/// Expected round-trip success ratio, p_out * p_in.
double expected_echo_ratio(const EchoTestConfig& cfg, const LinkScenario& scenario, const InterferenceModel& model);

// ---------------------------------------------------------------------------
// Star network
// ---------------------------------------------------------------------------

struct StarNode {
    SensorConfig config;
    Vec2 position;
    AccelTrace trace;
};

struct StarConfig {
    ChannelSpec channel = wpan_channel(11);
    double tx_power_dbm = 0.0;
    Vec2 logger;
    /// Two transmissions starting closer than this cannot hear each other.
    double cca_window_s = 320e-6;
    /// Backoff slot used after finding the channel busy.
    double backoff_slot_s = 320e-6;
    int max_backoff_slots = 8;
};

struct LoggedFrame {
    double arrival_s = 0.0;
    SensorFrame frame;

    friend bool operator==(const LoggedFrame&, const LoggedFrame&) = default;
};

struct NodeDelivery {
    std::uint8_t node_id = 0;
    std::size_t emitted = 0;
    std::size_t delivered = 0;
    std::size_t collided = 0;
    std::size_t lost_on_channel = 0;
    RunStats stats;

    friend bool operator==(const NodeDelivery&, const NodeDelivery&) = default;
};

struct StarResult {
    std::vector<NodeDelivery> nodes;
    std::vector<LoggedFrame> log;
    std::vector<NodeRun> runs;
};

/// Each node replays its trace through the sensor state machine; node i's
/// clock is offset by i / (N * sample_rate). Frames contend for the channel
/// with carrier sense: a sender finding the channel busy backs off, and two
/// senders starting within the CCA window collide and both frames are lost.
/// Frames that survive contention are delivered with the node's one-way
/// success probability. Node ids must be distinct.
StarResult run_star_network(std::span<const StarNode> nodes, const StarConfig& cfg, const RadioEnvironment& env,
                            const InterferenceModel& model, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Frame log
// ---------------------------------------------------------------------------

inline constexpr std::array<char, 8> kFrameLogMagic{'B', 'S', 'L', 'O', 'G', '1', '\0', '\0'};

void write_frame_log(std::ostream& out, std::span<const SensorFrame> frames);

struct LogReplay {
    std::vector<SensorFrame> frames;
    std::size_t crc_errors = 0;
};

/// Decodes every record. Throws FrameError on a bad header or a truncated
/// record; CRC failures are counted and the record skipped.
LogReplay replay_frame_log(std::istream& in);

/// CSV with header
/// `node_id,seq,timestamp_ms,x_code,y_code,z_code,x_range,y_range,z_range`.
void write_frames_csv(std::ostream& out, std::span<const SensorFrame> frames);

}  // namespace bsn
