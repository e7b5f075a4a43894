#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bsn/rf.hpp"

namespace bsn {

/// Expected loss per echo message on each 802.15.4 channel, 11..26.
struct ScanReport {
    std::array<double, kWpanChannelCount> scores{};

    double score(int channel) const;

    friend bool operator==(const ScanReport&, const ScanReport&) = default;
};

/// Endpoints and power of the link being protected.
struct VictimLink {
    Vec2 base;
    Vec2 remote;
    double tx_power_dbm = 0.0;
};

/// Score per channel = 1 - expected round-trip success on that channel.
ScanReport scan(const RadioEnvironment& env, const VictimLink& link, const InterferenceModel& model);

/// Ideal scan plus zero-mean Gaussian noise of `noise_sd`, clamped at 0.
ScanReport noisy_scan(const RadioEnvironment& env, const VictimLink& link, const InterferenceModel& model,
                      double noise_sd, std::uint64_t seed);

/// Channel with the lowest score; ties go to the lowest index.
int select_channel(const ScanReport& report);

/// Environment that holds from `start_s` until the next epoch begins.
struct EnvironmentEpoch {
    double start_s = 0.0;
    RadioEnvironment environment;
};

struct AdaptiveOptions {
    double hysteresis = 0.001;
    std::optional<int> initial_channel;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
};

struct ChannelDecision {
    double t_s = 0.0;
    int channel = kFirstWpanChannel;

    friend bool operator==(const ChannelDecision&, const ChannelDecision&) = default;
};

/// Rescans at t = 0, P, 2P, ... while t < end_s and reports the operating
/// channel after each scan. The first scan picks the best channel unless an
/// initial channel is given. Afterwards the link only moves when the best
/// channel beats the current one by more than the hysteresis. Epochs must be
/// sorted by start time and the first must start at or before 0.
std::vector<ChannelDecision> adaptive_policy(std::span<const EnvironmentEpoch> timeline, double rescan_period_s,
                                             double end_s, const VictimLink& link, const InterferenceModel& model,
                                             const AdaptiveOptions& options = {});

/// Number of channel changes in a decision sequence.
std::size_t count_switches(std::span<const ChannelDecision> decisions);

/// CSV with header `channel,score`.
void write_scan_csv(std::ostream& out, const ScanReport& report);

}  // namespace bsn
