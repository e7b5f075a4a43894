#include "bsn/channel_selector.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "bsn/errors.hpp"

namespace bsn {

namespace {

std::size_t slot(int channel) {
    if (channel < kFirstWpanChannel || channel > kLastWpanChannel)
        throw ParameterError("802.15.4 channel must lie in 11..26, got " + std::to_string(channel));
    return static_cast<std::size_t>(channel - kFirstWpanChannel);
}

ScanReport scan_with_noise(const RadioEnvironment& env, const VictimLink& link, const InterferenceModel& model,
                           double noise_sd, std::mt19937_64* rng) {
    ScanReport report;
    std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
    for (int ch = kFirstWpanChannel; ch <= kLastWpanChannel; ++ch) {
        const ChannelSpec victim = wpan_channel(ch);
        const double p = link_success_prob(env, link.base, link.remote, link.tx_power_dbm, victim, model) *
                         link_success_prob(env, link.remote, link.base, link.tx_power_dbm, victim, model);
        double score = 1.0 - p;
        if (rng != nullptr && noise_sd > 0.0) score = std::max(0.0, score + noise(*rng));
        report.scores[slot(ch)] = score;
    }
    return report;
}

}  // namespace

double ScanReport::score(int channel) const { return scores[slot(channel)]; }

ScanReport scan(const RadioEnvironment& env, const VictimLink& link, const InterferenceModel& model) {
    return scan_with_noise(env, link, model, 0.0, nullptr);
}

ScanReport noisy_scan(const RadioEnvironment& env, const VictimLink& link, const InterferenceModel& model,
                      double noise_sd, std::uint64_t seed) {
    if (!(noise_sd >= 0.0)) throw ParameterError("scan noise must be non-negative");
    std::mt19937_64 rng(seed);
    return scan_with_noise(env, link, model, noise_sd, &rng);
}

int select_channel(const ScanReport& report) {
    for (double s : report.scores) {
        if (!std::isfinite(s) || s < 0.0) throw ParameterError("scan scores must be finite and non-negative");
    }
    const auto best = std::min_element(report.scores.begin(), report.scores.end());
    return kFirstWpanChannel + static_cast<int>(best - report.scores.begin());
}

std::vector<ChannelDecision> adaptive_policy(std::span<const EnvironmentEpoch> timeline, double rescan_period_s,
                                             double end_s, const VictimLink& link, const InterferenceModel& model,
                                             const AdaptiveOptions& options) {
    if (!(rescan_period_s > 0.0)) throw ParameterError("rescan period must be positive");
    if (!(options.hysteresis >= 0.0)) throw ParameterError("hysteresis must be non-negative");
    if (timeline.empty() || timeline.front().start_s > 0.0)
        throw ParameterError("environment timeline must cover t = 0");
    for (std::size_t i = 1; i < timeline.size(); ++i) {
        if (timeline[i].start_s < timeline[i - 1].start_s) throw ParameterError("environment epochs must be sorted");
    }
    if (options.initial_channel) slot(*options.initial_channel);

    std::mt19937_64 rng(options.seed);
    std::vector<ChannelDecision> decisions;
    std::optional<int> current = options.initial_channel;
    std::size_t epoch = 0;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * rescan_period_s;
        if (!(t < end_s)) break;
        while (epoch + 1 < timeline.size() && timeline[epoch + 1].start_s <= t) ++epoch;
        const ScanReport report = scan_with_noise(timeline[epoch].environment, link, model, options.noise_sd, &rng);
        const int best = select_channel(report);
        if (!current || report.score(*current) - report.score(best) > options.hysteresis) current = best;
        decisions.push_back({t, *current});
    }
    return decisions;
}

std::size_t count_switches(std::span<const ChannelDecision> decisions) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < decisions.size(); ++i) n += decisions[i].channel != decisions[i - 1].channel;
    return n;
}

void write_scan_csv(std::ostream& out, const ScanReport& report) {
    std::ostringstream buf;
    buf.precision(9);
    buf << "channel,score\n";
    for (int ch = kFirstWpanChannel; ch <= kLastWpanChannel; ++ch) buf << ch << ',' << report.score(ch) << '\n';
    out << buf.str();
}

}  // namespace bsn
