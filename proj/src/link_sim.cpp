#include "bsn/link_sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "bsn/energy.hpp"
#include "bsn/errors.hpp"

namespace bsn {

namespace {

// Uniform in [0, 1) from the top 53 bits, so results do not depend on the
// standard library's distribution implementation.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

struct Attempt {
    double t;
    std::size_t node;
    std::size_t k;

    bool operator>(const Attempt& o) const {
        if (t != o.t) return t > o.t;
        if (node != o.node) return node > o.node;
        return k > o.k;
    }
};

struct Transmission {
    std::size_t node;
    std::size_t k;
    double start;
    double end;
    double draw;
    bool collided = false;
};

}  // namespace

void validate(const EchoTestConfig& cfg) {
    if (cfg.n_messages == 0) throw ParameterError("echo test needs at least one message");
    if (cfg.runs == 0) throw ParameterError("echo test needs at least one run");
    if (!(cfg.timeout_ms > 0.0)) throw ParameterError("echo timeout must be positive");
}

RunStats summarize_runs(std::span<const std::size_t> successes, std::size_t n_messages) {
    RunStats s;
    s.per_run_success.assign(successes.begin(), successes.end());
    s.n_messages = n_messages;
    if (successes.empty() || n_messages == 0) return s;
    const double n = static_cast<double>(n_messages);
    double sum = 0.0;
    for (std::size_t c : successes) sum += static_cast<double>(c) / n;
    s.mean_ratio = sum / static_cast<double>(successes.size());
    if (successes.size() > 1) {
        double ss = 0.0;
        for (std::size_t c : successes) {
            const double d = static_cast<double>(c) / n - s.mean_ratio;
            ss += d * d;
        }
        s.std_ratio = std::sqrt(ss / static_cast<double>(successes.size() - 1));
    }
    return s;
}

EchoLink echo_link(const EchoTestConfig& cfg, const LinkScenario& scenario, const InterferenceModel& model) {
    if (!scenario.base || !scenario.remote) throw ScenarioError("echo test needs both a base and a remote node");
    const auto& env = scenario.environment;
    return {link_success_prob(env, *scenario.base, *scenario.remote, cfg.tx_power_dbm, cfg.channel, model),
            link_success_prob(env, *scenario.remote, *scenario.base, cfg.tx_power_dbm, cfg.channel, model)};
}

EchoResult run_echo_test(const EchoTestConfig& cfg, const EchoLink& link, std::uint64_t seed) {
    validate(cfg);
    if (!(link.p_out >= 0.0 && link.p_out <= 1.0 && link.p_in >= 0.0 && link.p_in <= 1.0))
        throw ParameterError("echo probabilities must lie in [0, 1]");

    const double airtime = frame_airtime_s(cfg.message_len_chars);
    const double timeout = cfg.timeout_ms / 1000.0;
    EchoResult result;
    result.outcomes.reserve(cfg.n_messages * cfg.runs);
    std::vector<std::size_t> counts;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
        auto rng = stream(seed, r);
        std::size_t ok = 0;
        double clock = 0.0;
        for (std::size_t m = 0; m < cfg.n_messages; ++m) {
            // Both legs are always drawn so the stream position does not
            // depend on earlier outcomes.
            const bool out_ok = unit(rng) < link.p_out;
            const bool in_ok = unit(rng) < link.p_in;
            const bool success = out_ok && in_ok;
            ok += success;
            clock += success ? 2.0 * airtime : timeout;
            result.outcomes.push_back(success ? 1 : 0);
        }
        counts.push_back(ok);
        result.run_elapsed_s.push_back(clock);
    }
    result.stats = summarize_runs(counts, cfg.n_messages);
    return result;
}

EchoResult run_echo_test(const EchoTestConfig& cfg, const LinkScenario& scenario, const InterferenceModel& model,
                         std::uint64_t seed) {
    return run_echo_test(cfg, echo_link(cfg, scenario, model), seed);
}

double expected_echo_ratio(const EchoTestConfig& cfg, const LinkScenario& scenario, const InterferenceModel& model) {
    const EchoLink link = echo_link(cfg, scenario, model);
    return link.p_out * link.p_in;
}

StarResult run_star_network(std::span<const StarNode> nodes, const StarConfig& cfg, const RadioEnvironment& env,
                            const InterferenceModel& model, std::uint64_t seed) {
    if (nodes.empty()) throw ParameterError("star network needs at least one sensor node");
    if (!(cfg.cca_window_s >= 0.0) || !(cfg.backoff_slot_s > 0.0) || cfg.max_backoff_slots < 1)
        throw ParameterError("invalid contention parameters");
    std::set<std::uint8_t> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.config.node_id).second) throw ParameterError("duplicate sensor node id");
    }

    const std::size_t count = nodes.size();
    const double airtime = frame_airtime_s(kFrameSize);
    StarResult result;
    std::vector<double> offsets(count);
    std::vector<double> p_link(count);
    std::priority_queue<Attempt, std::vector<Attempt>, std::greater<>> pending;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& node = nodes[i];
        result.runs.push_back(run_node(initial_state(node.config), node.trace));
        offsets[i] = static_cast<double>(i) / (static_cast<double>(count) * node.config.sample_rate_hz);
        p_link[i] = link_success_prob(env, node.position, cfg.logger, cfg.tx_power_dbm, cfg.channel, model);
        const auto& times = result.runs.back().frame_times_s;
        if (!times.empty()) pending.push({times[0] + offsets[i], i, 0});
    }

    auto rng = stream(seed, 0x57a2);
    std::vector<Transmission> sent;
    double last_start = -1e300;
    double last_end = -1e300;
    std::size_t last_index = 0;
    while (!pending.empty()) {
        Attempt a = pending.top();
        pending.pop();
        if (a.t < last_end && a.t >= last_start + cfg.cca_window_s) {
            // Channel sensed busy.
            const int slots = static_cast<int>(unit(rng) * cfg.max_backoff_slots);
            pending.push({last_end + slots * cfg.backoff_slot_s, a.node, a.k});
            continue;
        }
        Transmission tx{a.node, a.k, a.t, a.t + airtime, unit(rng)};
        if (a.t < last_start + cfg.cca_window_s && !sent.empty()) {
            tx.collided = true;
            sent[last_index].collided = true;
            last_end = std::max(last_end, tx.end);
        } else {
            last_start = tx.start;
            last_end = tx.end;
            last_index = sent.size();
        }
        sent.push_back(tx);

        // A node queues its next frame behind the one on air.
        const auto& times = result.runs[a.node].frame_times_s;
        if (a.k + 1 < times.size()) pending.push({std::max(times[a.k + 1] + offsets[a.node], tx.end), a.node, a.k + 1});
    }

    result.nodes.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        result.nodes[i].node_id = nodes[i].config.node_id;
        result.nodes[i].emitted = result.runs[i].frames.size();
    }
    for (const auto& tx : sent) {
        auto& d = result.nodes[tx.node];
        if (tx.collided) {
            ++d.collided;
        } else if (tx.draw < p_link[tx.node]) {
            ++d.delivered;
            result.log.push_back({tx.end, result.runs[tx.node].frames[tx.k]});
        } else {
            ++d.lost_on_channel;
        }
    }
    std::stable_sort(result.log.begin(), result.log.end(),
                     [](const LoggedFrame& a, const LoggedFrame& b) { return a.arrival_s < b.arrival_s; });
    for (auto& d : result.nodes) {
        const std::size_t delivered[] = {d.delivered};
        d.stats = summarize_runs(delivered, d.emitted);
    }
    return result;
}

void write_frame_log(std::ostream& out, std::span<const SensorFrame> frames) {
    out.write(kFrameLogMagic.data(), static_cast<std::streamsize>(kFrameLogMagic.size()));
    for (const auto& f : frames) {
        const FrameBytes bytes = encode_frame(f);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
}

LogReplay replay_frame_log(std::istream& in) {
    std::array<char, kFrameLogMagic.size()> header{};
    in.read(header.data(), static_cast<std::streamsize>(header.size()));
    if (in.gcount() != static_cast<std::streamsize>(header.size()) || header != kFrameLogMagic)
        throw FrameError("not a frame log: bad header");

    LogReplay replay;
    FrameBytes bytes{};
    for (std::size_t record = 0;; ++record) {
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        const auto got = in.gcount();
        if (got == 0) break;
        if (got != static_cast<std::streamsize>(bytes.size()))
            throw FrameError("frame log truncated in record " + std::to_string(record));
        try {
            replay.frames.push_back(decode_frame(bytes));
        } catch (const FrameError&) {
            ++replay.crc_errors;
        }
    }
    return replay;
}

void write_frames_csv(std::ostream& out, std::span<const SensorFrame> frames) {
    std::ostringstream buf;
    buf << "node_id,seq,timestamp_ms,x_code,y_code,z_code,x_range,y_range,z_range\n";
    for (const auto& f : frames) {
        buf << int{f.node_id} << ',' << f.seq << ',' << f.timestamp_ms;
        for (auto c : f.codes) buf << ',' << c;
        for (auto r : f.range_codes) buf << ',' << int{r};
        buf << '\n';
    }
    out << buf.str();
}

}  // namespace bsn
