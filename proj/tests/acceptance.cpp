// Acceptance gate. Each criterion prints one PASS/FAIL line; the exit code is
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bsn/channel_selector.hpp"
#include "bsn/classifier.hpp"
#include "bsn/energy.hpp"
#include "bsn/experiment.hpp"
#include "bsn/link_sim.hpp"
#include "bsn/scenario.hpp"
#include "bsn/sensor_node.hpp"

using namespace bsn;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

InterferenceModel fitted_model() {
    static const InterferenceModel model =
        calibrate(parse_targets(read_file(std::string(BSN_DATA_DIR) + "/tables.csv"))).model;
    return model;
}

EchoTestConfig echo_cfg(int channel, double power) {
    EchoTestConfig cfg;
    cfg.channel = wpan_channel(channel);
    cfg.tx_power_dbm = power;
    return cfg;
}

double measured_pct(const Scenario& s, const InterferenceModel& model, std::uint64_t seed) {
    return 100.0 * run_echo_test(echo_cfg(s.channel, s.tx_power_dbm), s.link(), model, seed).stats.mean_ratio;
}

// --- 1 ---------------------------------------------------------------------
Check energy_arithmetic() {
    Check c;
    const auto parts = wearable_components_no_sleep();
    const DutyProfile full{{kAccelerometer, 1}, {kMicrocontroller, 1}, {kTransceiver, 1}};
    const DutyProfile tenth{{kAccelerometer, 1}, {kMicrocontroller, 1}, {kTransceiver, 0.1}};
    const struct {
        Battery b;
        const DutyProfile* d;
        double want;
    } cases[] = {{li_ion_pack(), &full, 128.7}, {li_ion_pack(), &tenth, 611.1},
                 {lir3048_cell(), &full, 4.48}, {lir3048_cell(), &tenth, 21.3}};
    std::string got;
    for (const auto& k : cases) {
        const double h = battery_life_hours(k.b, parts, *k.d);
        got += fmt("%.2f ", h);
        c.expect(std::abs(h - k.want) <= 0.1, fmt("%.3f h, want %.2f", h, k.want));
    }
    if (c.ok) c.detail = got + "h";
    return c;
}

// --- 2 ---------------------------------------------------------------------
Check channel_geometry() {
    Check c;
    const std::pair<int, double> centers[] = {{12, 2410}, {19, 2445}, {20, 2450}, {21, 2455}, {22, 2460}};
    for (auto [ch, f] : centers)
        c.expect(channel_center_freq(RadioStandard::Wpan154, ch) == f, fmt("channel %.0f center wrong", ch));
    const double overlap = spectral_overlap(wpan_channel(12), wlan_channel(1));
    c.expect(overlap == 2.0, fmt("ch12/wlan1 overlap %.3f MHz", overlap));
    c.expect(wlan_channel(1).center_mhz - wpan_channel(12).center_mhz == 2.0, "ch12 not 2 MHz from wlan ch1");
    if (c.ok) c.detail = "centers exact, ch12 inside wlan ch1 with 2 MHz offset";
    return c;
}

// --- 3 ---------------------------------------------------------------------
Check calibration_fit() {
    Check c;
    const auto targets = parse_targets(read_file(std::string(BSN_DATA_DIR) + "/tables.csv"));
    const auto fit = calibrate(targets);
    const auto rows = reproduce_tables(targets, fit.model, 10, 1000, 1);
    double worst_fit = 0, holdout = 0;
    for (const auto& r : rows) {
        const double err = std::abs(100.0 * r.stats.mean_ratio - r.target.mean_pct);
        const double tol = r.target.holdout ? 1.0 : 0.5;
        double& worst = r.target.holdout ? holdout : worst_fit;
        worst = std::max(worst, err);
        c.expect(err <= tol, r.target.scenario + " ch" + std::to_string(r.target.channel) + fmt(" off by %.2f points", err));
    }
    if (c.ok) c.detail = fmt("worst fitted row %.2f pts, holdout %.2f pts", worst_fit, holdout);
    return c;
}

// --- 4 ---------------------------------------------------------------------
Check attenuation() {
    Check c;
    const auto model = fitted_model();
    auto pct = [&](const char* name) { return measured_pct(load_scenario(name), model, 7); };
    const double siding = pct("attenuation_siding");
    const double brick = pct("attenuation_brick");
    const double glass = pct("attenuation_glass");
    const double stove = pct("attenuation_stove");
    const double behind = pct("attenuation_plant_behind");
    const double offset = pct("attenuation_plant_offset");
    c.expect(siding < 1.0, fmt("siding %.2f%%", siding));
    c.expect(brick > 99.5, fmt("brick %.2f%%", brick));
    c.expect(glass > 99.5, fmt("glass %.2f%%", glass));
    c.expect(stove < 75.0, fmt("stove %.2f%%", stove));
    c.expect(behind < offset && behind < 99.0, fmt("plant behind %.2f%%", behind));
    c.expect(offset > 99.0, fmt("plant offset %.2f%%", offset));
    if (c.ok)
        c.detail = fmt("siding %.1f%%, brick %.1f%%, glass %.1f%%", siding, brick, glass) +
                   fmt(", stove %.1f%%, plant %.1f%% -> %.1f%%", stove, behind, offset);
    return c;
}

// --- 5 ---------------------------------------------------------------------
Check sensor_properties() {
    Check c;
    const double bounds[] = {1.5, 2.0, 4.0, 6.0};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> wide(-7, 7);
    for (int n = 0; n < 10000; ++n) {
        AxisRanges cur{};
        double g[3];
        for (int a = 0; a < 3; ++a) {
            cur[a] = kAllRanges[rng() % 4];
            g[a] = wide(rng);
        }
        const auto next = select_range(g, cur);
        for (int a = 0; a < 3; ++a) {
            const int ci = static_cast<int>(cur[a]);
            int want = std::abs(g[a]) > bounds[ci] ? std::min(ci + 1, 3) : 0;
            if (std::abs(g[a]) <= bounds[ci])
                while (std::abs(g[a]) > bounds[want]) ++want;
            c.expect(static_cast<int>(next[a]) == want, fmt("range selection wrong for %.4f g", g[a]));
        }
        double moved[3] = {wide(rng), g[1], g[2]};
        const auto alt = select_range(moved, cur);
        c.expect(alt[1] == next[1] && alt[2] == next[2], "axes are not independent");

        const int ri = static_cast<int>(rng() % 4);
        const double x = std::uniform_real_distribution<double>(-bounds[ri], bounds[ri])(rng);
        const double half = 3.3 / 65535.0 / 2.0 / sensitivity_v_per_g(kAllRanges[ri]);
        const double err = std::abs(dequantize(quantize(x, kAllRanges[ri])) - x);
        c.expect(err <= half * (1 + 1e-9), fmt("round trip of %.6f g off by %.3g", x, err));
    }

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        // Rest: asleep throughout, at most one sample per wake period.
        const auto rest = generate_trace(ActivityKind::Rest, 120, 60, seed);
        const auto run = run_node(initial_state({}), rest);
        c.expect(run.wake_transitions == 0, "rest trace woke the node");
        c.expect(run.samples_taken <= 121, fmt("rest trace took %.0f samples", static_cast<double>(run.samples_taken)));

        // Activity then rest: back to sleep 300 s after the last movement.
        const ScheduleSegment segs[] = {{ActivityKind::Run, 5}, {ActivityKind::Rest, 310}};
        const auto trace = compose_schedule(segs, 60, seed);
        double last_motion = -1;
        for (const auto& s : trace.samples)
            if (motion_level(s.ax, s.ay, s.az) > 0.3) last_motion = s.t;
        const auto busy = run_node(initial_state({}), trace);
        double slept = -1;
        for (std::size_t i = 1; i < busy.timeline.size(); ++i)
            if (busy.timeline[i].mode == SensorMode::Sleep && busy.timeline[i - 1].mode == SensorMode::Active)
                slept = busy.timeline[i].start_s;
        c.expect(slept > 0 && std::abs(slept - last_motion - 300.0) <= 0.05,
                 fmt("slept %.3f s after last movement", slept - last_motion));

        // Fall: awake within one wake period of the spike.
        const ScheduleSegment fall[] = {{ActivityKind::Rest, 5}, {ActivityKind::Fall, 4}};
        const auto ft = compose_schedule(fall, 60, seed);
        double spike = -1;
        for (const auto& s : ft.samples)
            if (spike < 0 && total_acceleration(s) > 2.5) spike = s.t;
        SensorState st = initial_state({});
        double woke = -1;
        for (const auto& s : ft.samples) {
            const auto r = step(st, s, 1.0 / 60);
            if (woke < 0 && st.mode == SensorMode::Sleep && r.state.mode == SensorMode::Active) woke = r.state.clock_s;
            st = r.state;
        }
        c.expect(spike >= 0 && woke >= 0 && woke <= spike + 1.0 + 1e-9, fmt("woke %.3f s after spike", woke - spike));
    }
    if (c.ok) c.detail = "10000 range/quantize cases, 50 seeds of sleep, timeout and wake checks";
    return c;
}

// --- 6 ---------------------------------------------------------------------
Check classifier_contract() {
    Check c;
    std::size_t quiet_events = 0, incidents = 0, caught = 0;
    for (auto kind : {ActivityKind::Rest, ActivityKind::SitStand, ActivityKind::LeftRightRotation,
                      ActivityKind::SlowWalk}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed)
            quiet_events += detect_abnormal(generate_trace(kind, 30, 60, seed)).size();
    }
    c.expect(quiet_events == 0, fmt("%.0f false events", static_cast<double>(quiet_events)));

    for (auto kind : {ActivityKind::Fall, ActivityKind::Jump}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const ScheduleSegment segs[] = {{ActivityKind::Rest, 3}, {kind, 2}, {ActivityKind::SlowWalk, 3},
                                            {kind, 2}, {ActivityKind::Rest, 3}};
            const auto t = compose_schedule(segs, 60, seed * 7 + 1);
            const auto events = detect_abnormal(t);
            for (std::size_t i = 0; i < t.samples.size();) {
                if (t.activity_labels[i] != kind) {
                    ++i;
                    continue;
                }
                std::size_t j = i;
                while (j < t.samples.size() && t.activity_labels[j] == kind) ++j;
                const double lo = t.samples[i].t, hi = t.samples[j - 1].t;
                ++incidents;
                const bool hit = std::any_of(events.begin(), events.end(),
                                             [&](const AbnormalEvent& e) { return e.t_start <= hi && e.t_end >= lo; });
                caught += hit;
                i = j;
            }
        }
    }
    c.expect(caught == incidents, fmt("recall %.0f/%.0f", caught, incidents));
    if (c.ok) c.detail = fmt("0 false events in 400 quiet traces, %.0f/%.0f incidents caught", caught, incidents);
    return c;
}

// --- 7 ---------------------------------------------------------------------
Check channel_selector() {
    Check c;
    const auto model = fitted_model();
    const auto apt = load_scenario("apartment");
    const VictimLink link{*apt.base, *apt.remote, apt.tx_power_dbm};
    const int chosen = select_channel(scan(apt.environment(), link, model));
    std::vector<double> measured;
    for (int ch = kFirstWpanChannel; ch <= kLastWpanChannel; ++ch)
        measured.push_back(
            run_echo_test(echo_cfg(ch, apt.tx_power_dbm), apt.link(), model, 100 + ch).stats.mean_ratio);
    const double best_other = *std::max_element(measured.begin(), measured.end());
    c.expect(measured[chosen - kFirstWpanChannel] >= best_other, fmt("channel %.0f is not the best measured", chosen));

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1), scale(1e-3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        ScanReport r;
        for (auto& v : r.scores) v = u(rng);
        ScanReport s = r;
        const double k = scale(rng);
        for (auto& v : s.scores) v *= k;
        c.expect(select_channel(r) == select_channel(s), "argmin changed under scaling");
    }

    const EnvironmentEpoch still{0.0, apt.environment()};
    std::size_t worst = 0;
    for (int start = kFirstWpanChannel; start <= kLastWpanChannel; ++start) {
        AdaptiveOptions opts;
        opts.initial_channel = start;
        const auto d = adaptive_policy(std::span(&still, 1), 10, 3600, link, model, opts);
        // A move away from the starting channel at the first scan counts too.
        worst = std::max(worst, count_switches(d) + (d.front().channel != start));
    }
    c.expect(worst <= 1, fmt("static environment switched %.0f times", static_cast<double>(worst)));
    if (c.ok) c.detail = fmt("chose ch%.0f at %.2f%%, static runs switch at most %.0f time(s)", chosen,
                             100 * measured[chosen - kFirstWpanChannel], static_cast<double>(worst));
    return c;
}

// --- 8 ---------------------------------------------------------------------
Check soundness() {
    Check c;
    std::string got;
    for (double p : {0.9, 0.99, 1.0}) {
        const auto r = run_echo_test({}, EchoLink{p, p}, 31);
        const double want = p * p;
        const double sigma = std::sqrt(want * (1 - want) / 10000.0);
        c.expect(std::abs(r.stats.mean_ratio - want) <= 3 * sigma + 1e-12,
                 fmt("p=%.2f gave %.4f, want %.4f", p, r.stats.mean_ratio, want));
        got += fmt("%.4f ", r.stats.mean_ratio);
    }

    const auto house = load_scenario("single_house");
    ExperimentParams params;
    params.duration_s = 30;
    const auto a = run_experiment(ExperimentKind::Star, house, params);
    const auto b = run_experiment(ExperimentKind::Star, house, params);
    c.expect(a.files == b.files && a.summary_json == b.summary_json, "star runs differ for one seed");
    const auto e1 = run_echo_test({}, house.link(), {}, 5);
    const auto e2 = run_echo_test({}, house.link(), {}, 5);
    c.expect(e1 == e2, "echo runs differ for one seed");

    std::istringstream log(a.files.at("frames.bslog"));
    const auto replay = replay_frame_log(log);
    c.expect(replay.crc_errors == 0 && !replay.frames.empty(), "frame log did not replay cleanly");
    if (c.ok) c.detail = "echo ratios " + got + fmt("| %.0f frames replayed, 0 CRC errors", replay.frames.size());
    return c;
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Check()> run;
    };
    const Criterion criteria[] = {
        {"energy arithmetic", 1, energy_arithmetic},
        {"channel geometry", 1, channel_geometry},
        {"calibration fit", 30, calibration_fit},
        {"attenuation outcomes", 10, attenuation},
        {"sensor state machine", 30, sensor_properties},
        {"classifier contract", 60, classifier_contract},
        {"channel selector", 60, channel_selector},
        {"simulation soundness", 30, soundness},
    };
    int failed = 0;
    int index = 1;
    for (const auto& cr : criteria) {
        const auto t0 = clock::now();
        Check c;
        try {
            c = cr.run();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        if (secs > cr.budget_s) {
            c.ok = false;
            c.detail += fmt(" (over the %.0f s budget)", cr.budget_s);
        }
        std::printf("%s [%d] %s: %s (%.2f s)\n", c.ok ? "PASS" : "FAIL", index++, cr.name, c.detail.c_str(), secs);
        failed += !c.ok;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
