#include "bsn/classifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <ostream>
#include <sstream>

#include "bsn/errors.hpp"

namespace bsn {

namespace {

struct AxisSpan {
    double lo = 0.0;
    double hi = 0.0;
};

// Sliding max over a trailing time window, one deque per axis.
class TrailingExtrema {
public:
    explicit TrailingExtrema(double window) : window_(window) {}

    // Returns the largest per-axis peak-to-peak span over (t - window, t].
    double push(std::size_t i, std::span<const AccelSample> s) {
        const double t = s[i].t;
        double span = 0.0;
        for (std::size_t axis = 0; axis < 3; ++axis) {
            auto value = [&](std::size_t k) { return axis == 0 ? s[k].ax : axis == 1 ? s[k].ay : s[k].az; };
            auto& mx = max_[axis];
            auto& mn = min_[axis];
            while (!mx.empty() && value(mx.back()) <= value(i)) mx.pop_back();
            while (!mn.empty() && value(mn.back()) >= value(i)) mn.pop_back();
            mx.push_back(i);
            mn.push_back(i);
            while (s[mx.front()].t <= t - window_) mx.pop_front();
            while (s[mn.front()].t <= t - window_) mn.pop_front();
            span = std::max(span, value(mx.front()) - value(mn.front()));
        }
        return span;
    }

private:
    double window_;
    std::deque<std::size_t> max_[3];
    std::deque<std::size_t> min_[3];
};

double distance_outside(double a, double lo, double hi) { return a < lo ? lo - a : a > hi ? a - hi : 0.0; }

}  // namespace

std::string_view to_string(ActivityClass c) {
    switch (c) {
        case ActivityClass::Rest: return "Rest";
        case ActivityClass::SlowActivity: return "SlowActivity";
        case ActivityClass::FastActivity: return "FastActivity";
    }
    return "Unknown";
}

std::string_view to_string(AbnormalTrigger t) {
    return t == AbnormalTrigger::TotalAccelBound ? "TotalAccelBound" : "PerAxisDelta";
}

void validate(const ClassifierConfig& cfg) {
    if (!(cfg.low_threshold_g > 0.0 && cfg.low_threshold_g < 1.0 && cfg.high_threshold_g > 1.0))
        throw ParameterError("classifier thresholds must satisfy 0 < low < 1 < high");
    if (!(cfg.window_s > 0.0)) throw ParameterError("classifier window must be positive");
    if (!(cfg.axis_delta_threshold_g > 0.0)) throw ParameterError("axis delta threshold must be positive");
}

ActivityClass classify_window(std::span<const AccelSample> window, const ClassifierConfig& cfg) {
    if (window.empty()) throw ParameterError("cannot classify an empty window");
    validate(cfg);

    std::array<AxisSpan, 3> spans;
    std::array<double, 3> sum{}, sum_sq{};
    bool in_rest_band = true;
    bool out_of_band = false;
    for (std::size_t k = 0; k < window.size(); ++k) {
        const AccelSample& s = window[k];
        const double a = total_acceleration(s);
        in_rest_band = in_rest_band && a >= cfg.rest_low_g && a <= cfg.rest_high_g;
        out_of_band = out_of_band || a < cfg.low_threshold_g || a > cfg.high_threshold_g;
        const double v[3] = {s.ax, s.ay, s.az};
        for (std::size_t axis = 0; axis < 3; ++axis) {
            if (k == 0) spans[axis] = {v[axis], v[axis]};
            spans[axis].lo = std::min(spans[axis].lo, v[axis]);
            spans[axis].hi = std::max(spans[axis].hi, v[axis]);
            sum[axis] += v[axis];
            sum_sq[axis] += v[axis] * v[axis];
        }
    }

    const double n = static_cast<double>(window.size());
    bool quiet = true;
    bool wide_span = false;
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const double mean = sum[axis] / n;
        const double variance = std::max(0.0, sum_sq[axis] / n - mean * mean);
        quiet = quiet && variance < cfg.rest_variance_g2;
        wide_span = wide_span || spans[axis].hi - spans[axis].lo > cfg.axis_delta_threshold_g;
    }

    if (out_of_band || wide_span) return ActivityClass::FastActivity;
    if (in_rest_band && quiet) return ActivityClass::Rest;
    return ActivityClass::SlowActivity;
}

std::vector<AbnormalEvent> detect_abnormal(const AccelTrace& trace, const ClassifierConfig& cfg) {
    validate(cfg);
    std::vector<AbnormalEvent> events;
    const auto samples = std::span<const AccelSample>(trace.samples);
    TrailingExtrema extrema(cfg.window_s);

    bool open = false;
    double last_fire = 0.0;
    double best_distance = -1.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double a = total_acceleration(samples[i]);
        const bool bound_fires = a < cfg.low_threshold_g || a > cfg.high_threshold_g;
        const bool delta_fires = extrema.push(i, samples) > cfg.axis_delta_threshold_g;
        if (!bound_fires && !delta_fires) continue;

        const double t = samples[i].t;
        if (!open || t - last_fire > cfg.window_s) {
            events.push_back({t, t, bound_fires ? AbnormalTrigger::TotalAccelBound : AbnormalTrigger::PerAxisDelta, a});
            best_distance = -1.0;
            open = true;
        }
        AbnormalEvent& ev = events.back();
        ev.t_end = t;
        last_fire = t;

        // Prefer the sample farthest outside the band; a delta-only event
        // reports the sample farthest from 1g.
        const double outside = distance_outside(a, cfg.low_threshold_g, cfg.high_threshold_g);
        if (bound_fires) {
            if (ev.trigger != AbnormalTrigger::TotalAccelBound || outside > best_distance) {
                ev.trigger = AbnormalTrigger::TotalAccelBound;
                ev.peak_total_a = a;
                best_distance = outside;
            }
        } else if (ev.trigger == AbnormalTrigger::PerAxisDelta && std::abs(a - 1.0) > std::abs(ev.peak_total_a - 1.0)) {
            ev.peak_total_a = a;
        }
    }
    return events;
}

void write_events_csv(std::ostream& out, std::span<const AbnormalEvent> events) {
    std::ostringstream buf;
    buf.precision(9);
    buf << "t_start,t_end,trigger,peak_total_a\n";
    for (const auto& e : events) {
        buf << e.t_start << ',' << e.t_end << ',' << to_string(e.trigger) << ',' << e.peak_total_a << '\n';
    }
    out << buf.str();
}

}  // namespace bsn
