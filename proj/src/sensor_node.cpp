#include "bsn/sensor_node.hpp"

#include <algorithm>
#include <cmath>

#include "bsn/errors.hpp"

namespace bsn {

namespace {

// Tolerance for accumulated floating-point clocks crossing a period boundary.
constexpr double kClockEps = 1e-9;

AdcReading sample_axes(const AccelSample& a, const AxisRanges& ranges) {
    return AdcReading{{quantize(a.ax, ranges[0]), quantize(a.ay, ranges[1]), quantize(a.az, ranges[2])}};
}

SensorFrame make_frame(const SensorState& s, const AdcReading& r) {
    SensorFrame f;
    f.node_id = s.config.node_id;
    f.seq = s.next_seq;
    f.timestamp_ms = static_cast<std::uint32_t>(std::llround(s.clock_s * 1000.0));
    for (std::size_t axis = 0; axis < 3; ++axis) {
        f.codes[axis] = r.axes[axis].code;
        f.range_codes[axis] = static_cast<std::uint8_t>(r.axes[axis].range);
    }
    return f;
}

double reading_level(const AdcReading& r) {
    return motion_level(dequantize(r.axes[0]), dequantize(r.axes[1]), dequantize(r.axes[2]));
}

// Time left over after a period boundary fired; a long dt fires only once.
double carry_over(double accumulated, double period) {
    return std::fmod(std::max(0.0, accumulated - period), period);
}

MeasurementRange minimal_cover(double magnitude) {
    for (MeasurementRange r : kAllRanges) {
        if (magnitude <= range_g(r)) return r;
    }
    return MeasurementRange::G6;
}

}  // namespace

double range_g(MeasurementRange r) {
    switch (r) {
        case MeasurementRange::G1_5: return 1.5;
        case MeasurementRange::G2: return 2.0;
        case MeasurementRange::G4: return 4.0;
        case MeasurementRange::G6: return 6.0;
    }
    return 6.0;
}

double sensitivity_v_per_g(MeasurementRange r) {
    switch (r) {
        case MeasurementRange::G1_5: return 0.8;
        case MeasurementRange::G2: return 0.6;
        case MeasurementRange::G4: return 0.3;
        case MeasurementRange::G6: return 0.2;
    }
    return 0.2;
}

MeasurementRange range_from_code(std::uint8_t code) {
    if (code > 3) throw ParameterError("range code out of [0, 3]");
    return static_cast<MeasurementRange>(code);
}

MeasurementRange next_higher(MeasurementRange r) {
    return r == MeasurementRange::G6 ? r : static_cast<MeasurementRange>(static_cast<std::uint8_t>(r) + 1);
}

double half_lsb_g(MeasurementRange r) { return (kAdcVref / kAdcFullScale) / 2.0 / sensitivity_v_per_g(r); }

AxisReading quantize(double accel_g, MeasurementRange range) {
    if (!std::isfinite(accel_g)) throw ParameterError("acceleration must be finite");
    const double v = std::clamp(kAdcVref / 2.0 + accel_g * sensitivity_v_per_g(range), 0.0, kAdcVref);
    AxisReading out;
    out.code = static_cast<std::uint16_t>(std::lround(v / kAdcVref * kAdcFullScale));
    out.range = range;
    out.clipped = std::abs(accel_g) > range_g(range);
    return out;
}

double dequantize(const AxisReading& reading) {
    const double v = static_cast<double>(reading.code) / kAdcFullScale * kAdcVref;
    const double g = (v - kAdcVref / 2.0) / sensitivity_v_per_g(reading.range);
    if (reading.clipped) return std::copysign(range_g(reading.range), g);
    return g;
}

AxisRanges select_range(std::span<const double, 3> reading_g, const AxisRanges& current) {
    AxisRanges next{};
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const double magnitude = std::abs(reading_g[axis]);
        next[axis] = magnitude > range_g(current[axis]) ? next_higher(current[axis]) : minimal_cover(magnitude);
    }
    return next;
}

AxisRanges select_range(const AdcReading& reading) {
    AxisRanges next{};
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const AxisReading& a = reading.axes[axis];
        next[axis] = a.clipped ? next_higher(a.range) : minimal_cover(std::abs(dequantize(a)));
    }
    return next;
}

double motion_level(double ax, double ay, double az) {
    return std::max({std::abs(ax), std::abs(ay), std::abs(az - 1.0)});
}

SensorState initial_state(const SensorConfig& config) {
    if (!(config.wake_period_s > 0.0)) throw ParameterError("wake period must be positive");
    if (!(config.sample_rate_hz >= kMinSampleRateHz && config.sample_rate_hz <= kMaxSampleRateHz))
        throw ParameterError("sensor sample rate must lie in [10, 100] Hz");
    if (!(config.inactivity_window_s > 0.0)) throw ParameterError("inactivity window must be positive");
    SensorState s;
    s.config = config;
    return s;
}

StepResult step(const SensorState& state, const AccelSample& true_accel, double dt) {
    if (!(dt > 0.0)) throw ParameterError("step dt must be positive");

    StepResult out{state, std::nullopt};
    SensorState& s = out.state;
    const SensorConfig& cfg = s.config;
    s.clock_s += dt;

    if (s.mode == SensorMode::Sleep) {
        s.since_wake_s += dt;
        if (s.since_wake_s + kClockEps < cfg.wake_period_s) return out;
        s.since_wake_s = carry_over(s.since_wake_s, cfg.wake_period_s);

        const AdcReading reading = sample_axes(true_accel, s.ranges);
        out.frame = make_frame(s, reading);
        ++s.next_seq;
        if (reading_level(reading) > cfg.activation_threshold_g) {
            s.mode = SensorMode::Active;
            s.ranges = select_range(reading);
            s.low_activity_timer_s = 0.0;
            s.since_sample_s = 0.0;
        }
        return out;
    }

    const double period = 1.0 / cfg.sample_rate_hz;
    s.since_sample_s += dt;
    if (s.since_sample_s + kClockEps < period) return out;
    s.since_sample_s = carry_over(s.since_sample_s, period);

    const AdcReading reading = sample_axes(true_accel, s.ranges);
    out.frame = make_frame(s, reading);
    ++s.next_seq;
    s.ranges = select_range(reading);

    if (reading_level(reading) < cfg.activation_threshold_g) {
        s.low_activity_timer_s = std::min(s.low_activity_timer_s + period, cfg.inactivity_window_s);
    } else {
        s.low_activity_timer_s = 0.0;
    }
    if (s.low_activity_timer_s + kClockEps >= cfg.inactivity_window_s) {
        s.mode = SensorMode::Sleep;
        s.ranges = {MeasurementRange::G1_5, MeasurementRange::G1_5, MeasurementRange::G1_5};
        s.low_activity_timer_s = 0.0;
        s.since_wake_s = 0.0;
    }
    return out;
}

NodeRun run_node(const SensorState& start, const AccelTrace& trace) {
    NodeRun run;
    const double dt = 1.0 / trace.rate_hz;
    SensorState state = start;
    for (const AccelSample& sample : trace.samples) {
        const SensorMode before = state.mode;
        StepResult r = step(state, sample, dt);

        if (run.timeline.empty() || run.timeline.back().mode != before) {
            run.timeline.push_back({before, state.clock_s, 0.0, 0});
        }
        run.timeline.back().duration_s += dt;
        if (r.frame) {
            run.frames.push_back(*r.frame);
            run.frame_times_s.push_back(r.state.clock_s);
            ++run.timeline.back().frames;
            ++run.samples_taken;
        }
        if (before == SensorMode::Sleep && r.state.mode == SensorMode::Active) ++run.wake_transitions;
        if (before == SensorMode::Active && r.state.mode == SensorMode::Sleep) ++run.sleep_transitions;
        state = r.state;
    }
    return run;
}

}  // namespace bsn
