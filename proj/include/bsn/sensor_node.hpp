#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bsn/frame.hpp"
#include "bsn/motion.hpp"

namespace bsn {

/// Selectable accelerometer full-scale range. The underlying value is the
/// 2-bit code carried in frames.
enum class MeasurementRange : std::uint8_t { G1_5 = 0, G2 = 1, G4 = 2, G6 = 3 };

inline constexpr std::array<MeasurementRange, 4> kAllRanges{MeasurementRange::G1_5, MeasurementRange::G2,
                                                            MeasurementRange::G4, MeasurementRange::G6};

double range_g(MeasurementRange r);
double sensitivity_v_per_g(MeasurementRange r);
MeasurementRange range_from_code(std::uint8_t code);

/// One step up, saturating at +-6g.
MeasurementRange next_higher(MeasurementRange r);

using AxisRanges = std::array<MeasurementRange, 3>;

/// Ratiometric ADC front end: zero g sits at vref/2, full code is 65535.
inline constexpr double kAdcVref = 3.3;
inline constexpr std::uint16_t kAdcFullScale = 65535;

struct AxisReading {
    std::uint16_t code = 0;
    MeasurementRange range = MeasurementRange::G1_5;
    bool clipped = false;

    friend bool operator==(const AxisReading&, const AxisReading&) = default;
};

struct AdcReading {
    std::array<AxisReading, 3> axes{};

    friend bool operator==(const AdcReading&, const AdcReading&) = default;
};

/// Half of one code step expressed in g for `r`.
double half_lsb_g(MeasurementRange r);

AxisReading quantize(double accel_g, MeasurementRange range);
double dequantize(const AxisReading& reading);

/// Chooses the next range for each axis independently. An axis whose reading
/// exceeds its current range steps up one level; otherwise it moves to the
/// smallest range whose bound covers the reading.
AxisRanges select_range(std::span<const double, 3> reading_g, const AxisRanges& current);

/// Same rule, with clipped axes treated as exceeding their range.
AxisRanges select_range(const AdcReading& reading);

enum class SensorMode : std::uint8_t { Sleep, Active };

struct SensorConfig {
    std::uint8_t node_id = 1;
    double wake_period_s = 1.0;
    double sample_rate_hz = 60.0;
    double activation_threshold_g = 0.3;
    double inactivity_window_s = 300.0;
};

struct SensorState {
    SensorConfig config;
    SensorMode mode = SensorMode::Sleep;
    AxisRanges ranges{MeasurementRange::G1_5, MeasurementRange::G1_5, MeasurementRange::G1_5};
    double low_activity_timer_s = 0.0;
    double clock_s = 0.0;
    double since_wake_s = 0.0;
    double since_sample_s = 0.0;
    std::uint16_t next_seq = 0;

    friend bool operator==(const SensorState&, const SensorState&) = default;
};

SensorState initial_state(const SensorConfig& config);

struct StepResult {
    SensorState state;
    std::optional<SensorFrame> frame;
};

/// Advances the accelerometer workflow by `dt` seconds given the true
/// acceleration over that interval. Sleep takes one +-1.5g sample per wake
/// period and wakes up when any gravity-compensated axis exceeds the
/// activation threshold. Active samples at the configured rate, adapts
/// ranges after each sample and returns to Sleep after a full inactivity
/// window of low readings.
StepResult step(const SensorState& state, const AccelSample& true_accel, double dt);

/// Largest of |ax|, |ay|, |az - 1|.
double motion_level(double ax, double ay, double az);

struct ModeInterval {
    SensorMode mode;
    double start_s;
    double duration_s;
    std::size_t frames;
};

/// Everything a node produced while replaying a trace.
struct NodeRun {
    std::vector<SensorFrame> frames;
    std::vector<double> frame_times_s;
    std::vector<ModeInterval> timeline;
    std::size_t wake_transitions = 0;
    std::size_t sleep_transitions = 0;
    std::size_t samples_taken = 0;
};

/// Feeds every sample of `trace` through `step`, starting from `start`.
NodeRun run_node(const SensorState& start, const AccelTrace& trace);

}  // namespace bsn
