#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bsn {

/// Ground-truth activity of a generated trace segment.
enum class ActivityKind { Rest, SitStand, LeftRightRotation, SlowWalk, Run, Jump, Fall };

inline constexpr ActivityKind kAllActivities[] = {
    ActivityKind::Rest, ActivityKind::SitStand, ActivityKind::LeftRightRotation,
    ActivityKind::SlowWalk, ActivityKind::Run, ActivityKind::Jump, ActivityKind::Fall};

std::string_view to_string(ActivityKind kind);
ActivityKind activity_from_string(std::string_view name);

/// True for the slow-mode activities whose total acceleration stays in [0.9g, 1.3g].
bool is_slow_mode(ActivityKind kind);

/// One triaxial reading in g. x is frontal, y is side, z is vertical.
struct AccelSample {
    double t = 0.0;
    double ax = 0.0;
    double ay = 0.0;
    double az = 0.0;

    friend bool operator==(const AccelSample&, const AccelSample&) = default;
};

/// Magnitude of the acceleration vector, sqrt(ax^2 + ay^2 + az^2).
double total_acceleration(const AccelSample& s);

struct AccelTrace {
    double rate_hz = 60.0;
    std::vector<AccelSample> samples;
    std::vector<ActivityKind> activity_labels;

    double duration() const { return static_cast<double>(samples.size()) / rate_hz; }

    friend bool operator==(const AccelTrace&, const AccelTrace&) = default;
};

inline constexpr double kDefaultSampleRateHz = 60.0;
inline constexpr double kMinSampleRateHz = 10.0;
inline constexpr double kMaxSampleRateHz = 100.0;

/// Synthesizes `duration` seconds of `kind` at `rate_hz` (10..100 Hz).
///
/// The trace is a sum of band-limited periodic components plus seeded
/// Gaussian noise. Amplitudes are capped per kind so that every trace meets
/// the activity's envelope:
///   - Rest: total acceleration within [0.95g, 1.05g].
///   - SitStand, LeftRightRotation, SlowWalk: total within [0.9g, 1.3g].
///   - Run: strong vertical oscillation that leaves [0.9g, 1.3g] each stride.
///   - Jump, Fall: a sub-0.9g phase and an impact above 2.5g, so the vertical
///     peak-to-peak span exceeds 2g. Needs at least two samples.
/// Identical arguments always produce a bit-identical trace.
AccelTrace generate_trace(ActivityKind kind, double duration, double rate_hz, std::uint64_t seed);

struct ScheduleSegment {
    ActivityKind kind;
    double duration;
};

/// Concatenates per-segment traces. Segment i is generated with seed
/// `seed + i` and shifted so timestamps continue from the previous segment.
AccelTrace compose_schedule(std::span<const ScheduleSegment> segments,
                            double rate_hz = kDefaultSampleRateHz, std::uint64_t seed = 0);

/// CSV with header `t,ax,ay,az,label`.
void write_trace_csv(std::ostream& out, const AccelTrace& trace);
AccelTrace read_trace_csv(std::istream& in);

}  // namespace bsn
