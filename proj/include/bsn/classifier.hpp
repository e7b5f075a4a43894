#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "bsn/motion.hpp"

namespace bsn {

enum class ActivityClass { Rest, SlowActivity, FastActivity };

std::string_view to_string(ActivityClass c);

struct ClassifierConfig {
    double low_threshold_g = 0.9;
    double high_threshold_g = 1.3;
    double axis_delta_threshold_g = 2.0;
    double window_s = 1.0;
    // Rest band and per-axis variance bound, matched to the generator's rest noise.
    double rest_low_g = 0.95;
    double rest_high_g = 1.05;
    double rest_variance_g2 = 4e-4;
};

/// Throws ParameterError unless 0 < low < 1 < high and the window is positive.
void validate(const ClassifierConfig& cfg);

/// Classifies one window. Order of samples does not matter.
ActivityClass classify_window(std::span<const AccelSample> window, const ClassifierConfig& cfg = {});

enum class AbnormalTrigger { TotalAccelBound, PerAxisDelta };

std::string_view to_string(AbnormalTrigger t);

struct AbnormalEvent {
    double t_start = 0.0;
    double t_end = 0.0;
    AbnormalTrigger trigger = AbnormalTrigger::TotalAccelBound;
    double peak_total_a = 0.0;
};

/// Runs both detectors over the trace: total acceleration outside
/// [low, high], and a per-axis peak-to-peak span above the delta threshold
/// inside a trailing window. Firings closer than one window merge into one
/// event. An event reports TotalAccelBound when that detector fired anywhere
/// inside it.
std::vector<AbnormalEvent> detect_abnormal(const AccelTrace& trace, const ClassifierConfig& cfg = {});

/// CSV with header `t_start,t_end,trigger,peak_total_a`.
void write_events_csv(std::ostream& out, std::span<const AbnormalEvent> events);

}  // namespace bsn
