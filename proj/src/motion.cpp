#include "bsn/motion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "bsn/errors.hpp"

namespace bsn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct NamedActivity {
    ActivityKind kind;
    std::string_view name;
};

constexpr std::array<NamedActivity, 7> kActivityNames{{
    {ActivityKind::Rest, "Rest"},
    {ActivityKind::SitStand, "SitStand"},
    {ActivityKind::LeftRightRotation, "LeftRightRotation"},
    {ActivityKind::SlowWalk, "SlowWalk"},
    {ActivityKind::Run, "Run"},
    {ActivityKind::Jump, "Jump"},
    {ActivityKind::Fall, "Fall"},
}};

/// Seeded generator plus the noise and jitter draws used by every profile.
class Draws {
public:
    Draws(std::uint64_t seed, ActivityKind kind) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(kind) + 0x9e37u};
        rng_.seed(seq);
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    double phase() { return uniform(0.0, kTwoPi); }

    // Gaussian noise limited to +-3 sigma: redraw a few times, then clamp.
    double noise(double sigma) {
        std::normal_distribution<double> dist(0.0, sigma);
        double v = dist(rng_);
        for (int tries = 0; std::abs(v) > 3.0 * sigma && tries < 4; ++tries) v = dist(rng_);
        return std::clamp(v, -3.0 * sigma, 3.0 * sigma);
    }

private:
    std::mt19937_64 rng_;
};

struct Tone {
    double amp;
    double freq;
    double phase;

    double at(double t) const { return amp * std::sin(kTwoPi * freq * t + phase); }
};

std::size_t sample_count(double duration, double rate_hz) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration * rate_hz)));
}

std::size_t samples_for(double seconds, double rate_hz, std::size_t min_samples) {
    return std::max(min_samples, static_cast<std::size_t>(std::llround(seconds * rate_hz)));
}

// Smooth 0 -> 1 -> 0 bump over [0, 1].
double bump(double u) { return std::sin(std::numbers::pi * std::clamp(u, 0.0, 1.0)); }

std::vector<AccelSample> rest_profile(std::size_t n, double rate, Draws& d) {
    std::vector<AccelSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        out[i] = {t, d.noise(0.004), d.noise(0.004), 1.0 + d.noise(0.004)};
    }
    return out;
}

// Slow modes keep |az - 1| <= 0.05 and the horizontal magnitude <= 0.6,
// which bounds the total acceleration to [0.95g, 1.21g].
std::vector<AccelSample> slow_profile(ActivityKind kind, std::size_t n, double rate, Draws& d) {
    std::array<Tone, 2> x{}, y{};
    Tone z{};
    switch (kind) {
        case ActivityKind::SitStand: {
            const double f = d.uniform(1.0, 1.3);
            x = {Tone{d.uniform(0.25, 0.35), f, d.phase()}, Tone{0.08, 2.0 * f, d.phase()}};
            y = {Tone{0.08, d.uniform(1.2, 1.6), d.phase()}, Tone{0.0, 1.0, 0.0}};
            z = {0.03, f, d.phase()};
            break;
        }
        case ActivityKind::LeftRightRotation: {
            const double f = d.uniform(1.0, 1.4);
            y = {Tone{d.uniform(0.30, 0.40), f, d.phase()}, Tone{0.06, 2.0 * f, d.phase()}};
            x = {Tone{0.10, 2.0 * f, d.phase()}, Tone{0.0, 1.0, 0.0}};
            z = {0.02, 2.0 * f, d.phase()};
            break;
        }
        default: {  // SlowWalk
            const double step = d.uniform(1.6, 2.0);
            x = {Tone{d.uniform(0.20, 0.30), step, d.phase()}, Tone{0.05, 2.0 * step, d.phase()}};
            y = {Tone{0.12, 0.5 * step + 0.5, d.phase()}, Tone{0.0, 1.0, 0.0}};
            z = {0.04, step, d.phase()};
            break;
        }
    }

    std::vector<AccelSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        double ax = x[0].at(t) + x[1].at(t) + d.noise(0.01);
        double ay = y[0].at(t) + y[1].at(t) + d.noise(0.01);
        const double dz = std::clamp(z.at(t) + d.noise(0.008), -0.05, 0.05);
        const double horizontal = std::hypot(ax, ay);
        if (horizontal > 0.6) {
            ax *= 0.6 / horizontal;
            ay *= 0.6 / horizontal;
        }
        out[i] = {t, ax, ay, 1.0 + dz};
    }
    return out;
}

std::vector<AccelSample> run_profile(std::size_t n, double rate, Draws& d) {
    const double stride = d.uniform(2.6, 3.0);
    const Tone z1{d.uniform(0.8, 1.0), stride, d.phase()};
    const Tone z2{0.25, 2.0 * stride, d.phase()};
    const Tone x1{d.uniform(0.35, 0.45), stride, d.phase()};
    const Tone y1{0.25, 0.5 * stride, d.phase()};

    std::vector<AccelSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        out[i] = {t, x1.at(t) + d.noise(0.03), y1.at(t) + d.noise(0.03), 1.0 + z1.at(t) + z2.at(t) + d.noise(0.03)};
    }
    return out;
}

// Phase lengths in samples for one jump: crouch, push-off, flight, landing.
struct JumpPhases {
    std::size_t crouch, push, flight, land;
    std::size_t total() const { return crouch + push + flight + land; }
};

std::vector<AccelSample> jump_profile(std::size_t n, double rate, Draws& d) {
    std::vector<AccelSample> out = rest_profile(n, rate, d);

    JumpPhases ph{samples_for(0.25, rate, 1), samples_for(0.15, rate, 1), samples_for(0.30, rate, 1),
                  samples_for(0.12, rate, 1)};
    if (ph.total() > n) {
        // Too short for a full jump: keep only flight and landing.
        ph = {0, 0, std::max<std::size_t>(1, n / 2), n - std::max<std::size_t>(1, n / 2)};
    }
    const std::size_t period = std::max(ph.total() + 1, samples_for(d.uniform(1.3, 1.7), rate, 1));
    const std::size_t lead = n >= ph.total() + samples_for(0.3, rate, 0) ? samples_for(0.3, rate, 0) : 0;

    for (std::size_t start = lead; start < n; start += period) {
        const double landing_peak = d.uniform(2.7, 3.1);
        const double push_peak = d.uniform(1.6, 1.9);
        std::size_t i = start;
        auto frac = [](std::size_t k, std::size_t len) { return (static_cast<double>(k) + 0.5) / static_cast<double>(len); };
        for (std::size_t k = 0; k < ph.crouch && i < n; ++k, ++i) out[i].az = 1.0 - 0.3 * bump(frac(k, ph.crouch));
        for (std::size_t k = 0; k < ph.push && i < n; ++k, ++i) out[i].az = 1.0 + (push_peak - 1.0) * bump(frac(k, ph.push));
        for (std::size_t k = 0; k < ph.flight && i < n; ++k, ++i) out[i].az = 0.05 + d.noise(0.01);
        for (std::size_t k = 0; k < ph.land && i < n; ++k, ++i) {
            const double shape = std::max(bump(frac(k, ph.land)), 0.85);
            out[i].az = landing_peak * shape;
            out[i].ax += 0.3 * shape;
        }
    }
    return out;
}

// Standing sway, a sub-0.5g descent, a >2.5g impact, then lying still with
// gravity on the frontal axis.
std::vector<AccelSample> fall_profile(std::size_t n, double rate, Draws& d) {
    std::vector<AccelSample> out = rest_profile(n, rate, d);

    std::size_t dip = samples_for(0.30, rate, 1);
    std::size_t impact = samples_for(0.12, rate, 1);
    std::size_t pre = samples_for(std::min(1.0, 0.2 * static_cast<double>(n) / rate), rate, 0);
    if (pre + dip + impact > n) {
        pre = 0;
        dip = std::max<std::size_t>(1, n / 2);
        impact = n - dip;
    }
    const double floor = d.uniform(0.15, 0.35);
    const double peak = d.uniform(2.8, 3.3);
    const double side = d.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;

    std::size_t i = pre;
    for (std::size_t k = 0; k < dip && i < n; ++k, ++i) {
        const double u = (static_cast<double>(k) + 1.0) / static_cast<double>(dip);
        out[i].az = 1.0 - (1.0 - floor) * std::min(1.0, 2.0 * u);
    }
    for (std::size_t k = 0; k < impact && i < n; ++k, ++i) {
        const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(impact);
        const double shape = std::max(bump(u), 0.85);
        out[i].az = peak * shape;
        out[i].ax = side * 0.8 * shape;
    }
    for (; i < n; ++i) {
        out[i].ax = side * (1.0 + out[i].ax);
        out[i].az -= 1.0;
    }
    return out;
}

}  // namespace

std::string_view to_string(ActivityKind kind) {
    for (const auto& entry : kActivityNames) {
        if (entry.kind == kind) return entry.name;
    }
    return "Unknown";
}

ActivityKind activity_from_string(std::string_view name) {
    for (const auto& entry : kActivityNames) {
        if (entry.name == name) return entry.kind;
    }
    throw ParameterError("unknown activity '" + std::string(name) + "'");
}

bool is_slow_mode(ActivityKind kind) {
    return kind == ActivityKind::SitStand || kind == ActivityKind::LeftRightRotation ||
           kind == ActivityKind::SlowWalk;
}

double total_acceleration(const AccelSample& s) { return std::sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az); }

AccelTrace generate_trace(ActivityKind kind, double duration, double rate_hz, std::uint64_t seed) {
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ParameterError("trace duration must be positive");
    if (!(rate_hz >= kMinSampleRateHz && rate_hz <= kMaxSampleRateHz))
        throw ParameterError("sample rate must lie in [10, 100] Hz");

    const std::size_t n = sample_count(duration, rate_hz);
    Draws draws(seed, kind);

    AccelTrace trace;
    trace.rate_hz = rate_hz;
    switch (kind) {
        case ActivityKind::Rest: trace.samples = rest_profile(n, rate_hz, draws); break;
        case ActivityKind::SitStand:
        case ActivityKind::LeftRightRotation:
        case ActivityKind::SlowWalk: trace.samples = slow_profile(kind, n, rate_hz, draws); break;
        case ActivityKind::Run: trace.samples = run_profile(n, rate_hz, draws); break;
        case ActivityKind::Jump: trace.samples = jump_profile(n, rate_hz, draws); break;
        case ActivityKind::Fall: trace.samples = fall_profile(n, rate_hz, draws); break;
    }
    trace.activity_labels.assign(n, kind);
    return trace;
}

AccelTrace compose_schedule(std::span<const ScheduleSegment> segments, double rate_hz, std::uint64_t seed) {
    if (segments.empty()) throw ParameterError("schedule must contain at least one segment");

    AccelTrace out;
    out.rate_hz = rate_hz;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const AccelTrace part = generate_trace(segments[k].kind, segments[k].duration, rate_hz, seed + k);
        const std::size_t offset = out.samples.size();
        for (AccelSample s : part.samples) {
            s.t = static_cast<double>(offset) / rate_hz + s.t;
            out.samples.push_back(s);
        }
        out.activity_labels.insert(out.activity_labels.end(), part.activity_labels.begin(), part.activity_labels.end());
    }
    return out;
}

void write_trace_csv(std::ostream& out, const AccelTrace& trace) {
    std::ostringstream buf;
    buf.precision(9);
    buf << "t,ax,ay,az,label\n";
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& s = trace.samples[i];
        buf << s.t << ',' << s.ax << ',' << s.ay << ',' << s.az << ',' << to_string(trace.activity_labels[i]) << '\n';
    }
    out << buf.str();
}

AccelTrace read_trace_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != "t,ax,ay,az,label") throw ParseError(1, "expected header 't,ax,ay,az,label'");

    AccelTrace trace;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        AccelSample s;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        std::string label;
        if (!(row >> s.t >> c1 >> s.ax >> c2 >> s.ay >> c3 >> s.az >> c4) || c1 != ',' || c2 != ',' || c3 != ',' ||
            c4 != ',' || !std::getline(row, label))
            throw ParseError(line_no, "malformed trace row");
        if (!trace.samples.empty() && !(s.t > trace.samples.back().t))
            throw ParseError(line_no, "timestamps must be strictly increasing");
        try {
            trace.activity_labels.push_back(activity_from_string(label));
        } catch (const ParameterError& e) {
            throw ParseError(line_no, e.what());
        }
        trace.samples.push_back(s);
    }
    if (trace.samples.empty()) throw ParseError(line_no, "trace has no samples");
    if (trace.samples.size() > 1) {
        const double span = trace.samples.back().t - trace.samples.front().t;
        const double rate = static_cast<double>(trace.samples.size() - 1) / span;
        trace.rate_hz = std::round(rate * 1000.0) / 1000.0;
    } else {
        trace.rate_hz = kDefaultSampleRateHz;
    }
    return trace;
}

}  // namespace bsn
