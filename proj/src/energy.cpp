#include "bsn/energy.hpp"

#include <ostream>
#include <sstream>

#include "bsn/errors.hpp"
#include "bsn/frame.hpp"

namespace bsn {

std::vector<ComponentCurrent> wearable_components() {
    return {{kAccelerometer, 0.5, 0.003}, {kMicrocontroller, 5.8, 0.1}, {kTransceiver, 45.0, 0.05}};
}

std::vector<ComponentCurrent> wearable_components_no_sleep() {
    auto parts = wearable_components();
    for (auto& p : parts) p.sleep_ma = 0.0;
    return parts;
}

double average_current(std::span<const ComponentCurrent> components, const DutyProfile& duty) {
    double total = 0.0;
    for (const auto& c : components) {
        const auto it = duty.find(c.name);
        if (it == duty.end()) throw ParameterError("no duty entry for component '" + c.name + "'");
        const double d = it->second;
        if (!(d >= 0.0 && d <= 1.0)) throw ParameterError("duty for '" + c.name + "' outside [0, 1]");
        total += d * c.active_ma + (1.0 - d) * c.sleep_ma;
    }
    return total;
}

double battery_life_hours(const Battery& battery, std::span<const ComponentCurrent> components,
                          const DutyProfile& duty) {
    if (!(battery.capacity_mah > 0.0)) throw ParameterError("battery capacity must be positive");
    const double current = average_current(components, duty);
    if (!(current > 0.0)) throw UndefinedLifeError("average current is zero; battery life is undefined");
    return battery.capacity_mah / current;
}

double frame_airtime_s(std::size_t frame_bytes) { return static_cast<double>(frame_bytes) * 8.0 / 250'000.0 + 1e-3; }

EnergyReport simulate_energy(std::span<const ModeInterval> timeline, std::span<const ComponentCurrent> components,
                             const Battery& battery) {
    double total_s = 0.0;
    double active_s = 0.0;
    std::size_t frames = 0;
    for (const auto& iv : timeline) {
        total_s += iv.duration_s;
        if (iv.mode == SensorMode::Active) active_s += iv.duration_s;
        frames += iv.frames;
    }

    EnergyReport report;
    report.duration_h = total_s / 3600.0;
    const double tx_s = std::min(total_s, static_cast<double>(frames) * frame_airtime_s(kFrameSize));
    for (const auto& c : components) {
        double duty = 0.0;
        if (total_s > 0.0) duty = (c.name == kTransceiver ? tx_s : active_s) / total_s;
        ComponentEnergy e{c.name, duty, duty * c.active_ma + (1.0 - duty) * c.sleep_ma, 0.0};
        e.mah_consumed = e.avg_ma * report.duration_h;
        report.consumed_mah += e.mah_consumed;
        report.components.push_back(e);
    }

    report.remaining_mah = battery.capacity_mah - report.consumed_mah;
    report.exhausted = report.remaining_mah < 0.0;
    const double avg_ma = report.duration_h > 0.0 ? report.consumed_mah / report.duration_h : 0.0;
    report.projected_life_h = avg_ma > 0.0 ? battery.capacity_mah / avg_ma : 0.0;
    return report;
}

void write_energy_csv(std::ostream& out, const EnergyReport& report) {
    std::ostringstream buf;
    buf.precision(9);
    buf << "component,duty,avg_ma,mah_consumed\n";
    for (const auto& c : report.components) {
        buf << c.name << ',' << c.duty << ',' << c.avg_ma << ',' << c.mah_consumed << '\n';
    }
    out << buf.str();
}

}  // namespace bsn
