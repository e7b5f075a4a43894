#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bsn/sensor_node.hpp"

namespace bsn {

struct ComponentCurrent {
    std::string name;
    double active_ma = 0.0;
    double sleep_ma = 0.0;
};

struct Battery {
    double capacity_mah = 0.0;
    double nominal_v = 3.7;
};

/// Fraction of time each named component spends active.
using DutyProfile = std::map<std::string, double>;

inline constexpr const char* kAccelerometer = "accelerometer";
inline constexpr const char* kMicrocontroller = "microcontroller";
inline constexpr const char* kTransceiver = "transceiver";

/// Wearable unit draw: accelerometer 0.5 mA / 3 uA, MCU 5.8 mA / 0.1 mA idle,
/// XBee 45 mA / 0.05 mA standby.
std::vector<ComponentCurrent> wearable_components();

/// Same parts with every sleep current set to zero.
std::vector<ComponentCurrent> wearable_components_no_sleep();

inline Battery li_ion_pack() { return {6600.0, 3.7}; }
inline Battery lir3048_cell() { return {230.0, 3.7}; }

/// Sum over components of duty * active + (1 - duty) * sleep, in mA.
/// Throws ParameterError when a component has no duty entry or a duty lies
/// outside [0, 1].
double average_current(std::span<const ComponentCurrent> components, const DutyProfile& duty);

/// capacity / average current. Throws UndefinedLifeError for a zero draw.
double battery_life_hours(const Battery& battery, std::span<const ComponentCurrent> components,
                          const DutyProfile& duty);

struct ComponentEnergy {
    std::string name;
    double duty = 0.0;
    double avg_ma = 0.0;
    double mah_consumed = 0.0;
};

struct EnergyReport {
    double duration_h = 0.0;
    double consumed_mah = 0.0;
    double remaining_mah = 0.0;
    double projected_life_h = 0.0;
    bool exhausted = false;
    std::vector<ComponentEnergy> components;
};

/// Airtime of one frame at 250 kbps plus 1 ms of fixed overhead.
double frame_airtime_s(std::size_t frame_bytes);

/// Integrates each component over a sensor timeline. The accelerometer and
/// MCU are active during Active intervals; the transceiver is active only
/// while sending frames. Components are matched by the names above.
EnergyReport simulate_energy(std::span<const ModeInterval> timeline, std::span<const ComponentCurrent> components,
                             const Battery& battery);

/// CSV with header `component,duty,avg_ma,mah_consumed`.
void write_energy_csv(std::ostream& out, const EnergyReport& report);

}  // namespace bsn
