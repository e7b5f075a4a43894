#include <gtest/gtest.h>

#include <sstream>

#include "bsn/energy.hpp"
#include "bsn/errors.hpp"

using namespace bsn;

namespace {

DutyProfile duty(double accel, double mcu, double radio) {
    return {{kAccelerometer, accel}, {kMicrocontroller, mcu}, {kTransceiver, radio}};
}

}  // namespace

TEST(AverageCurrent, HandSums) {
    const auto parts = wearable_components_no_sleep();
    EXPECT_NEAR(average_current(parts, duty(1, 1, 1)), 45.0 + 5.8 + 0.5, 1e-12);
    EXPECT_NEAR(average_current(parts, duty(0, 0, 0)), 0.0, 1e-12);
    EXPECT_NEAR(average_current(parts, duty(1, 1, 0.1)), 4.5 + 5.8 + 0.5, 1e-12);
}

TEST(AverageCurrent, SleepCurrentsCount) {
    const auto parts = wearable_components();
    EXPECT_NEAR(average_current(parts, duty(0, 0, 0)), 0.003 + 0.1 + 0.05, 1e-12);
}

TEST(AverageCurrent, Errors) {
    const auto parts = wearable_components();
    DutyProfile missing{{kAccelerometer, 1.0}};
    EXPECT_THROW(average_current(parts, missing), ParameterError);
    EXPECT_THROW(average_current(parts, duty(1, 1.2, 0)), ParameterError);
}

TEST(AverageCurrent, LinearInDuty) {
    const auto parts = wearable_components();
    for (double a = 0; a <= 1.0; a += 0.25) {
        const double lo = average_current(parts, duty(a, 0.2, 0));
        const double hi = average_current(parts, duty(a, 0.2, 1));
        const double mid = average_current(parts, duty(a, 0.2, 0.5));
        EXPECT_NEAR(mid, (lo + hi) / 2, 1e-12);
    }
}

TEST(BatteryLife, LifetimeFigures) {
    const auto parts = wearable_components_no_sleep();
    EXPECT_NEAR(battery_life_hours(li_ion_pack(), parts, duty(1, 1, 1)), 6600.0 / 51.3, 1e-9);
    EXPECT_NEAR(battery_life_hours(li_ion_pack(), parts, duty(1, 1, 1)), 128.7, 0.1);
    EXPECT_NEAR(battery_life_hours(li_ion_pack(), parts, duty(1, 1, 0.1)), 611.1, 0.1);
    EXPECT_NEAR(battery_life_hours(lir3048_cell(), parts, duty(1, 1, 1)), 4.48, 0.1);
    EXPECT_NEAR(battery_life_hours(lir3048_cell(), parts, duty(1, 1, 0.1)), 21.3, 0.1);
}

TEST(BatteryLife, Homogeneity) {
    const auto parts = wearable_components();
    const auto d = duty(0.3, 0.6, 0.05);
    const double base = battery_life_hours({1000}, parts, d);
    EXPECT_NEAR(battery_life_hours({2000}, parts, d), 2 * base, 1e-9);
    auto doubled = parts;
    for (auto& p : doubled) {
        p.active_ma *= 2;
        p.sleep_ma *= 2;
    }
    EXPECT_NEAR(battery_life_hours({1000}, doubled, d), base / 2, 1e-9);
}

TEST(BatteryLife, ZeroCurrentIsUndefined) {
    EXPECT_THROW(battery_life_hours(li_ion_pack(), wearable_components_no_sleep(), duty(0, 0, 0)),
                 UndefinedLifeError);
    EXPECT_THROW(battery_life_hours({0}, wearable_components(), duty(1, 1, 1)), ParameterError);
}

TEST(SimulateEnergy, SleepCostsLessThanActive) {
    const std::vector<ModeInterval> sleep{{SensorMode::Sleep, 0, 3600, 3600}};
    const std::vector<ModeInterval> active{{SensorMode::Active, 0, 3600, 3600 * 60}};
    const auto parts = wearable_components();
    const auto s = simulate_energy(sleep, parts, li_ion_pack());
    const auto a = simulate_energy(active, parts, li_ion_pack());
    EXPECT_LT(s.consumed_mah, a.consumed_mah);
    EXPECT_FALSE(a.exhausted);
}

TEST(SimulateEnergy, HandIntegral) {
    // One hour active with 3600 frames: radio busy 3600 * airtime seconds.
    const std::vector<ModeInterval> tl{{SensorMode::Active, 0, 3600, 3600}};
    const auto parts = wearable_components();
    const auto r = simulate_energy(tl, parts, li_ion_pack());
    const double air = 16 * 8 / 250000.0 + 1e-3;
    const double radio_duty = 3600 * air / 3600;
    const double expect = 0.5 + 5.8 + radio_duty * 45 + (1 - radio_duty) * 0.05;
    EXPECT_NEAR(r.consumed_mah, expect, 1e-9);
    EXPECT_NEAR(r.remaining_mah, 6600 - expect, 1e-9);
}

TEST(SimulateEnergy, EmptyTimeline) {
    const auto r = simulate_energy({}, wearable_components(), li_ion_pack());
    EXPECT_EQ(r.consumed_mah, 0.0);
}

TEST(SimulateEnergy, RestDayCheaperThanRunDay) {
    const auto rest = run_node(initial_state({}), generate_trace(ActivityKind::Rest, 3600, 10, 1));
    const auto run = run_node(initial_state({}), generate_trace(ActivityKind::Run, 3600, 10, 1));
    const auto parts = wearable_components();
    EXPECT_LT(simulate_energy(rest.timeline, parts, li_ion_pack()).consumed_mah,
              simulate_energy(run.timeline, parts, li_ion_pack()).consumed_mah);
}

TEST(SimulateEnergy, ExhaustionFlag) {
    const std::vector<ModeInterval> tl{{SensorMode::Active, 0, 3600 * 10, 0}};
    EXPECT_TRUE(simulate_energy(tl, wearable_components(), {1.0}).exhausted);
}

TEST(EnergyCsv, Header) {
    std::ostringstream out;
    write_energy_csv(out, simulate_energy({}, wearable_components(), li_ion_pack()));
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "component,duty,avg_ma,mah_consumed");
}
