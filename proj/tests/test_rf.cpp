#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bsn/errors.hpp"
#include "bsn/rf.hpp"

using namespace bsn;

namespace {

double friis_oracle(double d, double f_mhz) {
    // 20 log10(4 pi d f / c)
    const double c = 299792458.0;
    return 20.0 * std::log10(4.0 * M_PI * d * f_mhz * 1e6 / c);
}

ChannelSpec custom(double center, double bw) {
    ChannelSpec c;
    c.center_mhz = center;
    c.occupied_bw_mhz = bw;
    return c;
}

}  // namespace

TEST(Channels, Centers) {
    for (int k = 11; k <= 26; ++k) EXPECT_DOUBLE_EQ(channel_center_freq(RadioStandard::Wpan154, k), 2405 + 5 * (k - 11));
    for (int k = 1; k <= 11; ++k) EXPECT_DOUBLE_EQ(channel_center_freq(RadioStandard::Wlan80211, k), 2412 + 5 * (k - 1));
    EXPECT_DOUBLE_EQ(channel_center_freq(RadioStandard::MicrowaveOven, 0), 2450);
    EXPECT_DOUBLE_EQ(wpan_channel(26).center_mhz, 2480);
}

TEST(Channels, OutOfRange) {
    EXPECT_THROW(channel_center_freq(RadioStandard::Wpan154, 10), ParameterError);
    EXPECT_THROW(channel_center_freq(RadioStandard::Wpan154, 27), ParameterError);
    EXPECT_THROW(channel_center_freq(RadioStandard::Wlan80211, 0), ParameterError);
    EXPECT_THROW(channel_center_freq(RadioStandard::Wlan80211, 12), ParameterError);
    EXPECT_THROW(channel_center_freq(RadioStandard::MicrowaveOven, 1), ParameterError);
}

TEST(Channels, Overlap) {
    EXPECT_DOUBLE_EQ(spectral_overlap(wpan_channel(11), wlan_channel(1)), 2.0);
    EXPECT_DOUBLE_EQ(spectral_overlap(custom(2405, 2), custom(2406.5, 2)), 0.5);
    EXPECT_DOUBLE_EQ(spectral_overlap(wpan_channel(15), wpan_channel(15)), 2.0);
    EXPECT_DOUBLE_EQ(spectral_overlap(wpan_channel(11), wpan_channel(12)), 0.0);
    // Channel 26 is clear of all three non-overlapping 802.11 channels.
    for (int w : {1, 6, 11}) EXPECT_EQ(spectral_overlap(wpan_channel(26), wlan_channel(w)), 0.0);
    // Interval oracle over every pair.
    for (int k = 11; k <= 26; ++k) {
        for (int w = 1; w <= 11; ++w) {
            const double fk = 2405 + 5 * (k - 11), fw = 2412 + 5 * (w - 1);
            const double expect = std::max(0.0, std::min(fk + 1, fw + 12.5) - std::max(fk - 1, fw - 12.5));
            EXPECT_DOUBLE_EQ(spectral_overlap(wpan_channel(k), wlan_channel(w)), expect);
        }
    }
    EXPECT_DOUBLE_EQ(spectral_overlap(wpan_channel(12), wlan_channel(1)), 2.0);
}

TEST(Channels, OverlapIsSymmetricAndBounded) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> f(2400, 2480), bw(0.5, 30);
    for (int i = 0; i < 1000; ++i) {
        const auto a = custom(f(rng), bw(rng));
        const auto b = custom(f(rng), bw(rng));
        const double o = spectral_overlap(a, b);
        EXPECT_DOUBLE_EQ(o, spectral_overlap(b, a));
        EXPECT_GE(o, 0.0);
        EXPECT_LE(o, std::min(a.occupied_bw_mhz, b.occupied_bw_mhz) + 1e-12);
    }
}

TEST(Channels, StandardNames) {
    for (auto s : {RadioStandard::Wpan154, RadioStandard::Wlan80211, RadioStandard::MicrowaveOven})
        EXPECT_EQ(standard_from_string(to_string(s)), s);
    EXPECT_THROW(standard_from_string("bluetooth"), ParameterError);
}

TEST(PathLoss, FreeSpace) {
    EXPECT_NEAR(path_loss(10, {}, 2450), 60.2, 0.05);
    EXPECT_NEAR(path_loss(1, {}, 2450), 40.2, 0.05);
    for (double d : {0.5, 3.0, 17.0, 120.0}) {
        EXPECT_NEAR(path_loss(d, {}, 2440), friis_oracle(d, 2440), 0.01);
    }
    EXPECT_THROW(path_loss(0, {}, 2450), ParameterError);
    EXPECT_THROW(path_loss(-1, {}, 2450), ParameterError);
}

TEST(PathLoss, SidingKillsTheLink) {
    const auto siding = make_obstacle(Material::AluminumSiding, Segment{{5, -5}, {5, 5}});
    const std::vector<Obstacle> crossed{siding};
    const double loss = path_loss(10, crossed, 2450);
    EXPECT_NEAR(loss, 100.2, 0.05);
    const auto budget = LinkBudget::make(0, loss);
    EXPECT_LT(budget.margin_db, 0);
    EXPECT_EQ(message_success_prob(budget, wpan_channel(20), {}, {}), 0.0);
}

TEST(PathLoss, MoreObstaclesNeverLowerLoss) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> loss(0, 40);
    for (int i = 0; i < 200; ++i) {
        std::vector<Obstacle> obs;
        double prev = path_loss(7, obs, 2450);
        for (int k = 0; k < 5; ++k) {
            Obstacle o;
            o.loss_db = loss(rng);
            obs.push_back(o);
            const double now = path_loss(7, obs, 2450);
            EXPECT_GE(now, prev);
            prev = now;
        }
    }
}

TEST(Geometry, SegmentCrossing) {
    const auto wall = make_obstacle(Material::Brick, Segment{{0, -1}, {0, 1}});
    EXPECT_TRUE(attenuates(wall, {-1, 0}, {1, 0}));
    EXPECT_FALSE(attenuates(wall, {-1, 2}, {1, 2}));
    EXPECT_FALSE(attenuates(wall, {1, 0}, {2, 0}));
    EXPECT_EQ(wall.loss_db, 5.0);
}

TEST(Geometry, NearFieldRule) {
    // Foliage only counts when an endpoint is close to it.
    const auto plant = make_obstacle(Material::PlantFoliage, Disc{{0, 0}, 0.4});
    EXPECT_EQ(plant.near_field_m, 0.5);
    EXPECT_TRUE(attenuates(plant, {-0.6, 0}, {10, 0}));
    EXPECT_FALSE(attenuates(plant, {-5, 0}, {5, 0}));
    EXPECT_FALSE(attenuates(plant, {-0.6, 2}, {10, 2}));
}

TEST(Geometry, MaterialTableOverride) {
    MaterialTable t;
    t.set_loss(Material::Glass, 7.5);
    EXPECT_EQ(make_obstacle(Material::Glass, Segment{}, t).loss_db, 7.5);
    EXPECT_THROW(t.set_loss(Material::Glass, -1), ParameterError);
    for (auto m : kAllMaterials) EXPECT_EQ(material_from_string(to_string(m)), m);
    EXPECT_THROW(material_from_string("Cardboard"), ParameterError);
}

TEST(Interference, MaskShape) {
    const InterferenceModel model;
    const auto wlan = wlan_channel(6);
    EXPECT_EQ(emission_mask_db(wlan, 0, model), 0.0);
    EXPECT_EQ(emission_mask_db(wlan, 9, model), 0.0);
    EXPECT_NEAR(emission_mask_db(wlan, 11, model), -20.0, 1e-12);
    EXPECT_NEAR(emission_mask_db(wlan, 20, model), -28.0, 1e-12);
    EXPECT_NEAR(emission_mask_db(wlan, -30, model), -40.0, 1e-12);
    double prev = 0.0;
    for (double off = 0; off < 50; off += 0.25) {
        const double m = emission_mask_db(wlan, off, model);
        EXPECT_LE(m, prev + 1e-12);
        prev = m;
    }
    EXPECT_NEAR(emission_mask_db(oven_channel(), 5, model), -5 * model.oven_rolloff_db_per_mhz, 1e-12);
    EXPECT_EQ(emission_mask_db(oven_channel(), 1000, model), -40.0);
}

TEST(Interference, PowerFactorIsLogistic) {
    const InterferenceModel model;
    EXPECT_NEAR(power_factor(model.isr_midpoint_db, model), 0.5, 1e-12);
    double prev = 0.0;
    for (double isr = -40; isr <= 40; isr += 1) {
        const double w = power_factor(isr, model);
        EXPECT_GE(w, prev);
        EXPECT_GE(w, 0.0);
        EXPECT_LE(w, 1.0);
        prev = w;
    }
}

TEST(Interference, HandComputedProbability) {
    const InterferenceModel model;
    const auto budget = LinkBudget::make(0, 60);  // -60 dBm at the receiver
    ReceivedInterferer a{wlan_channel(1), -62.0, 0.1, true};
    ReceivedInterferer b{wlan_channel(6), -70.0, 0.2, true};
    const std::vector<ReceivedInterferer> both{a, b};
    // Victim 2410 MHz: ch1 overlaps fully at 2 MHz offset, ch6 sits 27 MHz
    // away outside its occupied band.
    const double wa = 1.0 / (1.0 + std::exp(-(-2.0 - model.isr_midpoint_db) / model.isr_slope_db));
    EXPECT_NEAR(message_success_prob(budget, wpan_channel(12), both, model), 1.0 - 0.1 * wa, 1e-12);
}

TEST(Interference, DisabledEqualsAbsent) {
    const InterferenceModel model;
    const auto budget = LinkBudget::make(0, 70);
    ReceivedInterferer on{wlan_channel(1), -65.0, 0.3, true};
    ReceivedInterferer off = on;
    off.enabled = false;
    ReceivedInterferer other{wlan_channel(1), -75.0, 0.1, true};
    const std::vector<ReceivedInterferer> with_off{other, off};
    const std::vector<ReceivedInterferer> only{other};
    EXPECT_EQ(message_success_prob(budget, wpan_channel(12), with_off, model),
              message_success_prob(budget, wpan_channel(12), only, model));
    const std::vector<ReceivedInterferer> with_on{other, on};
    EXPECT_LT(message_success_prob(budget, wpan_channel(12), with_on, model),
              message_success_prob(budget, wpan_channel(12), only, model));
}

TEST(Interference, MonotoneInInterfererPowerAndActivity) {
    const InterferenceModel model;
    const auto budget = LinkBudget::make(0, 70);
    double prev = 1.0;
    for (double p = -100; p <= -30; p += 2) {
        const ReceivedInterferer i{wlan_channel(1), p, 0.2, true};
        const double s = message_success_prob(budget, wpan_channel(12), std::span(&i, 1), model);
        EXPECT_LE(s, prev);
        prev = s;
    }
    prev = 1.0;
    for (double af = 0; af <= 1.0; af += 0.05) {
        const ReceivedInterferer i{wlan_channel(1), -60, af, true};
        const double s = message_success_prob(budget, wpan_channel(12), std::span(&i, 1), model);
        EXPECT_LE(s, prev);
        EXPECT_GE(s, 0.0);
        prev = s;
    }
}

TEST(Interference, ReceiveUsesFalloffAndObstacles) {
    Interferer src{"x", wlan_channel(1), {0, 0}, 15, 0.1, 2.0, true};
    const auto clear = receive(src, {10, 0}, {});
    EXPECT_NEAR(clear.rx_power_dbm, 15 - distance_loss_db(10, 2412), 1e-12);
    const std::vector<Obstacle> wall{make_obstacle(Material::Brick, Segment{{5, -1}, {5, 1}})};
    EXPECT_NEAR(receive(src, {10, 0}, wall).rx_power_dbm, clear.rx_power_dbm - 5, 1e-12);
    src.falloff_exponent = 4.0;
    EXPECT_LT(receive(src, {10, 0}, {}).rx_power_dbm, clear.rx_power_dbm - 19);
}

TEST(Interference, EndToEndCleanLinkIsPerfect) {
    RadioEnvironment env;
    env.interferers.push_back({"far", wlan_channel(1), {50, 0}, 15, 0.5, 2.0, true});
    EXPECT_EQ(link_success_prob(env, {0, 0}, {5, 0}, 0, wpan_channel(20), {}), 1.0);
    EXPECT_LT(link_success_prob(env, {0, 0}, {5, 0}, 0, wpan_channel(12), {}), 1.0);
}
