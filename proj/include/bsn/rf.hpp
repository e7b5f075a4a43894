#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bsn {

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

enum class RadioStandard { Wpan154, Wlan80211, MicrowaveOven };

std::string_view to_string(RadioStandard s);
RadioStandard standard_from_string(std::string_view name);

struct ChannelSpec {
    RadioStandard standard = RadioStandard::Wpan154;
    int index = 11;
    double center_mhz = 2405.0;
    double occupied_bw_mhz = 2.0;

    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

inline constexpr int kFirstWpanChannel = 11;
inline constexpr int kLastWpanChannel = 26;
inline constexpr int kWpanChannelCount = kLastWpanChannel - kFirstWpanChannel + 1;

/// 802.15.4: 2405 + 5 (k - 11), k in 11..26. 802.11b/g: 2412 + 5 (k - 1),
/// k in 1..11. The oven has a single channel (index 0) at 2450 MHz.
double channel_center_freq(RadioStandard standard, int index);

ChannelSpec make_channel(RadioStandard standard, int index);
inline ChannelSpec wpan_channel(int index) { return make_channel(RadioStandard::Wpan154, index); }
inline ChannelSpec wlan_channel(int index) { return make_channel(RadioStandard::Wlan80211, index); }
inline ChannelSpec oven_channel() { return make_channel(RadioStandard::MicrowaveOven, 0); }

/// Width in MHz of the intersection of the two occupied bands.
double spectral_overlap(const ChannelSpec& a, const ChannelSpec& b);

// ---------------------------------------------------------------------------
// Geometry and materials
// ---------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

double distance(Vec2 a, Vec2 b);

enum class Material { Drywall, Plywood, Glass, Brick, Concrete, AluminumSiding, MetalAppliance, PlantFoliage };

inline constexpr std::array<Material, 8> kAllMaterials{
    Material::Drywall,        Material::Plywood,        Material::Glass,       Material::Brick,
    Material::Concrete,       Material::AluminumSiding, Material::MetalAppliance, Material::PlantFoliage};

std::string_view to_string(Material m);
Material material_from_string(std::string_view name);

struct MaterialProperties {
    double loss_db = 0.0;
    /// When positive, the loss only applies if one end of the path lies
    /// closer than this to the obstacle.
    double near_field_m = 0.0;

    friend bool operator==(const MaterialProperties&, const MaterialProperties&) = default;
};

/// Per-material attenuation at 2.4 GHz, overridable per scenario.
class MaterialTable {
public:
    MaterialTable();

    const MaterialProperties& at(Material m) const { return props_[static_cast<std::size_t>(m)]; }
    void set_loss(Material m, double loss_db);
    void set(Material m, MaterialProperties p);

    friend bool operator==(const MaterialTable&, const MaterialTable&) = default;

private:
    std::array<MaterialProperties, kAllMaterials.size()> props_;
};

struct Segment {
    Vec2 a;
    Vec2 b;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct Disc {
    Vec2 center;
    double radius = 0.0;

    friend bool operator==(const Disc&, const Disc&) = default;
};

struct Obstacle {
    Material material = Material::Drywall;
    std::variant<Segment, Disc> geometry;
    double loss_db = 0.0;
    double near_field_m = 0.0;

    friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

/// Builds an obstacle whose loss comes from `table`.
Obstacle make_obstacle(Material m, std::variant<Segment, Disc> geometry, const MaterialTable& table = {});

/// True when the straight path from `from` to `to` is attenuated by `o`.
bool attenuates(const Obstacle& o, Vec2 from, Vec2 to);

std::vector<Obstacle> obstacles_crossed(std::span<const Obstacle> obstacles, Vec2 from, Vec2 to);

// ---------------------------------------------------------------------------
// Link budget
// ---------------------------------------------------------------------------

inline constexpr double kDefaultSensitivityDbm = -92.0;

/// Log-distance loss with the free-space constant; exponent 2 is Friis.
double distance_loss_db(double distance_m, double freq_mhz, double exponent = 2.0);

/// Free-space loss plus the loss of every obstacle in `obstacles_crossed`.
/// Throws ParameterError for a non-positive distance.
double path_loss(double distance_m, std::span<const Obstacle> obstacles_crossed, double freq_mhz);

struct LinkBudget {
    double tx_power_dbm = 0.0;
    double path_loss_db = 0.0;
    double rx_power_dbm = 0.0;
    double sensitivity_dbm = kDefaultSensitivityDbm;
    double margin_db = 0.0;

    static LinkBudget make(double tx_power_dbm, double path_loss_db, double sensitivity_dbm = kDefaultSensitivityDbm);
};

// ---------------------------------------------------------------------------
// Interference
// ---------------------------------------------------------------------------

struct Interferer {
    std::string name;
    ChannelSpec channel;
    Vec2 position;
    double tx_power_dbm = 15.0;
    double activity_factor = 0.0;
    /// Distance exponent of this emitter's path loss; large values confine
    /// its influence to the immediate vicinity.
    double falloff_exponent = 2.0;
    bool enabled = true;

    friend bool operator==(const Interferer&, const Interferer&) = default;
};

/// Interferer as seen by one receiver.
struct ReceivedInterferer {
    ChannelSpec channel;
    double rx_power_dbm = -200.0;
    double activity_factor = 0.0;
    bool enabled = true;
};

ReceivedInterferer receive(const Interferer& source, Vec2 receiver, std::span<const Obstacle> obstacles);

/// Constants of the interference model. Defaults are the values fitted to
/// data/tables.csv.
struct InterferenceModel {
    /// Interference-to-signal ratio (dB) at which a collision destroys half
    /// the overlapping messages.
    double isr_midpoint_db = 0.061;
    /// Logistic scale of the collision curve in dB.
    double isr_slope_db = 2.025;
    /// Roll-off of the oven emission away from its 2450 MHz peak.
    double oven_rolloff_db_per_mhz = 0.71;

    friend bool operator==(const InterferenceModel&, const InterferenceModel&) = default;
};

/// Relative emission level (dB, <= 0) of `source` at `offset_mhz` from its
/// center. Wi-Fi follows the 802.11g OFDM transmit mask.
double emission_mask_db(const ChannelSpec& source, double offset_mhz, const InterferenceModel& model);

/// Logistic weight in [0, 1] of an interferer with the given
/// interference-to-signal ratio.
double power_factor(double isr_db, const InterferenceModel& model);

/// Probability that one message on `victim` is decoded.
///
/// Zero when the link margin is negative. Otherwise the product over enabled
/// interferers of (1 - activity * overlap / victim_bw * power_factor), where
/// the interference level is the received power shaped by the source's
/// emission mask at the victim frequency.
double message_success_prob(const LinkBudget& link, const ChannelSpec& victim,
                            std::span<const ReceivedInterferer> interferers, const InterferenceModel& model);

/// Everything outside the two endpoints that shapes a link.
struct RadioEnvironment {
    std::vector<Obstacle> obstacles;
    std::vector<Interferer> interferers;
    double sensitivity_dbm = kDefaultSensitivityDbm;
};

LinkBudget link_budget(const RadioEnvironment& env, Vec2 tx, Vec2 rx, double tx_power_dbm, double freq_mhz);

/// One-way success probability from `tx` to `rx` on `victim`.
double link_success_prob(const RadioEnvironment& env, Vec2 tx, Vec2 rx, double tx_power_dbm,
                         const ChannelSpec& victim, const InterferenceModel& model);

}  // namespace bsn
