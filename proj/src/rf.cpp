#include "bsn/rf.hpp"

#include <algorithm>
#include <cmath>

#include "bsn/errors.hpp"

namespace bsn {

namespace {

struct NamedMaterial {
    Material material;
    std::string_view name;
    MaterialProperties defaults;
};

// Drywall through concrete follow the NIST 2 GHz measurements; siding, metal
// appliances and foliage are set to reproduce the observed link outcomes.
constexpr std::array<NamedMaterial, kAllMaterials.size()> kMaterials{{
    {Material::Drywall, "Drywall", {0.5, 0.0}},
    {Material::Plywood, "Plywood", {0.5, 0.0}},
    {Material::Glass, "Glass", {3.0, 0.0}},
    {Material::Brick, "Brick", {5.0, 0.0}},
    {Material::Concrete, "Concrete", {30.0, 0.0}},
    {Material::AluminumSiding, "AluminumSiding", {40.0, 0.0}},
    {Material::MetalAppliance, "MetalAppliance", {12.0, 0.0}},
    {Material::PlantFoliage, "PlantFoliage", {15.0, 0.5}},
}};

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    return (d1 == 0 && on_segment(p1, q1, q2)) || (d2 == 0 && on_segment(p2, q1, q2)) ||
           (d3 == 0 && on_segment(q1, p1, p2)) || (d4 == 0 && on_segment(q2, p1, p2));
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double u = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return distance(p, Vec2{a.x + u * dx, a.y + u * dy});
}

double distance_to(const Obstacle& o, Vec2 p) {
    if (const auto* seg = std::get_if<Segment>(&o.geometry)) return point_segment_distance(p, seg->a, seg->b);
    const auto& disc = std::get<Disc>(o.geometry);
    return std::max(0.0, distance(p, disc.center) - disc.radius);
}

double wlan_mask_db(double offset) {
    if (offset <= 9.0) return 0.0;
    if (offset <= 11.0) return -20.0 * (offset - 9.0) / 2.0;
    if (offset <= 20.0) return -20.0 - 8.0 * (offset - 11.0) / 9.0;
    if (offset <= 30.0) return -28.0 - 12.0 * (offset - 20.0) / 10.0;
    return -40.0;
}

}  // namespace

std::string_view to_string(RadioStandard s) {
    switch (s) {
        case RadioStandard::Wpan154: return "wpan";
        case RadioStandard::Wlan80211: return "wlan";
        case RadioStandard::MicrowaveOven: return "oven";
    }
    return "unknown";
}

RadioStandard standard_from_string(std::string_view name) {
    if (name == "wpan") return RadioStandard::Wpan154;
    if (name == "wlan") return RadioStandard::Wlan80211;
    if (name == "oven") return RadioStandard::MicrowaveOven;
    throw ParameterError("unknown radio standard '" + std::string(name) + "'");
}

double channel_center_freq(RadioStandard standard, int index) {
    switch (standard) {
        case RadioStandard::Wpan154:
            if (index < kFirstWpanChannel || index > kLastWpanChannel)
                throw ParameterError("802.15.4 channel must lie in 11..26, got " + std::to_string(index));
            return 2405.0 + 5.0 * (index - kFirstWpanChannel);
        case RadioStandard::Wlan80211:
            if (index < 1 || index > 11)
                throw ParameterError("802.11 channel must lie in 1..11, got " + std::to_string(index));
            return 2412.0 + 5.0 * (index - 1);
        case RadioStandard::MicrowaveOven:
            if (index != 0) throw ParameterError("microwave oven has only channel 0");
            return 2450.0;
    }
    throw ParameterError("unknown radio standard");
}

ChannelSpec make_channel(RadioStandard standard, int index) {
    ChannelSpec c;
    c.standard = standard;
    c.index = index;
    c.center_mhz = channel_center_freq(standard, index);
    switch (standard) {
        case RadioStandard::Wpan154: c.occupied_bw_mhz = 2.0; break;
        case RadioStandard::Wlan80211: c.occupied_bw_mhz = 25.0; break;
        case RadioStandard::MicrowaveOven: c.occupied_bw_mhz = 20.0; break;
    }
    return c;
}

double spectral_overlap(const ChannelSpec& a, const ChannelSpec& b) {
    const double lo = std::max(a.center_mhz - a.occupied_bw_mhz / 2.0, b.center_mhz - b.occupied_bw_mhz / 2.0);
    const double hi = std::min(a.center_mhz + a.occupied_bw_mhz / 2.0, b.center_mhz + b.occupied_bw_mhz / 2.0);
    return std::max(0.0, hi - lo);
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(Material m) { return kMaterials[static_cast<std::size_t>(m)].name; }

Material material_from_string(std::string_view name) {
    for (const auto& entry : kMaterials) {
        if (entry.name == name) return entry.material;
    }
    throw ParameterError("unknown material '" + std::string(name) + "'");
}

MaterialTable::MaterialTable() {
    for (const auto& entry : kMaterials) props_[static_cast<std::size_t>(entry.material)] = entry.defaults;
}

void MaterialTable::set_loss(Material m, double loss_db) {
    if (!(loss_db >= 0.0)) throw ParameterError("material loss must be non-negative");
    props_[static_cast<std::size_t>(m)].loss_db = loss_db;
}

void MaterialTable::set(Material m, MaterialProperties p) {
    if (!(p.loss_db >= 0.0) || !(p.near_field_m >= 0.0)) throw ParameterError("material properties must be non-negative");
    props_[static_cast<std::size_t>(m)] = p;
}

Obstacle make_obstacle(Material m, std::variant<Segment, Disc> geometry, const MaterialTable& table) {
    const MaterialProperties& p = table.at(m);
    return Obstacle{m, geometry, p.loss_db, p.near_field_m};
}

bool attenuates(const Obstacle& o, Vec2 from, Vec2 to) {
    bool crossed = false;
    if (const auto* seg = std::get_if<Segment>(&o.geometry)) {
        crossed = segments_intersect(from, to, seg->a, seg->b);
    } else {
        const auto& disc = std::get<Disc>(o.geometry);
        crossed = point_segment_distance(disc.center, from, to) <= disc.radius;
    }
    if (!crossed) return false;
    if (o.near_field_m > 0.0) return distance_to(o, from) < o.near_field_m || distance_to(o, to) < o.near_field_m;
    return true;
}

std::vector<Obstacle> obstacles_crossed(std::span<const Obstacle> obstacles, Vec2 from, Vec2 to) {
    std::vector<Obstacle> out;
    for (const auto& o : obstacles) {
        if (attenuates(o, from, to)) out.push_back(o);
    }
    return out;
}

double distance_loss_db(double distance_m, double freq_mhz, double exponent) {
    if (!(distance_m > 0.0)) throw ParameterError("path distance must be positive");
    return 10.0 * exponent * std::log10(distance_m) + 20.0 * std::log10(freq_mhz) - 27.55;
}

double path_loss(double distance_m, std::span<const Obstacle> obstacles_crossed, double freq_mhz) {
    double loss = distance_loss_db(distance_m, freq_mhz);
    for (const auto& o : obstacles_crossed) loss += o.loss_db;
    return loss;
}

LinkBudget LinkBudget::make(double tx_power_dbm, double path_loss_db, double sensitivity_dbm) {
    LinkBudget b;
    b.tx_power_dbm = tx_power_dbm;
    b.path_loss_db = path_loss_db;
    b.rx_power_dbm = tx_power_dbm - path_loss_db;
    b.sensitivity_dbm = sensitivity_dbm;
    b.margin_db = b.rx_power_dbm - sensitivity_dbm;
    return b;
}

ReceivedInterferer receive(const Interferer& source, Vec2 receiver, std::span<const Obstacle> obstacles) {
    // Co-located emitters are treated as 10 cm away.
    const double d = std::max(distance(source.position, receiver), 0.1);
    double loss = distance_loss_db(d, source.channel.center_mhz, source.falloff_exponent);
    for (const auto& o : obstacles) {
        if (attenuates(o, source.position, receiver)) loss += o.loss_db;
    }
    return ReceivedInterferer{source.channel, source.tx_power_dbm - loss, source.activity_factor, source.enabled};
}

double emission_mask_db(const ChannelSpec& source, double offset_mhz, const InterferenceModel& model) {
    const double offset = std::abs(offset_mhz);
    switch (source.standard) {
        case RadioStandard::Wlan80211: return wlan_mask_db(offset);
        case RadioStandard::MicrowaveOven: return -std::min(40.0, model.oven_rolloff_db_per_mhz * offset);
        case RadioStandard::Wpan154: return offset < 1.0 ? 0.0 : -30.0;
    }
    return 0.0;
}

double power_factor(double isr_db, const InterferenceModel& model) {
    return 1.0 / (1.0 + std::exp(-(isr_db - model.isr_midpoint_db) / model.isr_slope_db));
}

double message_success_prob(const LinkBudget& link, const ChannelSpec& victim,
                            std::span<const ReceivedInterferer> interferers, const InterferenceModel& model) {
    if (link.margin_db < 0.0) return 0.0;
    double p = 1.0;
    for (const auto& i : interferers) {
        if (!i.enabled || i.activity_factor <= 0.0) continue;
        const double overlap = spectral_overlap(victim, i.channel) / victim.occupied_bw_mhz;
        if (overlap <= 0.0) continue;
        const double level =
            i.rx_power_dbm + emission_mask_db(i.channel, victim.center_mhz - i.channel.center_mhz, model);
        const double isr = level - link.rx_power_dbm;
        p *= 1.0 - std::clamp(i.activity_factor, 0.0, 1.0) * overlap * power_factor(isr, model);
    }
    return std::clamp(p, 0.0, 1.0);
}

LinkBudget link_budget(const RadioEnvironment& env, Vec2 tx, Vec2 rx, double tx_power_dbm, double freq_mhz) {
    const auto crossed = obstacles_crossed(env.obstacles, tx, rx);
    return LinkBudget::make(tx_power_dbm, path_loss(distance(tx, rx), crossed, freq_mhz), env.sensitivity_dbm);
}

double link_success_prob(const RadioEnvironment& env, Vec2 tx, Vec2 rx, double tx_power_dbm,
                         const ChannelSpec& victim, const InterferenceModel& model) {
    const LinkBudget budget = link_budget(env, tx, rx, tx_power_dbm, victim.center_mhz);
    std::vector<ReceivedInterferer> received;
    received.reserve(env.interferers.size());
    for (const auto& source : env.interferers) received.push_back(receive(source, rx, env.obstacles));
    return message_success_prob(budget, victim, received, model);
}

}  // namespace bsn
