#include "bsn/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bsn/errors.hpp"

namespace bsn {

namespace detail {
struct PresetEntry {
    const char* name;
    const char* text;
};
extern const PresetEntry kPresets[];
extern const std::size_t kPresetCount;
}  // namespace detail

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

double to_double(std::string_view w, std::size_t line, std::string_view key) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || ptr != w.data() + w.size() || !std::isfinite(v))
        throw ParseError(line, "'" + std::string(key) + "' expects a number, got '" + std::string(w) + "'");
    return v;
}

std::vector<double> numbers(std::string_view value, std::size_t count, std::size_t line, std::string_view key) {
    const auto ws = words(value);
    if (ws.size() != count)
        throw ParseError(line, "'" + std::string(key) + "' expects " + std::to_string(count) + " numbers");
    std::vector<double> out;
    for (auto w : ws) out.push_back(to_double(w, line, key));
    return out;
}

int to_int(std::string_view w, std::size_t line, std::string_view key) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || ptr != w.data() + w.size())
        throw ParseError(line, "'" + std::string(key) + "' expects an integer, got '" + std::string(w) + "'");
    return v;
}

bool to_bool(std::string_view w, std::size_t line, std::string_view key) {
    if (w == "true" || w == "yes" || w == "1") return true;
    if (w == "false" || w == "no" || w == "0") return false;
    throw ParseError(line, "'" + std::string(key) + "' expects true or false");
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

enum class Section { Top, Materials, Node, Obstacle, Interferer };

struct PendingObstacle {
    std::size_t line = 0;
    std::optional<Material> material;
    std::optional<std::variant<Segment, Disc>> geometry;
    std::optional<double> loss_db;
    std::optional<double> near_field_m;
};

struct PendingInterferer {
    std::size_t line = 0;
    Interferer value;
    std::optional<RadioStandard> standard;
    std::optional<int> channel;
    bool has_position = false;
    bool has_activity = false;
};

struct PendingNode {
    std::size_t line = 0;
    std::string role;
    std::optional<Vec2> position;
};

Vec2 to_vec(std::string_view value, std::size_t line, std::string_view key) {
    const auto v = numbers(value, 2, line, key);
    return {v[0], v[1]};
}

}  // namespace

RadioEnvironment Scenario::environment() const { return RadioEnvironment{obstacles, interferers, sensitivity_dbm}; }

LinkScenario Scenario::link() const { return LinkScenario{environment(), base, remote}; }

Scenario Scenario::with_disabled(std::string_view interferer_name) const {
    Scenario copy = *this;
    bool found = false;
    for (auto& i : copy.interferers) {
        if (i.name == interferer_name) {
            i.enabled = false;
            found = true;
        }
    }
    if (!found) throw ScenarioError("scenario '" + name + "' has no interferer '" + std::string(interferer_name) + "'");
    return copy;
}

void validate(const Scenario& s) {
    const std::string where = "scenario '" + s.name + "': ";
    if (!s.base) throw ScenarioError(where + "missing base node");
    if (!s.remote) throw ScenarioError(where + "missing remote node");
    if (s.channel < kFirstWpanChannel || s.channel > kLastWpanChannel)
        throw ScenarioError(where + "channel must lie in 11..26");
    if (!std::isfinite(s.tx_power_dbm) || !std::isfinite(s.sensitivity_dbm))
        throw ScenarioError(where + "power levels must be finite");
    for (const auto& o : s.obstacles) {
        if (!(o.loss_db >= 0.0) || !(o.near_field_m >= 0.0))
            throw ScenarioError(where + "obstacle loss and near field must be non-negative");
        if (const auto* d = std::get_if<Disc>(&o.geometry); d && !(d->radius > 0.0))
            throw ScenarioError(where + "disc radius must be positive");
    }
    for (const auto& i : s.interferers) {
        if (!(i.activity_factor >= 0.0 && i.activity_factor <= 1.0))
            throw ScenarioError(where + "interferer '" + i.name + "' activity factor outside [0, 1]");
        if (!(i.falloff_exponent > 0.0))
            throw ScenarioError(where + "interferer '" + i.name + "' falloff exponent must be positive");
        try {
            const ChannelSpec expect = make_channel(i.channel.standard, i.channel.index);
            if (!(expect == i.channel)) throw ScenarioError(where + "interferer '" + i.name + "' has a bad channel");
        } catch (const ParameterError& e) {
            throw ScenarioError(where + "interferer '" + i.name + "': " + e.what());
        }
    }
}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    std::vector<PendingObstacle> obstacles;
    std::vector<PendingInterferer> interferers;
    std::vector<PendingNode> nodes;
    Section section = Section::Top;
    bool any_content = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        any_content = true;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            const auto head = words(line.substr(1, line.size() - 2));
            if (head.empty()) throw ParseError(line_no, "empty section header");
            if (head[0] == "materials" && head.size() == 1) {
                section = Section::Materials;
            } else if (head[0] == "node" && head.size() == 2) {
                if (head[1] != "base" && head[1] != "remote" && head[1] != "sensor")
                    throw ParseError(line_no, "node role must be base, remote or sensor");
                section = Section::Node;
                nodes.push_back({line_no, std::string(head[1]), std::nullopt});
            } else if (head[0] == "obstacle" && head.size() == 1) {
                section = Section::Obstacle;
                obstacles.push_back({});
                obstacles.back().line = line_no;
            } else if (head[0] == "interferer" && head.size() == 2) {
                section = Section::Interferer;
                interferers.push_back({});
                interferers.back().line = line_no;
                interferers.back().value.name = std::string(head[1]);
            } else {
                throw ParseError(line_no, "unknown section '" + std::string(line) + "'");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError(line_no, "expected 'key = value'");
        const auto single = [&] {
            const auto ws = words(value);
            if (ws.size() != 1) throw ParseError(line_no, "'" + std::string(key) + "' expects one value");
            return ws[0];
        };

        switch (section) {
            case Section::Top:
                if (key == "name") s.name = std::string(value);
                else if (key == "channel") s.channel = to_int(single(), line_no, key);
                else if (key == "tx_power_dbm") s.tx_power_dbm = to_double(single(), line_no, key);
                else if (key == "sensitivity_dbm") s.sensitivity_dbm = to_double(single(), line_no, key);
                else throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
                break;
            case Section::Materials: {
                Material m{};
                try {
                    m = material_from_string(key);
                } catch (const ParameterError& e) {
                    throw ParseError(line_no, e.what());
                }
                const auto ws = words(value);
                if (ws.empty() || ws.size() > 2) throw ParseError(line_no, "material expects 'loss [near_field]'");
                MaterialProperties p = s.materials.at(m);
                p.loss_db = to_double(ws[0], line_no, key);
                if (ws.size() == 2) p.near_field_m = to_double(ws[1], line_no, key);
                try {
                    s.materials.set(m, p);
                } catch (const ParameterError& e) {
                    throw ParseError(line_no, e.what());
                }
                break;
            }
            case Section::Node:
                if (key != "position") throw ParseError(line_no, "unknown node key '" + std::string(key) + "'");
                nodes.back().position = to_vec(value, line_no, key);
                break;
            case Section::Obstacle: {
                auto& o = obstacles.back();
                if (key == "material") {
                    try {
                        o.material = material_from_string(single());
                    } catch (const ParameterError& e) {
                        throw ParseError(line_no, e.what());
                    }
                } else if (key == "segment") {
                    const auto v = numbers(value, 4, line_no, key);
                    o.geometry = Segment{{v[0], v[1]}, {v[2], v[3]}};
                } else if (key == "disc") {
                    const auto v = numbers(value, 3, line_no, key);
                    o.geometry = Disc{{v[0], v[1]}, v[2]};
                } else if (key == "loss_db") {
                    o.loss_db = to_double(single(), line_no, key);
                } else if (key == "near_field_m") {
                    o.near_field_m = to_double(single(), line_no, key);
                } else {
                    throw ParseError(line_no, "unknown obstacle key '" + std::string(key) + "'");
                }
                break;
            }
            case Section::Interferer: {
                auto& i = interferers.back();
                if (key == "standard") {
                    try {
                        i.standard = standard_from_string(single());
                    } catch (const ParameterError& e) {
                        throw ParseError(line_no, e.what());
                    }
                } else if (key == "channel") {
                    i.channel = to_int(single(), line_no, key);
                } else if (key == "position") {
                    i.value.position = to_vec(value, line_no, key);
                    i.has_position = true;
                } else if (key == "tx_power_dbm") {
                    i.value.tx_power_dbm = to_double(single(), line_no, key);
                } else if (key == "activity_factor") {
                    i.value.activity_factor = to_double(single(), line_no, key);
                    i.has_activity = true;
                } else if (key == "falloff_exponent") {
                    i.value.falloff_exponent = to_double(single(), line_no, key);
                } else if (key == "enabled") {
                    i.value.enabled = to_bool(single(), line_no, key);
                } else {
                    throw ParseError(line_no, "unknown interferer key '" + std::string(key) + "'");
                }
                break;
            }
        }
    }
    if (!any_content) throw ParseError(line_no, "scenario is empty");

    for (const auto& n : nodes) {
        if (!n.position) throw ParseError(n.line, "node '" + n.role + "' has no position");
        if (n.role == "base") {
            if (s.base) throw ParseError(n.line, "duplicate base node");
            s.base = n.position;
        } else if (n.role == "remote") {
            if (s.remote) throw ParseError(n.line, "duplicate remote node");
            s.remote = n.position;
        } else {
            s.sensors.push_back(*n.position);
        }
    }
    for (const auto& o : obstacles) {
        if (!o.material) throw ParseError(o.line, "obstacle has no material");
        if (!o.geometry) throw ParseError(o.line, "obstacle needs a segment or a disc");
        Obstacle built = make_obstacle(*o.material, *o.geometry, s.materials);
        if (o.loss_db) built.loss_db = *o.loss_db;
        if (o.near_field_m) built.near_field_m = *o.near_field_m;
        s.obstacles.push_back(built);
    }
    for (auto& i : interferers) {
        if (!i.standard) throw ParseError(i.line, "interferer '" + i.value.name + "' has no standard");
        if (!i.channel) throw ParseError(i.line, "interferer '" + i.value.name + "' has no channel");
        if (!i.has_position) throw ParseError(i.line, "interferer '" + i.value.name + "' has no position");
        if (!i.has_activity) throw ParseError(i.line, "interferer '" + i.value.name + "' has no activity_factor");
        try {
            i.value.channel = make_channel(*i.standard, *i.channel);
        } catch (const ParameterError& e) {
            throw ParseError(i.line, e.what());
        }
        s.interferers.push_back(i.value);
    }
    validate(s);
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    if (!s.name.empty()) out << "name = " << s.name << '\n';
    out << "channel = " << s.channel << '\n';
    out << "tx_power_dbm = " << num(s.tx_power_dbm) << '\n';
    out << "sensitivity_dbm = " << num(s.sensitivity_dbm) << '\n';

    const MaterialTable defaults;
    bool header = false;
    for (Material m : kAllMaterials) {
        if (s.materials.at(m) == defaults.at(m)) continue;
        if (!header) out << "\n[materials]\n";
        header = true;
        out << to_string(m) << " = " << num(s.materials.at(m).loss_db) << ' ' << num(s.materials.at(m).near_field_m)
            << '\n';
    }

    const auto node = [&](const char* role, Vec2 p) {
        out << "\n[node " << role << "]\nposition = " << num(p.x) << ' ' << num(p.y) << '\n';
    };
    if (s.base) node("base", *s.base);
    if (s.remote) node("remote", *s.remote);
    for (const auto& p : s.sensors) node("sensor", p);

    for (const auto& o : s.obstacles) {
        out << "\n[obstacle]\nmaterial = " << to_string(o.material) << '\n';
        if (const auto* seg = std::get_if<Segment>(&o.geometry)) {
            out << "segment = " << num(seg->a.x) << ' ' << num(seg->a.y) << ' ' << num(seg->b.x) << ' '
                << num(seg->b.y) << '\n';
        } else {
            const auto& d = std::get<Disc>(o.geometry);
            out << "disc = " << num(d.center.x) << ' ' << num(d.center.y) << ' ' << num(d.radius) << '\n';
        }
        out << "loss_db = " << num(o.loss_db) << "\nnear_field_m = " << num(o.near_field_m) << '\n';
    }

    for (const auto& i : s.interferers) {
        out << "\n[interferer " << i.name << "]\n";
        out << "standard = " << to_string(i.channel.standard) << '\n';
        out << "channel = " << i.channel.index << '\n';
        out << "position = " << num(i.position.x) << ' ' << num(i.position.y) << '\n';
        out << "tx_power_dbm = " << num(i.tx_power_dbm) << '\n';
        out << "activity_factor = " << num(i.activity_factor) << '\n';
        out << "falloff_exponent = " << num(i.falloff_exponent) << '\n';
        out << "enabled = " << (i.enabled ? "true" : "false") << '\n';
    }
    return out.str();
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < detail::kPresetCount; ++i) names.emplace_back(detail::kPresets[i].name);
    return names;
}

std::optional<std::string_view> preset_text(std::string_view name) {
    for (std::size_t i = 0; i < detail::kPresetCount; ++i) {
        if (name == detail::kPresets[i].name) return std::string_view(detail::kPresets[i].text);
    }
    return std::nullopt;
}

Scenario load_scenario(const std::string& path_or_preset) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(path_or_preset, ec)) return parse_scenario(read_file(path_or_preset));
    if (const auto text = preset_text(path_or_preset)) return parse_scenario(*text);
    throw ScenarioError("no scenario file or preset named '" + path_or_preset + "'");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string serialize_calibration(const InterferenceModel& model) {
    std::ostringstream out;
    out << "[interference_model]\n";
    out << "isr_midpoint_db = " << num(model.isr_midpoint_db) << '\n';
    out << "isr_slope_db = " << num(model.isr_slope_db) << '\n';
    out << "oven_rolloff_db_per_mhz = " << num(model.oven_rolloff_db_per_mhz) << '\n';
    return out.str();
}

InterferenceModel parse_calibration(std::string_view text) {
    InterferenceModel model;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line == "[interference_model]") {
            header = true;
            continue;
        }
        if (!header) throw ParseError(line_no, "expected [interference_model]");
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const double v = to_double(trim(line.substr(eq + 1)), line_no, key);
        if (key == "isr_midpoint_db") model.isr_midpoint_db = v;
        else if (key == "isr_slope_db") model.isr_slope_db = v;
        else if (key == "oven_rolloff_db_per_mhz") model.oven_rolloff_db_per_mhz = v;
        else throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    }
    if (!header) throw ParseError(line_no, "calibration file is empty");
    if (!(model.isr_slope_db > 0.0) || !(model.oven_rolloff_db_per_mhz >= 0.0))
        throw ParseError(line_no, "slope must be positive and roll-off non-negative");
    return model;
}

}  // namespace bsn
