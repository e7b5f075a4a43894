#include "bsn/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <json.hpp>

#include "bsn/channel_selector.hpp"
#include "bsn/classifier.hpp"
#include "bsn/energy.hpp"
#include "bsn/errors.hpp"
#include "bsn/motion.hpp"

namespace bsn {

using nlohmann::json;

namespace {

std::string pct(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", ratio * 100.0);
    return buf;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

json model_json(const InterferenceModel& m) {
    return {{"isr_midpoint_db", m.isr_midpoint_db},
            {"isr_slope_db", m.isr_slope_db},
            {"oven_rolloff_db_per_mhz", m.oven_rolloff_db_per_mhz}};
}

InterferenceModel model_from_json(const json& j) {
    InterferenceModel m;
    m.isr_midpoint_db = j.at("isr_midpoint_db").get<double>();
    m.isr_slope_db = j.at("isr_slope_db").get<double>();
    m.oven_rolloff_db_per_mhz = j.at("oven_rolloff_db_per_mhz").get<double>();
    return m;
}

json stats_json(const RunStats& s) {
    return {{"per_run_success", s.per_run_success},
            {"n_messages", s.n_messages},
            {"mean_ratio", s.mean_ratio},
            {"std_ratio", s.std_ratio}};
}

void run_echo(const Scenario& scenario, const ExperimentParams& p, ExperimentResult& out, json& summary) {
    EchoTestConfig cfg;
    cfg.channel = wpan_channel(p.channel.value_or(scenario.channel));
    cfg.tx_power_dbm = p.tx_power_dbm.value_or(scenario.tx_power_dbm);
    cfg.runs = p.runs;
    cfg.n_messages = p.messages;
    const LinkScenario link = scenario.link();
    const EchoResult r = run_echo_test(cfg, link, p.model, p.seed);
    summary["stats"] = stats_json(r.stats);
    summary["expected_ratio"] = expected_echo_ratio(cfg, link, p.model);
    summary["run_elapsed_s"] = r.run_elapsed_s;

    std::ostringstream table;
    table << "power_dbm,channel,mean_pct,std_pct\n"
          << fixed2(cfg.tx_power_dbm) << ',' << cfg.channel.index << ',' << pct(r.stats.mean_ratio) << ','
          << pct(r.stats.std_ratio) << '\n';
    out.files["echo.csv"] = table.str();

    std::ostringstream runs;
    std::ostringstream dat;
    runs << "run,successes,ratio\n";
    dat << "# run success_pct\n";
    for (std::size_t i = 0; i < r.stats.per_run_success.size(); ++i) {
        const double ratio = static_cast<double>(r.stats.per_run_success[i]) / static_cast<double>(cfg.n_messages);
        runs << i << ',' << r.stats.per_run_success[i] << ',' << ratio << '\n';
        dat << i << ' ' << ratio * 100.0 << '\n';
    }
    out.files["runs.csv"] = runs.str();
    out.files["runs.dat"] = dat.str();
}

void run_star(const Scenario& scenario, const ExperimentParams& p, ExperimentResult& out, json& summary) {
    std::vector<Vec2> positions = scenario.sensors;
    if (positions.empty()) positions.push_back(*scenario.remote);
    const ActivityKind kind = activity_from_string(p.activity);
    std::vector<StarNode> nodes;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        StarNode n;
        n.config.node_id = static_cast<std::uint8_t>(i + 1);
        n.position = positions[i];
        n.trace = generate_trace(kind, p.duration_s, kDefaultSampleRateHz, p.seed + i);
        nodes.push_back(std::move(n));
    }
    StarConfig cfg;
    cfg.channel = wpan_channel(p.channel.value_or(scenario.channel));
    cfg.tx_power_dbm = p.tx_power_dbm.value_or(scenario.tx_power_dbm);
    cfg.logger = *scenario.base;
    const StarResult r = run_star_network(nodes, cfg, scenario.environment(), p.model, p.seed);

    std::vector<SensorFrame> frames;
    for (const auto& f : r.log) frames.push_back(f.frame);
    std::ostringstream log;
    write_frame_log(log, frames);
    out.files["frames.bslog"] = log.str();
    std::ostringstream csv;
    write_frames_csv(csv, frames);
    out.files["frames.csv"] = csv.str();

    std::ostringstream delivery;
    delivery << "node_id,emitted,delivered,collided,lost_on_channel,ratio\n";
    json nodes_json = json::array();
    for (const auto& d : r.nodes) {
        delivery << int{d.node_id} << ',' << d.emitted << ',' << d.delivered << ',' << d.collided << ','
                 << d.lost_on_channel << ',' << d.stats.mean_ratio << '\n';
        nodes_json.push_back({{"node_id", d.node_id},
                              {"emitted", d.emitted},
                              {"delivered", d.delivered},
                              {"collided", d.collided},
                              {"lost_on_channel", d.lost_on_channel}});
    }
    out.files["delivery.csv"] = delivery.str();
    summary["nodes"] = nodes_json;
    summary["frames_logged"] = frames.size();
}

void run_classify(const ExperimentParams& p, ExperimentResult& out, json& summary) {
    const ActivityKind kind = activity_from_string(p.activity);
    const AccelTrace trace = generate_trace(kind, p.duration_s, kDefaultSampleRateHz, p.seed);
    const ClassifierConfig cfg;
    const auto events = detect_abnormal(trace, cfg);

    std::ostringstream ev;
    write_events_csv(ev, events);
    out.files["events.csv"] = ev.str();

    std::ostringstream windows;
    windows << "t_start,class\n";
    std::map<std::string, std::size_t> counts;
    const auto per_window = static_cast<std::size_t>(std::llround(cfg.window_s * trace.rate_hz));
    for (std::size_t i = 0; i + per_window <= trace.samples.size(); i += per_window) {
        const auto c = classify_window(std::span(trace.samples).subspan(i, per_window), cfg);
        windows << trace.samples[i].t << ',' << to_string(c) << '\n';
        ++counts[std::string(to_string(c))];
    }
    out.files["windows.csv"] = windows.str();

    std::ostringstream tr;
    write_trace_csv(tr, trace);
    out.files["trace.csv"] = tr.str();
    std::ostringstream dat;
    dat << "# t total_g\n";
    for (const auto& s : trace.samples) dat << s.t << ' ' << total_acceleration(s) << '\n';
    out.files["total_accel.dat"] = dat.str();

    summary["abnormal_events"] = events.size();
    summary["window_classes"] = counts;
}

void run_energy(const ExperimentParams& p, ExperimentResult& out, json& summary) {
    const auto parts = wearable_components_no_sleep();
    const DutyProfile continuous{{kAccelerometer, 1.0}, {kMicrocontroller, 1.0}, {kTransceiver, 1.0}};
    const DutyProfile radio_tenth{{kAccelerometer, 1.0}, {kMicrocontroller, 1.0}, {kTransceiver, 0.1}};
    const std::pair<const char*, Battery> batteries[] = {{"li_ion_pack", li_ion_pack()}, {"lir3048", lir3048_cell()}};
    const std::pair<const char*, const DutyProfile*> profiles[] = {{"continuous", &continuous},
                                                                   {"radio_10pct", &radio_tenth}};

    std::ostringstream life;
    life.precision(9);
    life << "profile,battery,capacity_mah,avg_ma,life_h\n";
    json rows = json::array();
    for (const auto& [pname, duty] : profiles) {
        for (const auto& [bname, battery] : batteries) {
            const double avg = average_current(parts, *duty);
            const double hours = battery_life_hours(battery, parts, *duty);
            life << pname << ',' << bname << ',' << battery.capacity_mah << ',' << avg << ',' << hours << '\n';
            rows.push_back({{"profile", pname}, {"battery", bname}, {"avg_ma", avg}, {"life_h", hours}});
        }
    }
    out.files["battery_life.csv"] = life.str();
    summary["battery_life"] = rows;

    const ActivityKind kind = activity_from_string(p.activity);
    const AccelTrace trace = generate_trace(kind, p.duration_s, kDefaultSampleRateHz, p.seed);
    const NodeRun run = run_node(initial_state(SensorConfig{}), trace);
    const EnergyReport report = simulate_energy(run.timeline, wearable_components(), li_ion_pack());
    std::ostringstream csv;
    write_energy_csv(csv, report);
    out.files["energy.csv"] = csv.str();
    summary["trace_consumed_mah"] = report.consumed_mah;
    summary["trace_projected_life_h"] = report.projected_life_h;
}

void run_scan(const Scenario& scenario, const ExperimentParams& p, ExperimentResult& out, json& summary) {
    const VictimLink link{*scenario.base, *scenario.remote, p.tx_power_dbm.value_or(scenario.tx_power_dbm)};
    const ScanReport report = scan(scenario.environment(), link, p.model);
    std::ostringstream csv;
    write_scan_csv(csv, report);
    out.files["scan.csv"] = csv.str();
    std::ostringstream dat;
    dat << "# channel score\n";
    for (int ch = kFirstWpanChannel; ch <= kLastWpanChannel; ++ch) dat << ch << ' ' << report.score(ch) << '\n';
    out.files["scan.dat"] = dat.str();
    summary["selected_channel"] = select_channel(report);
    summary["scores"] = report.scores;
}

json params_json(const ExperimentParams& p) {
    json j{{"runs", p.runs},
           {"messages", p.messages},
           {"seed", p.seed},
           {"model", model_json(p.model)},
           {"activity", p.activity},
           {"duration_s", p.duration_s}};
    j["channel"] = p.channel ? json(*p.channel) : json(nullptr);
    j["tx_power_dbm"] = p.tx_power_dbm ? json(*p.tx_power_dbm) : json(nullptr);
    return j;
}

ExperimentParams params_from_json(const json& j) {
    ExperimentParams p;
    p.runs = j.at("runs").get<std::size_t>();
    p.messages = j.at("messages").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.model = model_from_json(j.at("model"));
    p.activity = j.at("activity").get<std::string>();
    p.duration_s = j.at("duration_s").get<double>();
    if (!j.at("channel").is_null()) p.channel = j.at("channel").get<int>();
    if (!j.at("tx_power_dbm").is_null()) p.tx_power_dbm = j.at("tx_power_dbm").get<double>();
    return p;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Echo: return "echo";
        case ExperimentKind::Star: return "star";
        case ExperimentKind::Classify: return "classify";
        case ExperimentKind::Energy: return "energy";
        case ExperimentKind::Scan: return "scan";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
    for (auto k : {ExperimentKind::Echo, ExperimentKind::Star, ExperimentKind::Classify, ExperimentKind::Energy,
                   ExperimentKind::Scan}) {
        if (to_string(k) == name) return k;
    }
    throw ParameterError("unknown experiment kind '" + std::string(name) + "'");
}

ExperimentResult run_experiment(ExperimentKind kind, const Scenario& scenario, const ExperimentParams& params) {
    validate(scenario);
    ExperimentResult out;
    out.scenario = scenario.name;
    out.kind = kind;
    out.seed = params.seed;

    const json config{{"kind", to_string(kind)},
                      {"scenario", serialize_scenario(scenario)},
                      {"params", params_json(params)}};
    out.config_json = config.dump(2);

    json summary{{"scenario", scenario.name}, {"kind", to_string(kind)}, {"seed", params.seed}};
    try {
        switch (kind) {
            case ExperimentKind::Echo: run_echo(scenario, params, out, summary); break;
            case ExperimentKind::Star: run_star(scenario, params, out, summary); break;
            case ExperimentKind::Classify: run_classify(params, out, summary); break;
            case ExperimentKind::Energy: run_energy(params, out, summary); break;
            case ExperimentKind::Scan: run_scan(scenario, params, out, summary); break;
        }
    } catch (const ParameterError& e) {
        throw ParameterError("scenario '" + scenario.name + "', " + std::string(to_string(kind)) + ": " + e.what());
    } catch (const ScenarioError& e) {
        throw ScenarioError("scenario '" + scenario.name + "', " + std::string(to_string(kind)) + ": " + e.what());
    }
    out.summary_json = summary.dump(2);
    return out;
}

ExperimentResult rerun(const std::string& config_json) {
    const json config = json::parse(config_json);
    const Scenario scenario = parse_scenario(config.at("scenario").get<std::string>());
    return run_experiment(experiment_kind_from_string(config.at("kind").get<std::string>()), scenario,
                          params_from_json(config.at("params")));
}

void write_result(const ExperimentResult& result, const std::filesystem::path& dir) {
    const json doc{{"config", json::parse(result.config_json)}, {"result", json::parse(result.summary_json)}};
    for (const auto& [name, contents] : result.files) write_file_atomic(dir / name, contents);
    write_file_atomic(dir / "result.json", doc.dump(2) + "\n");
}

std::vector<TableTarget> parse_targets(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t line_no = 0;
    std::vector<TableTarget> out;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "table,scenario,channel,power_dbm,disabled,mean_pct,std_pct,role")
                throw ParseError(line_no, "unexpected targets header");
            header = true;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 8) throw ParseError(line_no, "expected 8 columns");
        TableTarget t;
        try {
            t.table = cells[0];
            t.scenario = cells[1];
            t.channel = std::stoi(cells[2]);
            t.power_dbm = std::stod(cells[3]);
            t.disabled = cells[4] == "-" ? "" : cells[4];
            t.mean_pct = std::stod(cells[5]);
            t.std_pct = std::stod(cells[6]);
        } catch (const std::logic_error&) {
            throw ParseError(line_no, "malformed number");
        }
        if (cells[7] != "fit" && cells[7] != "holdout") throw ParseError(line_no, "role must be fit or holdout");
        t.holdout = cells[7] == "holdout";
        out.push_back(t);
    }
    if (!header) throw ParseError(line_no, "targets file is empty");
    return out;
}

Scenario target_scenario(const TableTarget& target) {
    Scenario s = load_scenario(target.scenario);
    if (!target.disabled.empty()) s = s.with_disabled(target.disabled);
    s.channel = target.channel;
    s.tx_power_dbm = target.power_dbm;
    return s;
}

std::vector<TableRow> reproduce_tables(std::span<const TableTarget> targets, const InterferenceModel& model,
                                       std::size_t runs, std::size_t messages, std::uint64_t seed) {
    std::vector<TableRow> rows;
    for (const auto& t : targets) {
        const Scenario s = target_scenario(t);
        EchoTestConfig cfg;
        cfg.channel = wpan_channel(t.channel);
        cfg.tx_power_dbm = t.power_dbm;
        cfg.runs = runs;
        cfg.n_messages = messages;
        const LinkScenario link = s.link();
        rows.push_back({t, run_echo_test(cfg, link, model, seed + rows.size()).stats, 100.0 * expected_echo_ratio(cfg, link, model)});
    }
    return rows;
}

std::string export_table(std::span<const TableRow> rows) {
    std::ostringstream out;
    out << "table,power_dbm,channel,condition,mean_pct,std_pct,expected_pct,target_mean_pct,target_std_pct\n";
    for (const auto& r : rows) {
        bool switchable = false;
        for (const auto& other : rows) switchable = switchable || (other.target.table == r.target.table &&
                                                                  !other.target.disabled.empty());
        const char* condition = !switchable ? "-" : r.target.disabled.empty() ? "ON" : "OFF";
        out << r.target.table << ',' << fixed2(r.target.power_dbm) << ',' << r.target.channel << ',' << condition
            << ',' << pct(r.stats.mean_ratio) << ',' << pct(r.stats.std_ratio) << ',' << fixed2(r.expected_pct) << ','
            << fixed2(r.target.mean_pct)
            << ',' << fixed2(r.target.std_pct) << '\n';
    }
    return out.str();
}

namespace {

struct FitData {
    std::vector<std::pair<LinkScenario, EchoTestConfig>> links;
    std::vector<double> targets;
};

InterferenceModel unpack(const gsl_vector* x) {
    InterferenceModel m;
    m.isr_midpoint_db = gsl_vector_get(x, 0);
    m.isr_slope_db = std::exp(gsl_vector_get(x, 1));
    m.oven_rolloff_db_per_mhz = std::exp(gsl_vector_get(x, 2));
    return m;
}

double fit_cost(const gsl_vector* x, void* params) {
    const auto& data = *static_cast<const FitData*>(params);
    const InterferenceModel m = unpack(x);
    double cost = 0.0;
    for (std::size_t i = 0; i < data.links.size(); ++i) {
        const double e = 100.0 * expected_echo_ratio(data.links[i].second, data.links[i].first, m) - data.targets[i];
        cost += e * e;
    }
    return cost;
}

}  // namespace

CalibrationResult calibrate(std::span<const TableTarget> targets, const InterferenceModel& start) {
    if (!(start.isr_slope_db > 0.0) || !(start.oven_rolloff_db_per_mhz > 0.0))
        throw ParameterError("calibration start needs a positive slope and roll-off");
    FitData data;
    for (const auto& t : targets) {
        if (t.holdout) continue;
        EchoTestConfig cfg;
        cfg.channel = wpan_channel(t.channel);
        cfg.tx_power_dbm = t.power_dbm;
        data.links.emplace_back(target_scenario(t).link(), cfg);
        data.targets.push_back(t.mean_pct);
    }
    if (data.links.empty()) throw ParameterError("no calibration targets marked for fitting");

    gsl_multimin_function fn{&fit_cost, 3, &data};
    gsl_vector* x = gsl_vector_alloc(3);
    gsl_vector* step = gsl_vector_alloc(3);
    gsl_vector_set(x, 0, start.isr_midpoint_db);
    gsl_vector_set(x, 1, std::log(start.isr_slope_db));
    gsl_vector_set(x, 2, std::log(start.oven_rolloff_db_per_mhz));
    gsl_vector_set(step, 0, 1.0);
    gsl_vector_set(step, 1, 0.2);
    gsl_vector_set(step, 2, 0.2);
    gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
    gsl_multimin_fminimizer_set(solver, &fn, x, step);

    CalibrationResult result;
    int status = GSL_CONTINUE;
    while (status == GSL_CONTINUE && result.iterations < 5000) {
        ++result.iterations;
        if (gsl_multimin_fminimizer_iterate(solver) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-7);
    }
    result.converged = status == GSL_SUCCESS;
    result.model = unpack(solver->x);
    result.rms_error_pct = std::sqrt(solver->fval / static_cast<double>(data.links.size()));
    gsl_multimin_fminimizer_free(solver);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return result;
}

}  // namespace bsn
