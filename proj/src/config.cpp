#include "omc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "omc/errors.hpp"

namespace omc {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) {
            fail(path.empty() ? key : path + "." + key, "unknown field");
        }
    }
}

double get_number(const json& obj, const std::string& path, const char* key, double& target) {
    if (obj.contains(key)) {
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(path.empty() ? std::string(key) : path + "." + key, "expected a number");
        }
        target = v.get<double>();
    }
    return target;
}

ReceiverParams table1_receiver_common() {
    ReceiverParams rx;
    rx.reference_resistance = 302.8;
    rx.sensitivity_slope = -1.03;
    rx.sensitivity_intercept = 0.40;
    rx.circuit_voltage = 5.0;
    rx.load_resistance = 20000.0;
    rx.noise_kappa = 0.01;
    rx.clean_air_ratio = 60.0;
    rx.molar_mass = 46.07;  // ethanol
    rx.concentration_floor = 1e-6;
    return rx;
}

ChannelParams table1_channel_common() {
    ChannelParams ch;
    ch.released_mol = 0.32;
    ch.diffusivity = 0.05;
    ch.flow_speed = 5.0;
    ch.source_height = 0.125;
    ch.half_width = 0.125;
    return ch;
}

}  // namespace

ScenarioConfig preset_table1_bounded() {
    ScenarioConfig cfg;
    cfg.channel = table1_channel_common();
    cfg.channel.geometry = Geometry::BoundedSquare;
    cfg.receiver = table1_receiver_common();
    cfg.receiver.tau_rise = 0.23;
    cfg.receiver.tau_decay = 30.0;
    cfg.receiver_position = {1.10, 0.0, 0.0};
    cfg.schedule = make_regular_schedule(1, 0.0, PulseShape{1.0});
    cfg.grid.dt = 0.01;
    cfg.grid.t_end = 0.0;  // filled by the default rule below
    cfg.seed = 1;
    cfg.grid.t_end = cfg.schedule.starts.back() + cfg.schedule.symbol_period +
                     5.0 * cfg.receiver.tau_decay;
    return cfg;
}

ScenarioConfig preset_table1_unbounded() {
    ScenarioConfig cfg = preset_table1_bounded();
    cfg.channel.geometry = Geometry::Unbounded;
    cfg.receiver.tau_rise = 0.05;
    cfg.receiver.tau_decay = 45.0;
    cfg.grid.t_end = cfg.schedule.starts.back() + cfg.schedule.symbol_period +
                     5.0 * cfg.receiver.tau_decay;
    return cfg;
}

ScenarioConfig load_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!root.is_object()) {
        throw ParseError("config: top level must be a JSON object");
    }
    check_keys(root, "", {"defaults", "channel", "receiver", "receiver_position", "schedule",
                          "grid", "seed", "align_max_lag_s", "oracle"});

    ScenarioConfig cfg;
    bool explicit_t_end = false;
    if (root.contains("defaults")) {
        const std::string preset = root.at("defaults").is_string()
                                       ? root.at("defaults").get<std::string>()
                                       : std::string();
        if (preset == "table1_bounded") {
            cfg = preset_table1_bounded();
        } else if (preset == "table1_unbounded") {
            cfg = preset_table1_unbounded();
        } else {
            fail("defaults", "expected \"table1_bounded\" or \"table1_unbounded\"");
        }
    }

    if (root.contains("channel")) {
        const json& ch = root.at("channel");
        if (!ch.is_object()) {
            fail("channel", "expected an object");
        }
        check_keys(ch, "channel",
                   {"geometry", "released_amount_mol", "diffusivity_m2_per_s",
                    "flow_speed_m_per_s", "source_height_m", "half_width_m"});
        if (ch.contains("geometry")) {
            const std::string g = ch.at("geometry").is_string()
                                      ? ch.at("geometry").get<std::string>()
                                      : std::string();
            if (g == "unbounded") {
                cfg.channel.geometry = Geometry::Unbounded;
            } else if (g == "bounded_square") {
                cfg.channel.geometry = Geometry::BoundedSquare;
            } else {
                fail("channel.geometry", "expected \"unbounded\" or \"bounded_square\"");
            }
        }
        get_number(ch, "channel", "released_amount_mol", cfg.channel.released_mol);
        get_number(ch, "channel", "diffusivity_m2_per_s", cfg.channel.diffusivity);
        get_number(ch, "channel", "flow_speed_m_per_s", cfg.channel.flow_speed);
        get_number(ch, "channel", "source_height_m", cfg.channel.source_height);
        get_number(ch, "channel", "half_width_m", cfg.channel.half_width);
    }

    if (root.contains("receiver")) {
        const json& rx = root.at("receiver");
        if (!rx.is_object()) {
            fail("receiver", "expected an object");
        }
        check_keys(rx, "receiver",
                   {"reference_resistance_ohm", "sensitivity_slope", "sensitivity_intercept",
                    "circuit_voltage_v", "load_resistance_ohm", "tau_rise_s", "tau_decay_s",
                    "noise_kappa", "clean_air_ratio", "molar_mass_g_per_mol",
                    "concentration_floor_mg_per_l"});
        get_number(rx, "receiver", "reference_resistance_ohm", cfg.receiver.reference_resistance);
        get_number(rx, "receiver", "sensitivity_slope", cfg.receiver.sensitivity_slope);
        get_number(rx, "receiver", "sensitivity_intercept", cfg.receiver.sensitivity_intercept);
        get_number(rx, "receiver", "circuit_voltage_v", cfg.receiver.circuit_voltage);
        get_number(rx, "receiver", "load_resistance_ohm", cfg.receiver.load_resistance);
        get_number(rx, "receiver", "tau_rise_s", cfg.receiver.tau_rise);
        get_number(rx, "receiver", "tau_decay_s", cfg.receiver.tau_decay);
        get_number(rx, "receiver", "noise_kappa", cfg.receiver.noise_kappa);
        get_number(rx, "receiver", "clean_air_ratio", cfg.receiver.clean_air_ratio);
        get_number(rx, "receiver", "molar_mass_g_per_mol", cfg.receiver.molar_mass);
        get_number(rx, "receiver", "concentration_floor_mg_per_l",
                   cfg.receiver.concentration_floor);
    }

    if (root.contains("receiver_position")) {
        const json& p = root.at("receiver_position");
        if (!p.is_object()) {
            fail("receiver_position", "expected an object");
        }
        check_keys(p, "receiver_position", {"x_m", "y_m", "z_m"});
        get_number(p, "receiver_position", "x_m", cfg.receiver_position.x);
        get_number(p, "receiver_position", "y_m", cfg.receiver_position.y);
        get_number(p, "receiver_position", "z_m", cfg.receiver_position.z);
    }

    if (root.contains("schedule")) {
        const json& s = root.at("schedule");
        if (!s.is_object()) {
            fail("schedule", "expected an object");
        }
        check_keys(s, "schedule", {"pulse_duration_s", "count", "symbol_period_s", "starts_s"});
        get_number(s, "schedule", "pulse_duration_s", cfg.schedule.pulse.duration);
        if (s.contains("starts_s")) {
            if (s.contains("count") || s.contains("symbol_period_s")) {
                fail("schedule.starts_s", "give either explicit starts or count/symbol_period_s");
            }
            if (!s.at("starts_s").is_array()) {
                fail("schedule.starts_s", "expected an array of numbers");
            }
            cfg.schedule.starts.clear();
            for (const auto& v : s.at("starts_s")) {
                if (!v.is_number()) {
                    fail("schedule.starts_s", "expected an array of numbers");
                }
                cfg.schedule.starts.push_back(v.get<double>());
            }
            cfg.schedule.symbol_period = 0.0;
        } else if (s.contains("count") || s.contains("symbol_period_s")) {
            double count_d = static_cast<double>(cfg.schedule.starts.size());
            get_number(s, "schedule", "count", count_d);
            if (count_d < 1.0 || count_d != std::floor(count_d)) {
                fail("schedule.count", "expected a positive integer");
            }
            double period = cfg.schedule.symbol_period;
            get_number(s, "schedule", "symbol_period_s", period);
            cfg.schedule = make_regular_schedule(static_cast<std::size_t>(count_d), period,
                                                 cfg.schedule.pulse);
        }
    }

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        if (!g.is_object()) {
            fail("grid", "expected an object");
        }
        check_keys(g, "grid", {"dt_s", "t_end_s"});
        get_number(g, "grid", "dt_s", cfg.grid.dt);
        if (g.contains("t_end_s")) {
            get_number(g, "grid", "t_end_s", cfg.grid.t_end);
            explicit_t_end = true;
        }
    }

    if (root.contains("seed")) {
        const json& s = root.at("seed");
        if (!s.is_number_unsigned()) {
            fail("seed", "expected an unsigned integer");
        }
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("align_max_lag_s")) {
        get_number(root, "", "align_max_lag_s", cfg.align_max_lag);
        if (cfg.align_max_lag < 0.0) {
            fail("align_max_lag_s", "must be >= 0");
        }
    }

    if (root.contains("oracle")) {
        const json& o = root.at("oracle");
        if (!o.is_object()) {
            fail("oracle", "expected an object");
        }
        check_keys(o, "oracle", {"n_particles", "dt_s", "y_bins", "threads"});
        if (o.contains("n_particles")) {
            if (!o.at("n_particles").is_number_unsigned()) {
                fail("oracle.n_particles", "expected an unsigned integer");
            }
            cfg.oracle.n_particles = o.at("n_particles").get<std::size_t>();
        }
        get_number(o, "oracle", "dt_s", cfg.oracle.dt);
        if (o.contains("y_bins")) {
            if (!o.at("y_bins").is_number_integer()) {
                fail("oracle.y_bins", "expected an integer");
            }
            cfg.oracle.y_bins = o.at("y_bins").get<int>();
        }
        if (o.contains("threads")) {
            if (!o.at("threads").is_number_unsigned()) {
                fail("oracle.threads", "expected an unsigned integer");
            }
            cfg.oracle.threads = o.at("threads").get<unsigned>();
        }
    }

    // Default output horizon: last start + symbol period + 5 decay times.
    if (!explicit_t_end && !cfg.schedule.starts.empty()) {
        cfg.grid.t_end = cfg.schedule.starts.back() + cfg.schedule.symbol_period +
                         5.0 * cfg.receiver.tau_decay;
    }

    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config \"" + path + "\"");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string to_json(const ScenarioConfig& cfg) {
    ordered_json j;
    j["channel"]["geometry"] =
        cfg.channel.geometry == Geometry::Unbounded ? "unbounded" : "bounded_square";
    j["channel"]["released_amount_mol"] = cfg.channel.released_mol;
    j["channel"]["diffusivity_m2_per_s"] = cfg.channel.diffusivity;
    j["channel"]["flow_speed_m_per_s"] = cfg.channel.flow_speed;
    j["channel"]["source_height_m"] = cfg.channel.source_height;
    j["channel"]["half_width_m"] = cfg.channel.half_width;

    j["receiver"]["reference_resistance_ohm"] = cfg.receiver.reference_resistance;
    j["receiver"]["sensitivity_slope"] = cfg.receiver.sensitivity_slope;
    j["receiver"]["sensitivity_intercept"] = cfg.receiver.sensitivity_intercept;
    j["receiver"]["circuit_voltage_v"] = cfg.receiver.circuit_voltage;
    j["receiver"]["load_resistance_ohm"] = cfg.receiver.load_resistance;
    j["receiver"]["tau_rise_s"] = cfg.receiver.tau_rise;
    j["receiver"]["tau_decay_s"] = cfg.receiver.tau_decay;
    j["receiver"]["noise_kappa"] = cfg.receiver.noise_kappa;
    j["receiver"]["clean_air_ratio"] = cfg.receiver.clean_air_ratio;
    j["receiver"]["molar_mass_g_per_mol"] = cfg.receiver.molar_mass;
    j["receiver"]["concentration_floor_mg_per_l"] = cfg.receiver.concentration_floor;

    j["receiver_position"]["x_m"] = cfg.receiver_position.x;
    j["receiver_position"]["y_m"] = cfg.receiver_position.y;
    j["receiver_position"]["z_m"] = cfg.receiver_position.z;

    j["schedule"]["pulse_duration_s"] = cfg.schedule.pulse.duration;
    j["schedule"]["starts_s"] = cfg.schedule.starts;

    j["grid"]["dt_s"] = cfg.grid.dt;
    j["grid"]["t_end_s"] = cfg.grid.t_end;

    j["seed"] = cfg.seed;
    j["align_max_lag_s"] = cfg.align_max_lag;

    j["oracle"]["n_particles"] = cfg.oracle.n_particles;
    j["oracle"]["dt_s"] = cfg.oracle.dt;
    j["oracle"]["y_bins"] = cfg.oracle.y_bins;
    j["oracle"]["threads"] = cfg.oracle.threads;
    return j.dump(2) + "\n";
}

void validate(const ScenarioConfig& cfg) {
    validate(cfg.channel);
    validate(cfg.receiver);
    validate(cfg.schedule);
    validate(cfg.grid, cfg.schedule);
    if (!(cfg.receiver_position.x > 0.0)) {
        throw std::invalid_argument("receiver_position.x_m: must be > 0 (downwind of the source)");
    }
    if (cfg.channel.geometry == Geometry::BoundedSquare) {
        if (std::abs(cfg.receiver_position.y) > cfg.channel.half_width ||
            std::abs(cfg.receiver_position.z) > cfg.channel.half_width) {
            throw std::invalid_argument("receiver_position: must lie inside the duct (|y|,|z| <= l)");
        }
    }
    if (cfg.oracle.n_particles == 0) {
        throw std::invalid_argument("oracle.n_particles: must be >= 1");
    }
    if (!(cfg.oracle.dt > 0.0)) {
        throw std::invalid_argument("oracle.dt_s: must be > 0");
    }
    if (cfg.oracle.y_bins < 1) {
        throw std::invalid_argument("oracle.y_bins: must be >= 1");
    }
}

}  // namespace omc
