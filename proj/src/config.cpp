#include "lasim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lasim/toml.hpp"

namespace lasim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> keys) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(keys.begin(), keys.end(),
                         [&](const char* k) { return it.key() == k; }) == keys.end())
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
    }
}

template <typename T>
T get_as(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path.empty() ? key : path + "." + key, "invalid value");
    }
}

ChannelKind kind_from_string(const std::string& s) {
    if (s == "awgn") return ChannelKind::awgn;
    if (s == "freq_selective_static") return ChannelKind::freq_selective_static;
    if (s == "fading") return ChannelKind::fading;
    fail("scenario.kind", "must be one of awgn|freq_selective_static|fading");
}

std::string kind_to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::awgn: return "awgn";
        case ChannelKind::freq_selective_static: return "freq_selective_static";
        case ChannelKind::fading: return "fading";
    }
    return "awgn";
}

ScenarioConfig scenario_from_json(const json& j) {
    expect_keys(j, "scenario",
                {"kind", "mean_snr_db", "num_subcarriers", "fft_size", "subcarrier_spacing_hz",
                 "tti_duration_s", "carrier_freq_hz", "relative_speed_mps", "profile",
                 "tap_delays_s", "tap_powers_db", "eesm_beta", "doppler_ref_interval_s",
                 "sos_oscillators"});
    ScenarioConfig s;
    s.kind = kind_from_string(get_as<std::string>(j, "scenario", "kind", "awgn"));
    s.mean_snr_db = get_as<double>(j, "scenario", "mean_snr_db", s.mean_snr_db);
    s.num_subcarriers = get_as<int>(j, "scenario", "num_subcarriers", s.num_subcarriers);
    s.fft_size = get_as<int>(j, "scenario", "fft_size", s.fft_size);
    s.subcarrier_spacing_hz =
        get_as<double>(j, "scenario", "subcarrier_spacing_hz", s.subcarrier_spacing_hz);
    s.tti_duration_s = get_as<double>(j, "scenario", "tti_duration_s", s.tti_duration_s);
    s.carrier_freq_hz = get_as<double>(j, "scenario", "carrier_freq_hz", s.carrier_freq_hz);
    s.relative_speed_mps =
        get_as<double>(j, "scenario", "relative_speed_mps", s.relative_speed_mps);
    s.eesm_beta = get_as<double>(j, "scenario", "eesm_beta", s.eesm_beta);
    s.doppler_ref_interval_s =
        get_as<double>(j, "scenario", "doppler_ref_interval_s", s.doppler_ref_interval_s);
    s.sos_oscillators = get_as<int>(j, "scenario", "sos_oscillators", s.sos_oscillators);

    if (j.contains("profile")) {
        const std::string profile = j.at("profile").get<std::string>();
        TapProfile taps;
        if (profile == "itu_pedestrian_a")
            taps = itu_pedestrian_a();
        else if (profile == "itu_vehicular_b")
            taps = itu_vehicular_b();
        else
            fail("scenario.profile", "unknown profile '" + profile + "'");
        s.tap_delays_s = taps.delays_s;
        s.tap_powers_db = taps.powers_db;
    }
    s.tap_delays_s = get_as<std::vector<double>>(j, "scenario", "tap_delays_s", s.tap_delays_s);
    s.tap_powers_db = get_as<std::vector<double>>(j, "scenario", "tap_powers_db", s.tap_powers_db);
    return s;
}

json scenario_to_json(const ScenarioConfig& s) {
    json j;
    j["kind"] = kind_to_string(s.kind);
    j["mean_snr_db"] = s.mean_snr_db;
    j["num_subcarriers"] = s.num_subcarriers;
    j["fft_size"] = s.fft_size;
    j["subcarrier_spacing_hz"] = s.subcarrier_spacing_hz;
    j["tti_duration_s"] = s.tti_duration_s;
    j["carrier_freq_hz"] = s.carrier_freq_hz;
    j["relative_speed_mps"] = s.relative_speed_mps;
    j["eesm_beta"] = s.eesm_beta;
    j["doppler_ref_interval_s"] = s.doppler_ref_interval_s;
    j["sos_oscillators"] = s.sos_oscillators;
    if (!s.tap_delays_s.empty()) {
        j["tap_delays_s"] = s.tap_delays_s;
        j["tap_powers_db"] = s.tap_powers_db;
    }
    return j;
}

OlmSpec olm_from_json(const json& j) {
    expect_keys(j, "olm",
                {"grid_min_db", "grid_max_db", "grid_spacing_db", "num_mcs", "midpoint_start_db",
                 "midpoint_step_db", "slope_per_db", "tx_bias_db", "csv_path", "mcs_table"});
    OlmSpec o;
    o.grid.min_db = get_as<double>(j, "olm", "grid_min_db", o.grid.min_db);
    o.grid.max_db = get_as<double>(j, "olm", "grid_max_db", o.grid.max_db);
    o.grid.spacing_db = get_as<double>(j, "olm", "grid_spacing_db", o.grid.spacing_db);
    o.num_mcs = get_as<int>(j, "olm", "num_mcs", o.num_mcs);
    o.midpoint_start_db = get_as<double>(j, "olm", "midpoint_start_db", o.midpoint_start_db);
    o.midpoint_step_db = get_as<double>(j, "olm", "midpoint_step_db", o.midpoint_step_db);
    o.slope_per_db = get_as<double>(j, "olm", "slope_per_db", o.slope_per_db);
    o.tx_bias_db = get_as<double>(j, "olm", "tx_bias_db", o.tx_bias_db);
    o.csv_path = get_as<std::string>(j, "olm", "csv_path", o.csv_path);
    if (j.contains("mcs_table")) o.mcs_table_json = j.at("mcs_table").dump();
    return o;
}

json olm_to_json(const OlmSpec& o) {
    json j;
    j["grid_min_db"] = o.grid.min_db;
    j["grid_max_db"] = o.grid.max_db;
    j["grid_spacing_db"] = o.grid.spacing_db;
    j["num_mcs"] = o.num_mcs;
    j["midpoint_start_db"] = o.midpoint_start_db;
    j["midpoint_step_db"] = o.midpoint_step_db;
    j["slope_per_db"] = o.slope_per_db;
    j["tx_bias_db"] = o.tx_bias_db;
    if (!o.csv_path.empty()) j["csv_path"] = o.csv_path;
    if (!o.mcs_table_json.empty()) j["mcs_table"] = json::parse(o.mcs_table_json);
    return j;
}

AgentSpec agent_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string type = get_as<std::string>(j, path, "type", "");
    AgentSpec a;
    a.name = get_as<std::string>(j, path, "name", "");
    if (a.name.empty()) fail(path + ".name", "required");
    if (type == "olla") {
        expect_keys(j, path, {"name", "type", "eta", "step_db", "sinr_min_db", "sinr_max_db"});
        a.type = AgentSpec::Type::olla;
        a.eta = get_as<double>(j, path, "eta", a.eta);
        a.step_db = get_as<double>(j, path, "step_db", a.step_db);
        a.sinr_min_db = get_as<double>(j, path, "sinr_min_db", a.sinr_min_db);
        a.sinr_max_db = get_as<double>(j, path, "sinr_max_db", a.sinr_max_db);
    } else if (type == "uts") {
        expect_keys(j, path, {"name", "type", "window", "per_arm_window"});
        a.type = AgentSpec::Type::uts;
        a.window = get_as<std::uint64_t>(j, path, "window", a.window);
        a.per_arm_window = get_as<bool>(j, path, "per_arm_window", a.per_arm_window);
    } else if (type == "ltsla") {
        expect_keys(j, path,
                    {"name", "type", "sigma2", "doppler_scale", "cqi_std_db", "grid_spacing_db"});
        a.type = AgentSpec::Type::ltsla;
        if (j.contains("sigma2")) {
            const json& v = j.at("sigma2");
            if (v.is_string()) {
                if (v.get<std::string>() != "auto")
                    fail(path + ".sigma2", "must be a number or \"auto\"");
                a.sigma2_auto = true;
            } else if (v.is_number()) {
                a.sigma2 = v.get<double>();
            } else {
                fail(path + ".sigma2", "must be a number or \"auto\"");
            }
        }
        a.doppler_scale = get_as<double>(j, path, "doppler_scale", a.doppler_scale);
        a.cqi_std_db = get_as<double>(j, path, "cqi_std_db", a.cqi_std_db);
        a.grid_spacing_db = get_as<double>(j, path, "grid_spacing_db", a.grid_spacing_db);
    } else {
        fail(path + ".type", "must be one of olla|uts|ltsla");
    }
    return a;
}

json agent_to_json(const AgentSpec& a) {
    json j;
    j["name"] = a.name;
    switch (a.type) {
        case AgentSpec::Type::olla:
            j["type"] = "olla";
            j["eta"] = a.eta;
            j["step_db"] = a.step_db;
            j["sinr_min_db"] = a.sinr_min_db;
            j["sinr_max_db"] = a.sinr_max_db;
            break;
        case AgentSpec::Type::uts:
            j["type"] = "uts";
            j["window"] = a.window;
            j["per_arm_window"] = a.per_arm_window;
            break;
        case AgentSpec::Type::ltsla:
            j["type"] = "ltsla";
            if (a.sigma2_auto)
                j["sigma2"] = "auto";
            else
                j["sigma2"] = a.sigma2;
            j["doppler_scale"] = a.doppler_scale;
            j["cqi_std_db"] = a.cqi_std_db;
            if (a.grid_spacing_db > 0) j["grid_spacing_db"] = a.grid_spacing_db;
            break;
    }
    return j;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    expect_keys(j, "",
                {"name", "scenario", "olm", "agents", "num_runs", "num_ttis", "base_seed", "cqi"});
    ExperimentConfig cfg;
    cfg.name = get_as<std::string>(j, "", "name", cfg.name);
    if (j.contains("scenario")) cfg.scenario = scenario_from_json(j.at("scenario"));
    if (j.contains("olm")) cfg.olm = olm_from_json(j.at("olm"));
    if (!j.contains("agents")) fail("agents", "required");
    if (!j.at("agents").is_array()) fail("agents", "expected an array");
    for (std::size_t i = 0; i < j.at("agents").size(); ++i)
        cfg.agents.push_back(
            agent_from_json(j.at("agents")[i], "agents." + std::to_string(i)));
    cfg.num_runs = get_as<int>(j, "", "num_runs", cfg.num_runs);
    cfg.num_ttis = get_as<int>(j, "", "num_ttis", cfg.num_ttis);
    cfg.base_seed = get_as<std::uint64_t>(j, "", "base_seed", cfg.base_seed);
    if (j.contains("cqi")) {
        expect_keys(j.at("cqi"), "cqi", {"period_ttis", "delay_ttis"});
        CqiSchedule c;
        c.period_ttis = get_as<int>(j.at("cqi"), "cqi", "period_ttis", c.period_ttis);
        c.delay_ttis = get_as<int>(j.at("cqi"), "cqi", "delay_ttis", c.delay_ttis);
        cfg.cqi = c;
    }
    cfg.validate();
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["scenario"] = scenario_to_json(cfg.scenario);
    j["olm"] = olm_to_json(cfg.olm);
    j["agents"] = json::array();
    for (const AgentSpec& a : cfg.agents) j["agents"].push_back(agent_to_json(a));
    j["num_runs"] = cfg.num_runs;
    j["num_ttis"] = cfg.num_ttis;
    j["base_seed"] = cfg.base_seed;
    if (cfg.cqi)
        j["cqi"] = {{"period_ttis", cfg.cqi->period_ttis}, {"delay_ttis", cfg.cqi->delay_ttis}};
    return j;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") {
        j = toml::parse(buf.str());
    } else {
        try {
            j = nlohmann::json::parse(buf.str());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config: JSON parse error in '" + path + "': " + e.what());
        }
    }
    return config_from_json(j);
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set: expected KEY=VALUE, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string value_text = assignment.substr(eq + 1);

    nlohmann::json value;
    try {
        value = nlohmann::json::parse(value_text);
        if (value.is_object()) value = value_text;  // treat stray objects as strings
    } catch (const nlohmann::json::exception&) {
        value = value_text;
    }

    nlohmann::json* node = &j;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("--set: empty key in '" + assignment + "'");

    for (std::size_t i = 0; i < parts.size(); ++i) {
        const bool last = i + 1 == parts.size();
        const std::string& key = parts[i];
        const bool is_index = !key.empty() && key.find_first_not_of("0123456789") == std::string::npos;
        if (is_index) {
            if (!node->is_array())
                throw ConfigError("--set " + path + ": '" + key + "' indexes a non-array");
            const std::size_t idx = std::stoul(key);
            if (idx >= node->size())
                throw ConfigError("--set " + path + ": no element with index " + key);
            node = &(*node)[idx];
        } else {
            if (!node->is_object()) {
                if (node->is_null())
                    *node = json::object();
                else
                    throw ConfigError("--set " + path + ": '" + key + "' enters a non-object");
            }
            if (!node->contains(key)) (*node)[key] = json();
            node = &(*node)[key];
        }
        if (last) *node = value;
    }
}

std::vector<std::string> preset_names() {
    return {"awgn_10db", "freq_selective_static", "pedestrian_3kmph", "vehicular_30kmph",
            "pedestrian_cqi"};
}

namespace {

AgentSpec ltsla_spec(double sigma2, bool auto_sigma = false) {
    AgentSpec a;
    a.name = "ltsla";
    a.type = AgentSpec::Type::ltsla;
    a.sigma2 = sigma2;
    a.sigma2_auto = auto_sigma;
    return a;
}

AgentSpec olla_spec(double step_db) {
    AgentSpec a;
    a.name = step_db == 0.1 ? "olla_0.1" : "olla_1.0";
    a.type = AgentSpec::Type::olla;
    a.eta = 0.1;
    a.step_db = step_db;
    a.sinr_min_db = -8.5;
    a.sinr_max_db = 18.0;
    return a;
}

AgentSpec uts_spec(std::uint64_t window) {
    AgentSpec a;
    a.name = "uts";
    a.type = AgentSpec::Type::uts;
    a.window = window;
    return a;
}

ScenarioConfig base_scenario() {
    ScenarioConfig s;
    s.mean_snr_db = 10.0;
    s.num_subcarriers = 72;
    s.fft_size = 128;
    s.subcarrier_spacing_hz = 15e3;
    s.tti_duration_s = 1e-3;
    s.carrier_freq_hz = 2e9;
    return s;
}

void set_profile(ScenarioConfig& s, const TapProfile& p) {
    s.tap_delays_s = p.delays_s;
    s.tap_powers_db = p.powers_db;
}

}  // namespace

ExperimentConfig make_preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.scenario = base_scenario();
    cfg.num_runs = 200;
    cfg.num_ttis = 500;
    cfg.base_seed = 1;

    if (name == "awgn_10db") {
        cfg.scenario.kind = ChannelKind::awgn;
        cfg.agents = {ltsla_spec(0.0), olla_spec(0.1), olla_spec(1.0), uts_spec(0)};
    } else if (name == "freq_selective_static") {
        cfg.scenario.kind = ChannelKind::freq_selective_static;
        set_profile(cfg.scenario, itu_vehicular_b());
        cfg.agents = {ltsla_spec(0.0), olla_spec(0.1), olla_spec(1.0), uts_spec(0)};
    } else if (name == "pedestrian_3kmph") {
        cfg.scenario.kind = ChannelKind::fading;
        cfg.scenario.relative_speed_mps = 3.0 / 3.6;
        set_profile(cfg.scenario, itu_pedestrian_a());
        cfg.agents = {ltsla_spec(0.3), olla_spec(0.1), uts_spec(500)};
    } else if (name == "vehicular_30kmph") {
        cfg.scenario.kind = ChannelKind::fading;
        cfg.scenario.relative_speed_mps = 30.0 / 3.6;
        set_profile(cfg.scenario, itu_vehicular_b());
        cfg.agents = {ltsla_spec(3.0), olla_spec(1.0), uts_spec(50)};
    } else if (name == "pedestrian_cqi") {
        cfg.scenario.kind = ChannelKind::fading;
        cfg.scenario.relative_speed_mps = 3.0 / 3.6;
        set_profile(cfg.scenario, itu_pedestrian_a());
        cfg.agents = {ltsla_spec(0.3), olla_spec(0.1), uts_spec(500)};
        cfg.cqi = CqiSchedule{80, 4};
    } else {
        std::string known;
        for (const std::string& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
        throw ConfigError("unknown preset '" + name + "'; valid presets: " + known);
    }
    cfg.validate();
    return cfg;
}

}  // namespace lasim
