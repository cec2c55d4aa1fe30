#include "lasim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lasim/ltsla.hpp"
#include "lasim/rng.hpp"

namespace lasim {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

McsTable build_mcs_table(const OlmSpec& spec) {
    if (!spec.mcs_table_json.empty()) return mcs_table_from_json(spec.mcs_table_json);
    if (spec.num_mcs == 15) return default_mcs_table();
    // synthetic ladder keeping the default table's shape for other sizes
    std::vector<McsEntry> entries(spec.num_mcs);
    for (int m = 0; m < spec.num_mcs; ++m)
        entries[m] = McsEntry{m + 1, 4, (m + 1) / static_cast<double>(spec.num_mcs + 1), 0.0};
    return McsTable(std::move(entries));
}

std::pair<Olm, Olm> build_olms(const OlmSpec& spec, const McsTable& table) {
    spec.grid.validate();
    std::optional<Olm> truth;
    if (!spec.csv_path.empty()) {
        std::ifstream in(spec.csv_path);
        if (!in) throw ConfigError("olm.csv_path: cannot open '" + spec.csv_path + "'");
        truth = read_olm_csv(in);
        if (truth->num_mcs() != table.size())
            throw ConfigError("olm.csv_path: row count does not match the MCS table");
    } else {
        truth = make_sigmoid_olm(table,
                                 default_midpoints_db(table.size(), spec.midpoint_start_db,
                                                      spec.midpoint_step_db),
                                 std::vector<double>(table.size(), spec.slope_per_db), spec.grid);
    }
    Olm tx = perturb_olm(*truth, spec.tx_bias_db);
    return {std::move(*truth), std::move(tx)};
}

void ExperimentConfig::validate() const {
    scenario.validate();
    olm.grid.validate();
    if (olm.num_mcs < 2) throw ConfigError("olm.num_mcs: must be >= 2");
    if (!(olm.slope_per_db > 0)) throw ConfigError("olm.slope_per_db: must be > 0");
    if (!(olm.midpoint_step_db > 0)) throw ConfigError("olm.midpoint_step_db: must be > 0");
    if (num_runs < 1) throw ConfigError("num_runs: must be >= 1");
    if (num_ttis < 1) throw ConfigError("num_ttis: must be >= 1");
    if (agents.empty()) throw ConfigError("agents: need at least one agent");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentSpec& a = agents[i];
        const std::string path = "agents." + std::to_string(i);
        if (a.name.empty()) throw ConfigError(path + ".name: must not be empty");
        for (std::size_t j = 0; j < i; ++j)
            if (agents[j].name == a.name)
                throw ConfigError(path + ".name: duplicate agent name '" + a.name + "'");
        switch (a.type) {
            case AgentSpec::Type::olla: {
                OllaState s{0.0, 0.0, a.eta, a.step_db, a.sinr_min_db, a.sinr_max_db};
                try {
                    s.validate();
                } catch (const ConfigError& e) {
                    throw ConfigError(path + "." + e.what());
                }
                break;
            }
            case AgentSpec::Type::uts:
                break;
            case AgentSpec::Type::ltsla:
                if (!a.sigma2_auto && a.sigma2 < 0)
                    throw ConfigError(path + ".sigma2: must be >= 0 or \"auto\"");
                if (!(a.doppler_scale > 0)) throw ConfigError(path + ".doppler_scale: must be > 0");
                if (!(a.cqi_std_db > 0)) throw ConfigError(path + ".cqi_std_db: must be > 0");
                if (a.grid_spacing_db < 0)
                    throw ConfigError(path + ".grid_spacing_db: must be >= 0");
                break;
        }
    }
    if (cqi) {
        if (cqi->period_ttis < 1) throw ConfigError("cqi.period_ttis: must be >= 1");
        if (cqi->delay_ttis < 0) throw ConfigError("cqi.delay_ttis: must be >= 0");
    }
}

std::unique_ptr<LinkAgent> make_agent(const AgentSpec& spec, const ScenarioConfig& scenario,
                                      const Olm& tx_olm, const McsTable& table) {
    switch (spec.type) {
        case AgentSpec::Type::olla: {
            OllaState s{0.0, 0.0, spec.eta, spec.step_db, spec.sinr_min_db, spec.sinr_max_db};
            return std::make_unique<OllaAgent>(s, tx_olm, table);
        }
        case AgentSpec::Type::uts:
            return std::make_unique<UtsAgent>(table.size(), spec.window, spec.per_arm_window,
                                              table);
        case AgentSpec::Type::ltsla: {
            double sigma2 = spec.sigma2;
            if (spec.sigma2_auto)
                sigma2 = sigma2_from_doppler(normalized_doppler(scenario), spec.doppler_scale);
            SinrGrid grid{tx_olm.grid().front(), tx_olm.grid().back(),
                          spec.grid_spacing_db > 0 ? spec.grid_spacing_db
                                                   : tx_olm.grid()[1] - tx_olm.grid()[0]};
            return std::make_unique<LtslaAgent>(grid, sigma2, spec.cqi_std_db, tx_olm, table);
        }
    }
    throw ConfigError("agents: unknown agent type");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int parallel, const RunHooks& hooks,
                                const std::atomic<bool>* interrupt) {
    cfg.validate();
    const McsTable table = build_mcs_table(cfg.olm);
    const auto [truth_olm, tx_olm] = build_olms(cfg.olm, table);
    const ChannelModel model(cfg.scenario);

    const int agent_count = static_cast<int>(cfg.agents.size());
    const int runs = cfg.num_runs;
    const int ttis = cfg.num_ttis;

    ExperimentResult result;
    for (const AgentSpec& a : cfg.agents) result.agent_names.push_back(a.name);
    result.traces.resize(static_cast<std::size_t>(agent_count) * runs * ttis);
    std::vector<char> completed(static_cast<std::size_t>(agent_count) * runs, 0);

    auto run_one = [&](int agent_idx, int run) {
        const AgentSpec& spec = cfg.agents[agent_idx];
        Rng channel_rng(derive_seed(cfg.base_seed, spec.name, run, RngStream::channel));
        Rng agent_rng(derive_seed(cfg.base_seed, spec.name, run, RngStream::agent));
        Rng ack_rng(derive_seed(cfg.base_seed, spec.name, run, RngStream::ack));

        const ChannelRealization channel = model.realize(ttis, channel_rng);
        std::unique_ptr<LinkAgent> agent = make_agent(spec, cfg.scenario, tx_olm, table);
        std::deque<CqiReport> pending;

        TraceRecord* slot =
            result.traces.data() + (static_cast<std::size_t>(agent_idx) * runs + run) * ttis;
        for (int tti = 1; tti <= ttis; ++tti) {
            while (!pending.empty() && pending.front().available_at <= tti) {
                agent->on_cqi(pending.front());
                pending.pop_front();
            }
            const double theta_true = channel.theta_eff_db[tti - 1];
            const int mcs = agent->propose(agent_rng);
            const std::optional<double> theta_hat = agent->sinr_estimate();
            const bool ack = draw_ack(truth_olm, mcs, theta_true, ack_rng);
            agent->observe(mcs, ack);
            if (cfg.cqi && tti % cfg.cqi->period_ttis == 0)
                pending.push_back(
                    generate_cqi(truth_olm, table, theta_true, tti, cfg.cqi->delay_ttis));
            slot[tti - 1] = TraceRecord{
                agent_idx,
                run,
                tti,
                mcs,
                ack,
                ack ? table.rate(mcs) : 0.0,
                theta_hat ? *theta_hat : std::numeric_limits<double>::quiet_NaN(),
                theta_true};
            if (hooks.post_tti) hooks.post_tti(agent_idx, run, tti, *agent);
        }
        completed[static_cast<std::size_t>(agent_idx) * runs + run] = 1;
    };

    const std::size_t total_tasks = static_cast<std::size_t>(agent_count) * runs;
    bool was_interrupted = false;
    if (parallel <= 1) {
        for (std::size_t task = 0; task < total_tasks; ++task) {
            if (interrupt && interrupt->load()) {
                was_interrupted = true;
                break;
            }
            run_one(static_cast<int>(task / runs), static_cast<int>(task % runs));
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> saw_interrupt{false};
        auto worker = [&] {
            for (;;) {
                if (interrupt && interrupt->load()) {
                    saw_interrupt.store(true);
                    return;
                }
                const std::size_t task = next.fetch_add(1);
                if (task >= total_tasks) return;
                run_one(static_cast<int>(task / runs), static_cast<int>(task % runs));
            }
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < parallel; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        was_interrupted = saw_interrupt.load();
    }

    if (was_interrupted) {
        // keep only fully completed (agent, run) cells
        std::vector<TraceRecord> kept;
        for (int a = 0; a < agent_count; ++a)
            for (int r = 0; r < runs; ++r)
                if (completed[static_cast<std::size_t>(a) * runs + r]) {
                    const TraceRecord* slot =
                        result.traces.data() + (static_cast<std::size_t>(a) * runs + r) * ttis;
                    kept.insert(kept.end(), slot, slot + ttis);
                }
        result.traces = std::move(kept);
        result.interrupted = true;
    }

    result.summary = summarize(result.traces, result.agent_names, runs, ttis, table.size());
    return result;
}

Summary summarize(const std::vector<TraceRecord>& traces,
                  const std::vector<std::string>& agent_names, int num_runs, int num_ttis,
                  int num_mcs) {
    if (traces.empty()) throw ConfigError("summarize: no trace records");
    Summary s;
    s.num_runs = num_runs;
    s.num_ttis = num_ttis;
    s.agent_names = agent_names;
    s.agents.assign(agent_names.size(), AgentSummary{});
    const int agent_count = static_cast<int>(agent_names.size());

    std::vector<std::vector<double>> tput_sum(agent_count, std::vector<double>(num_ttis, 0.0));
    std::vector<std::int64_t> records(agent_count, 0), nacks(agent_count, 0),
        est_count(agent_count, 0);
    std::vector<double> tput_total(agent_count, 0.0), err_sum(agent_count, 0.0);
    std::vector<std::vector<std::int64_t>> hist(agent_count,
                                                std::vector<std::int64_t>(num_mcs + 1, 0));

    for (const TraceRecord& rec : traces) {
        const int a = rec.agent_idx;
        tput_sum[a][rec.tti - 1] += rec.throughput;
        tput_total[a] += rec.throughput;
        ++records[a];
        if (!rec.ack) ++nacks[a];
        hist[a][rec.mcs] += 1;
        if (!std::isnan(rec.theta_hat_db)) {
            err_sum[a] += std::abs(rec.theta_hat_db - rec.theta_true_db);
            ++est_count[a];
        }
    }

    for (int a = 0; a < agent_count; ++a) {
        AgentSummary& out = s.agents[a];
        out.r_n.resize(num_ttis);
        const double run_div = records[a] > 0 ? static_cast<double>(records[a]) / num_ttis : 1.0;
        for (int t = 0; t < num_ttis; ++t) out.r_n[t] = tput_sum[a][t] / run_div;
        out.mean_throughput = records[a] > 0 ? tput_total[a] / records[a] : 0.0;
        out.bler = records[a] > 0 ? static_cast<double>(nacks[a]) / records[a] : 0.0;
        out.mcs_histogram = hist[a];
        if (est_count[a] > 0) out.mean_abs_sinr_error_db = err_sum[a] / est_count[a];
    }
    return s;
}

void write_traces_csv(const std::vector<TraceRecord>& traces,
                      const std::vector<std::string>& agent_names, std::ostream& out) {
    out << "agent,run,tti,mcs,ack,throughput,theta_hat_db,theta_true_db\n";
    for (const TraceRecord& rec : traces) {
        out << agent_names[rec.agent_idx] << ',' << rec.run << ',' << rec.tti << ',' << rec.mcs
            << ',' << (rec.ack ? 1 : 0) << ',' << format_double(rec.throughput) << ','
            << format_double(rec.theta_hat_db) << ',' << format_double(rec.theta_true_db) << '\n';
    }
}

std::pair<std::vector<std::string>, std::vector<TraceRecord>> read_traces_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("traces csv: empty file");
    std::vector<std::string> names;
    std::vector<TraceRecord> traces;
    auto agent_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        names.push_back(name);
        return static_cast<int>(names.size()) - 1;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (!line.empty() && line.back() == ',') cols.push_back("");
        if (cols.size() != 8) throw ConfigError("traces csv: expected 8 columns");
        TraceRecord rec;
        rec.agent_idx = agent_index(cols[0]);
        rec.run = std::stoi(cols[1]);
        rec.tti = std::stoi(cols[2]);
        rec.mcs = std::stoi(cols[3]);
        rec.ack = cols[4] == "1";
        rec.throughput = std::stod(cols[5]);
        rec.theta_hat_db =
            cols[6].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cols[6]);
        rec.theta_true_db = std::stod(cols[7]);
        traces.push_back(rec);
    }
    return {std::move(names), std::move(traces)};
}

std::string summary_to_json(const Summary& summary) {
    nlohmann::json j;
    j["num_runs"] = summary.num_runs;
    j["num_ttis"] = summary.num_ttis;
    nlohmann::json agents = nlohmann::json::object();
    for (std::size_t a = 0; a < summary.agent_names.size(); ++a) {
        const AgentSummary& s = summary.agents[a];
        nlohmann::json entry;
        entry["r_n"] = s.r_n;
        entry["mean_throughput"] = s.mean_throughput;
        entry["bler"] = s.bler;
        entry["mcs_histogram"] = s.mcs_histogram;
        if (s.mean_abs_sinr_error_db)
            entry["mean_abs_sinr_error_db"] = *s.mean_abs_sinr_error_db;
        else
            entry["mean_abs_sinr_error_db"] = nullptr;
        agents[summary.agent_names[a]] = std::move(entry);
    }
    j["agents"] = std::move(agents);
    // preserve agent ordering; json objects sort keys alphabetically
    j["agent_order"] = summary.agent_names;
    return j.dump(2);
}

Summary summary_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    Summary s;
    s.num_runs = j.at("num_runs").get<int>();
    s.num_ttis = j.at("num_ttis").get<int>();
    s.agent_names = j.at("agent_order").get<std::vector<std::string>>();
    for (const std::string& name : s.agent_names) {
        const nlohmann::json& entry = j.at("agents").at(name);
        AgentSummary a;
        a.r_n = entry.at("r_n").get<std::vector<double>>();
        a.mean_throughput = entry.at("mean_throughput").get<double>();
        a.bler = entry.at("bler").get<double>();
        a.mcs_histogram = entry.at("mcs_histogram").get<std::vector<std::int64_t>>();
        if (!entry.at("mean_abs_sinr_error_db").is_null())
            a.mean_abs_sinr_error_db = entry.at("mean_abs_sinr_error_db").get<double>();
        s.agents.push_back(std::move(a));
    }
    return s;
}

}  // namespace lasim
