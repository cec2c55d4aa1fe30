#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lasim/agent.hpp"
#include "lasim/channel.hpp"
#include "lasim/mcs_olm.hpp"

namespace lasim {

struct CqiSchedule {
    int period_ttis = 80;
    int delay_ttis = 4;
};

struct AgentSpec {
    enum class Type { olla, uts, ltsla };

    std::string name;
    Type type = Type::olla;

    // olla
    double eta = 0.1;
    double step_db = 0.1;
    double sinr_min_db = -8.5;
    double sinr_max_db = 18.0;

    // uts
    std::uint64_t window = 0;  // 0 = unbounded
    bool per_arm_window = false;

    // ltsla
    bool sigma2_auto = false;  // sigma2 = doppler_scale * normalized_doppler(scenario)
    double sigma2 = 0.0;
    double doppler_scale = 1e4;
    double cqi_std_db = 2.0;
    double grid_spacing_db = 0.0;  // 0 = reuse the OLM grid spacing
};

// How the (truth, transmitter) OLM pair is built: a synthetic sigmoid
// waterfall family, optionally replaced by an explicit CSV table, with the
// transmitter copy shifted by tx_bias_db.
struct OlmSpec {
    SinrGrid grid;
    int num_mcs = 15;
    double midpoint_start_db = -8.0;
    double midpoint_step_db = 2.0;
    double slope_per_db = 2.5;
    double tx_bias_db = 0.0;
    std::string csv_path;                 // when set, truth OLM is read from this file
    std::string mcs_table_json;           // when set, overrides the built-in MCS table
};

McsTable build_mcs_table(const OlmSpec& spec);
// (truth, transmitter) pair
std::pair<Olm, Olm> build_olms(const OlmSpec& spec, const McsTable& table);

struct ExperimentConfig {
    std::string name = "custom";
    ScenarioConfig scenario;
    OlmSpec olm;
    std::vector<AgentSpec> agents;
    int num_runs = 200;
    int num_ttis = 500;
    std::uint64_t base_seed = 1;
    std::optional<CqiSchedule> cqi;

    void validate() const;
};

struct TraceRecord {
    int agent_idx = 0;  // position in ExperimentConfig::agents
    int run = 0;
    int tti = 0;  // 1-based
    int mcs = 0;
    bool ack = false;
    double throughput = 0.0;     // rate * ack, bits per resource element
    double theta_hat_db = 0.0;   // NaN when the agent has no SINR estimate
    double theta_true_db = 0.0;  // effective SINR of the realization

    bool operator==(const TraceRecord&) const = default;
};

struct AgentSummary {
    std::vector<double> r_n;  // mean throughput per TTI across runs
    double mean_throughput = 0.0;
    double bler = 0.0;
    std::vector<std::int64_t> mcs_histogram;  // 1-based MCS -> count, index 0 unused
    std::optional<double> mean_abs_sinr_error_db;

    bool operator==(const AgentSummary&) const = default;
};

struct Summary {
    int num_runs = 0;
    int num_ttis = 0;
    std::vector<std::string> agent_names;
    std::vector<AgentSummary> agents;

    bool operator==(const Summary&) const = default;
};

struct ExperimentResult {
    std::vector<std::string> agent_names;
    std::vector<TraceRecord> traces;
    Summary summary;
    bool interrupted = false;
};

struct RunHooks {
    // Invoked after each TTI of (agent, run) tasks; serialized per task, may
    // run concurrently across tasks.
    std::function<void(int agent_idx, int run, int tti, const LinkAgent& agent)> post_tti;
};

// Runs num_runs independent links for num_ttis TTIs per agent. Each
// (agent, run) cell draws its channel, agent decisions, and ACK outcomes from
// RNG streams derived only from (base_seed, agent name, run), so results are
// independent of scheduling. parallel <= 1 runs inline.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int parallel = 1,
                                const RunHooks& hooks = {},
                                const std::atomic<bool>* interrupt = nullptr);

Summary summarize(const std::vector<TraceRecord>& traces,
                  const std::vector<std::string>& agent_names, int num_runs, int num_ttis,
                  int num_mcs);

// Trace CSV: agent,run,tti,mcs,ack,throughput,theta_hat_db,theta_true_db
void write_traces_csv(const std::vector<TraceRecord>& traces,
                      const std::vector<std::string>& agent_names, std::ostream& out);
std::pair<std::vector<std::string>, std::vector<TraceRecord>> read_traces_csv(std::istream& in);

std::string summary_to_json(const Summary& summary);
Summary summary_from_json(const std::string& json_text);

std::unique_ptr<LinkAgent> make_agent(const AgentSpec& spec, const ScenarioConfig& scenario,
                                      const Olm& tx_olm, const McsTable& table);

}  // namespace lasim
