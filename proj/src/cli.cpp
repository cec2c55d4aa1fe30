#include "lasim/cli.hpp"

#include <atomic>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "lasim/config.hpp"
#include "lasim/ltsla.hpp"

namespace lasim::cli {

namespace {

namespace fs = std::filesystem;

std::atomic<bool> g_interrupted{false};

void handle_signal(int) { g_interrupted.store(true); }

void install_signal_handlers() {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << contents;
}

std::string basename_no_ext(const std::string& path) {
    fs::path p(path);
    return p.stem().string();
}

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    try {
        nlohmann::json tree;
        if (!args.preset.empty() && !args.config_path.empty())
            throw ConfigError("--preset and --config are mutually exclusive");
        if (!args.preset.empty()) {
            tree = config_to_json(make_preset(args.preset));
        } else if (!args.config_path.empty()) {
            // load through the file reader to get format handling + validation
            tree = config_to_json(load_config_file(args.config_path));
        } else {
            throw ConfigError("one of --preset or --config is required");
        }

        for (const std::string& assignment : args.overrides) apply_override(tree, assignment);
        if (args.seed) tree["base_seed"] = *args.seed;

        const ExperimentConfig cfg = config_from_json(tree);

        fs::create_directories(args.out_dir);
        const fs::path out_dir(args.out_dir);
        write_file(out_dir / "config.resolved.json", config_to_json(cfg).dump(2) + "\n");

        install_signal_handlers();
        g_interrupted.store(false);

        RunHooks hooks;
        std::vector<std::unique_ptr<std::ofstream>> pmf_files;
        if (args.dump_pmf) {
            pmf_files.resize(cfg.agents.size());
            for (std::size_t a = 0; a < cfg.agents.size(); ++a) {
                if (cfg.agents[a].type != AgentSpec::Type::ltsla) continue;
                auto path = out_dir / ("pmf_" + cfg.agents[a].name + "_run0.csv");
                pmf_files[a] = std::make_unique<std::ofstream>(path, std::ios::binary);
                *pmf_files[a] << "tti,bin,prob\n";
            }
            hooks.post_tti = [&](int agent_idx, int run, int tti, const LinkAgent& agent) {
                if (run != 0 || !pmf_files[agent_idx]) return;
                const auto* ltsla = dynamic_cast<const LtslaAgent*>(&agent);
                if (!ltsla) return;
                const SinrPmf& pmf = ltsla->pmf();
                for (int k = 0; k < pmf.num_bins(); ++k)
                    *pmf_files[agent_idx] << tti << ',' << k << ',' << pmf.probs[k] << '\n';
            };
        }

        const ExperimentResult result = run_experiment(cfg, args.parallel, hooks, &g_interrupted);

        {
            std::ofstream traces(out_dir / "traces.csv", std::ios::binary);
            write_traces_csv(result.traces, result.agent_names, traces);
        }
        write_file(out_dir / "summary.json", summary_to_json(result.summary) + "\n");

        if (args.dump_channel) {
            // re-realize run-0 channels from the same seeds
            const McsTable table = build_mcs_table(cfg.olm);
            const ChannelModel model(cfg.scenario);
            for (const AgentSpec& a : cfg.agents) {
                Rng rng(derive_seed(cfg.base_seed, a.name, 0, RngStream::channel));
                const ChannelRealization real = model.realize(cfg.num_ttis, rng);
                std::ofstream ch(out_dir / ("channel_" + a.name + "_run0.csv"), std::ios::binary);
                write_channel_csv(real, ch);
            }
        }

        if (result.interrupted) {
            err << "interrupted: wrote traces for completed runs only\n";
            return 130;
        }
        out << "wrote " << (out_dir / "traces.csv").string() << " ("
            << result.traces.size() << " records), " << (out_dir / "summary.json").string()
            << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

CompareResult compare_summaries(const std::vector<Summary>& summaries,
                                const std::vector<std::string>& file_labels, double flag_factor) {
    if (summaries.size() < 2) throw ConfigError("compare: need at least two summaries");
    const int ttis = summaries.front().num_ttis;
    for (const Summary& s : summaries)
        if (s.num_ttis != ttis)
            throw ConfigError("compare: summaries disagree on num_ttis (" +
                              std::to_string(s.num_ttis) + " vs " + std::to_string(ttis) + ")");

    CompareResult res;
    std::vector<const AgentSummary*> series;
    for (std::size_t f = 0; f < summaries.size(); ++f)
        for (std::size_t a = 0; a < summaries[f].agent_names.size(); ++a) {
            res.labels.push_back(file_labels[f] + ":" + summaries[f].agent_names[a]);
            series.push_back(&summaries[f].agents[a]);
        }

    const std::size_t n = series.size();
    res.aggregate_ratio.assign(n, std::vector<double>(n, 1.0));
    res.max_tti_ratio.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            res.aggregate_ratio[a][b] = series[a]->mean_throughput / series[b]->mean_throughput;
            double max_ratio = 0.0;
            for (int t = 0; t < ttis; ++t) {
                const double num = series[a]->r_n[t];
                const double den = series[b]->r_n[t];
                const double ratio =
                    den > 0 ? num / den
                            : (num > 0 ? std::numeric_limits<double>::infinity() : 1.0);
                max_ratio = std::max(max_ratio, ratio);
                if (a != b && ratio >= flag_factor)
                    res.flagged.push_back({t + 1, res.labels[a], res.labels[b], ratio});
            }
            res.max_tti_ratio[a][b] = max_ratio;
        }
    return res;
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
    try {
        std::vector<Summary> summaries;
        std::vector<std::string> labels;
        for (const std::string& path : args.summary_paths) {
            std::ifstream in(path);
            if (!in) throw ConfigError("compare: cannot open '" + path + "'");
            std::stringstream buf;
            buf << in.rdbuf();
            summaries.push_back(summary_from_json(buf.str()));
            labels.push_back(basename_no_ext(path));
        }
        const CompareResult res = compare_summaries(summaries, labels, args.flag_factor);

        out << "aggregate throughput ratio (row / column)\n";
        out << std::setw(28) << "";
        for (const std::string& l : res.labels) out << std::setw(24) << l;
        out << "\n";
        for (std::size_t a = 0; a < res.labels.size(); ++a) {
            out << std::setw(28) << res.labels[a];
            for (std::size_t b = 0; b < res.labels.size(); ++b)
                out << std::setw(24) << std::fixed << std::setprecision(4)
                    << res.aggregate_ratio[a][b];
            out << "\n";
        }
        out << "\nmax per-tti throughput ratio (row / column)\n";
        out << std::setw(28) << "";
        for (const std::string& l : res.labels) out << std::setw(24) << l;
        out << "\n";
        for (std::size_t a = 0; a < res.labels.size(); ++a) {
            out << std::setw(28) << res.labels[a];
            for (std::size_t b = 0; b < res.labels.size(); ++b)
                out << std::setw(24) << std::setprecision(4) << res.max_tti_ratio[a][b];
            out << "\n";
        }
        out << "\nttis where one series exceeds another by >= " << args.flag_factor
            << "x (tti,numerator,denominator,ratio)\n";
        for (const auto& f : res.flagged)
            out << f.tti << ',' << f.numerator << ',' << f.denominator << ','
                << std::setprecision(4) << f.ratio << "\n";
        if (res.flagged.empty()) out << "(none)\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_presets(std::ostream& out) {
    for (const std::string& name : preset_names()) out << name << "\n";
    return 0;
}

}  // namespace lasim::cli
