#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lasim/harness.hpp"

namespace lasim::cli {

struct RunArgs {
    std::string preset;
    std::string config_path;
    std::vector<std::string> overrides;  // KEY=VALUE
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int parallel = 1;
    bool dump_pmf = false;
    bool dump_channel = false;
};

// Resolves the config, runs the experiment, writes traces.csv, summary.json,
// and config.resolved.json into out_dir. Returns the process exit status.
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);

struct CompareArgs {
    std::vector<std::string> summary_paths;
    double flag_factor = 1.5;
};

struct CompareResult {
    std::vector<std::string> labels;  // file:agent
    std::vector<std::vector<double>> aggregate_ratio;  // [a][b] = mean_a / mean_b
    std::vector<std::vector<double>> max_tti_ratio;    // [a][b] = max_t r_a[t]/r_b[t]
    struct FlaggedTti {
        int tti;
        std::string numerator, denominator;
        double ratio;
    };
    std::vector<FlaggedTti> flagged;
};

CompareResult compare_summaries(const std::vector<Summary>& summaries,
                                const std::vector<std::string>& file_labels, double flag_factor);

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

int cmd_presets(std::ostream& out);

}  // namespace lasim::cli
