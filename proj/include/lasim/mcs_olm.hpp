#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace lasim {

// Thrown for invalid configuration values; the CLI turns these into
// diagnostics naming the offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// One modulation-and-coding scheme.
struct McsEntry {
    int index = 0;             // 1-based, contiguous within a table
    int modulation_order = 0;  // alphabet size, power of two
    double code_rate = 0.0;    // in (0, 1]
    double data_rate = 0.0;    // bits per resource element, code_rate * log2(modulation_order)
};

// Ordered MCS set with strictly increasing data rates.
class McsTable {
public:
    // data_rate is computed here from code_rate and modulation_order.
    explicit McsTable(std::vector<McsEntry> entries);

    int size() const { return static_cast<int>(entries_.size()); }
    const McsEntry& entry(int index) const { return entries_[index - 1]; }
    double rate(int index) const { return entries_[index - 1].data_rate; }
    const std::vector<McsEntry>& entries() const { return entries_; }

private:
    std::vector<McsEntry> entries_;
};

// Uniform SINR grid of bin centers in dB.
struct SinrGrid {
    double min_db = -10.0;
    double max_db = 20.0;
    double spacing_db = 0.1;

    int num_bins() const;
    std::vector<double> centers() const;
    void validate() const;
};

// Offline link model: lookup table mapping (MCS, SINR bin) -> ACK probability.
// Rows are non-decreasing in SINR, columns non-increasing in MCS index.
class Olm {
public:
    Olm(std::vector<double> sinr_grid_db, std::vector<std::vector<double>> ack_prob);

    int num_mcs() const { return static_cast<int>(ack_prob_.size()); }
    int num_bins() const { return static_cast<int>(grid_.size()); }
    const std::vector<double>& grid() const { return grid_; }
    double at(int mcs, int bin) const { return ack_prob_[mcs - 1][bin]; }
    const std::vector<double>& row(int mcs) const { return ack_prob_[mcs - 1]; }

    // Index of the grid bin whose center is nearest theta_db; clamps at the edges.
    int nearest_bin(double theta_db) const;

private:
    std::vector<double> grid_;
    std::vector<std::vector<double>> ack_prob_;
};

// Builds an OLM from per-MCS sigmoid waterfall curves:
//   ack[m][k] = 1 / (1 + exp(-slope_m * (theta_k - midpoint_m))).
// Midpoints must be strictly increasing and slopes positive.
Olm make_sigmoid_olm(const McsTable& table, const std::vector<double>& midpoints_db,
                     const std::vector<double>& slopes_per_db, const SinrGrid& grid);

// ACK probability for MCS m at SINR theta_db (nearest-bin lookup, clamped).
double olm_lookup(const Olm& olm, int mcs, double theta_db);

// Expected-throughput-maximizing MCS at the SINR estimate; ties break toward
// the lowest (most robust) index.
int select_mcs(const Olm& olm, const McsTable& table, double theta_hat_db);

// OLM shifted by bias_db along the SINR axis: lookup at theta equals the
// original lookup at theta - bias_db. Models a systematic model mismatch.
Olm perturb_olm(const Olm& olm, double bias_db);

// Genie throughput at known SINR: max over m of r_m * ack(m, theta).
double oracle_throughput(const Olm& truth_olm, const McsTable& table, double theta_db);

// SINR a transmitter infers from a CQI index: the lowest grid SINR at which
// select_mcs returns that index. Falls back to the lowest SINR reaching at
// least that index, then to the grid edges.
double cqi_to_sinr(const Olm& olm, const McsTable& table, int cqi_index);

// The built-in 15-entry MCS reference set (4-bit CQI table minus the
// out-of-range entry) and its default sigmoid OLM parameters.
McsTable default_mcs_table();
std::vector<double> default_midpoints_db(int num_mcs, double start_db = -8.0, double step_db = 2.0);

// CSV form: header row of grid SINRs, then one probability row per MCS.
void write_olm_csv(const Olm& olm, std::ostream& out);
Olm read_olm_csv(std::istream& in);

// JSON form of a table: array of {index, modulation_order, code_rate}.
std::string mcs_table_to_json(const McsTable& table);
McsTable mcs_table_from_json(const std::string& json_text);

}  // namespace lasim
