#include "lasim/mcs_olm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace lasim {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": cannot parse number '" + tok + "'");
    }
}

}  // namespace

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
    if (entries_.size() < 2) throw ConfigError("mcs_table: need at least 2 entries");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        McsEntry& e = entries_[i];
        if (e.index != static_cast<int>(i) + 1)
            throw ConfigError("mcs_table: indices must be contiguous starting at 1");
        if (e.modulation_order < 2 || (e.modulation_order & (e.modulation_order - 1)) != 0)
            throw ConfigError("mcs_table: modulation_order must be a power of two >= 2");
        if (!(e.code_rate > 0.0) || e.code_rate > 1.0)
            throw ConfigError("mcs_table: code_rate must be in (0, 1]");
        e.data_rate = e.code_rate * std::log2(static_cast<double>(e.modulation_order));
        if (i > 0 && !(e.data_rate > entries_[i - 1].data_rate))
            throw ConfigError("mcs_table: data rates must be strictly increasing");
    }
}

int SinrGrid::num_bins() const {
    return static_cast<int>(std::llround((max_db - min_db) / spacing_db)) + 1;
}

std::vector<double> SinrGrid::centers() const {
    validate();
    int k = num_bins();
    std::vector<double> c(k);
    for (int i = 0; i < k; ++i) c[i] = min_db + i * spacing_db;
    return c;
}

void SinrGrid::validate() const {
    if (!(spacing_db > 0.0)) throw ConfigError("grid: spacing_db must be > 0");
    if (!(max_db > min_db)) throw ConfigError("grid: max_db must exceed min_db");
    if (num_bins() < 2) throw ConfigError("grid: need at least 2 bins");
}

Olm::Olm(std::vector<double> sinr_grid_db, std::vector<std::vector<double>> ack_prob)
    : grid_(std::move(sinr_grid_db)), ack_prob_(std::move(ack_prob)) {
    if (grid_.empty()) throw ConfigError("olm: empty SINR grid");
    for (std::size_t k = 1; k < grid_.size(); ++k)
        if (!(grid_[k] > grid_[k - 1])) throw ConfigError("olm: grid must be strictly increasing");
    if (ack_prob_.empty()) throw ConfigError("olm: no MCS rows");
    for (std::size_t m = 0; m < ack_prob_.size(); ++m) {
        const auto& row = ack_prob_[m];
        if (row.size() != grid_.size()) throw ConfigError("olm: row width != grid size");
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (!(row[k] >= 0.0) || row[k] > 1.0)
                throw ConfigError("olm: ack probability outside [0, 1]");
            if (k > 0 && row[k] < row[k - 1])
                throw ConfigError("olm: row not non-decreasing in SINR (waterfall monotonicity)");
            if (m > 0 && row[k] > ack_prob_[m - 1][k])
                throw ConfigError("olm: column not non-increasing in MCS index");
        }
    }
}

int Olm::nearest_bin(double theta_db) const {
    auto it = std::lower_bound(grid_.begin(), grid_.end(), theta_db);
    if (it == grid_.begin()) return 0;
    if (it == grid_.end()) return static_cast<int>(grid_.size()) - 1;
    int hi = static_cast<int>(it - grid_.begin());
    int lo = hi - 1;
    // exact midpoint resolves to the lower bin
    return (theta_db - grid_[lo] < grid_[hi] - theta_db) ? lo : (theta_db - grid_[lo] > grid_[hi] - theta_db) ? hi : lo;
}

Olm make_sigmoid_olm(const McsTable& table, const std::vector<double>& midpoints_db,
                     const std::vector<double>& slopes_per_db, const SinrGrid& grid) {
    const int m_count = table.size();
    if (static_cast<int>(midpoints_db.size()) != m_count ||
        static_cast<int>(slopes_per_db.size()) != m_count)
        throw ConfigError("sigmoid olm: midpoints/slopes size must equal MCS count");
    for (int m = 1; m < m_count; ++m)
        if (!(midpoints_db[m] > midpoints_db[m - 1]))
            throw ConfigError("sigmoid olm: midpoints must be strictly increasing");
    for (double s : slopes_per_db)
        if (!(s > 0.0)) throw ConfigError("sigmoid olm: slopes must be > 0");

    std::vector<double> centers = grid.centers();
    std::vector<std::vector<double>> prob(m_count, std::vector<double>(centers.size()));
    for (int m = 0; m < m_count; ++m)
        for (std::size_t k = 0; k < centers.size(); ++k)
            prob[m][k] = 1.0 / (1.0 + std::exp(-slopes_per_db[m] * (centers[k] - midpoints_db[m])));
    return Olm(std::move(centers), std::move(prob));
}

double olm_lookup(const Olm& olm, int mcs, double theta_db) {
    return olm.at(mcs, olm.nearest_bin(theta_db));
}

int select_mcs(const Olm& olm, const McsTable& table, double theta_hat_db) {
    const int bin = olm.nearest_bin(theta_hat_db);
    int best = 1;
    double best_score = table.rate(1) * olm.at(1, bin);
    for (int m = 2; m <= table.size(); ++m) {
        double score = table.rate(m) * olm.at(m, bin);
        if (score > best_score) {
            best_score = score;
            best = m;
        }
    }
    return best;
}

Olm perturb_olm(const Olm& olm, double bias_db) {
    std::vector<std::vector<double>> prob(olm.num_mcs());
    for (int m = 1; m <= olm.num_mcs(); ++m) {
        prob[m - 1].resize(olm.num_bins());
        for (int k = 0; k < olm.num_bins(); ++k)
            prob[m - 1][k] = olm_lookup(olm, m, olm.grid()[k] - bias_db);
    }
    return Olm(olm.grid(), std::move(prob));
}

double oracle_throughput(const Olm& truth_olm, const McsTable& table, double theta_db) {
    const int bin = truth_olm.nearest_bin(theta_db);
    double best = 0.0;
    for (int m = 1; m <= table.size(); ++m)
        best = std::max(best, table.rate(m) * truth_olm.at(m, bin));
    return best;
}

double cqi_to_sinr(const Olm& olm, const McsTable& table, int cqi_index) {
    for (int k = 0; k < olm.num_bins(); ++k)
        if (select_mcs(olm, table, olm.grid()[k]) == cqi_index) return olm.grid()[k];
    for (int k = 0; k < olm.num_bins(); ++k)
        if (select_mcs(olm, table, olm.grid()[k]) >= cqi_index) return olm.grid()[k];
    return olm.grid().back();
}

McsTable default_mcs_table() {
    // 4-bit CQI reference set (QPSK/16QAM/64QAM ladder) minus the out-of-range entry.
    static const int mods[15] = {4, 4, 4, 4, 4, 4, 16, 16, 16, 64, 64, 64, 64, 64, 64};
    static const int rates_1024[15] = {78,  120, 193, 308, 449, 602, 378, 490,
                                       616, 466, 567, 666, 772, 873, 948};
    std::vector<McsEntry> entries(15);
    for (int i = 0; i < 15; ++i)
        entries[i] = McsEntry{i + 1, mods[i], rates_1024[i] / 1024.0, 0.0};
    return McsTable(std::move(entries));
}

std::vector<double> default_midpoints_db(int num_mcs, double start_db, double step_db) {
    std::vector<double> mids(num_mcs);
    for (int m = 0; m < num_mcs; ++m) mids[m] = start_db + m * step_db;
    return mids;
}

void write_olm_csv(const Olm& olm, std::ostream& out) {
    for (int k = 0; k < olm.num_bins(); ++k)
        out << (k ? "," : "") << format_double(olm.grid()[k]);
    out << '\n';
    for (int m = 1; m <= olm.num_mcs(); ++m) {
        for (int k = 0; k < olm.num_bins(); ++k)
            out << (k ? "," : "") << format_double(olm.at(m, k));
        out << '\n';
    }
}

Olm read_olm_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(parse_double(tok, "olm csv"));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw ConfigError("olm csv: need a grid header row and at least one MCS row");
    std::vector<double> grid = std::move(rows.front());
    rows.erase(rows.begin());
    return Olm(std::move(grid), std::move(rows));
}

std::string mcs_table_to_json(const McsTable& table) {
    nlohmann::json arr = nlohmann::json::array();
    for (const McsEntry& e : table.entries())
        arr.push_back({{"index", e.index},
                       {"modulation_order", e.modulation_order},
                       {"code_rate", e.code_rate}});
    return arr.dump();
}

McsTable mcs_table_from_json(const std::string& json_text) {
    nlohmann::json arr = nlohmann::json::parse(json_text);
    if (!arr.is_array()) throw ConfigError("mcs_table json: expected an array");
    std::vector<McsEntry> entries;
    for (const auto& e : arr) {
        McsEntry m;
        m.index = e.at("index").get<int>();
        m.modulation_order = e.at("modulation_order").get<int>();
        m.code_rate = e.at("code_rate").get<double>();
        entries.push_back(m);
    }
    return McsTable(std::move(entries));
}

}  // namespace lasim
