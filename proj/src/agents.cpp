#include "lasim/agents.hpp"

#include <algorithm>
#include <cmath>

namespace lasim {

void OllaState::validate() const {
    if (!(eta > 0.0) || !(eta < 1.0)) throw ConfigError("olla.eta: must be in (0, 1)");
    if (!(step_db > 0.0)) throw ConfigError("olla.step_db: must be > 0");
    if (!(sinr_min_db < sinr_max_db)) throw ConfigError("olla.sinr_min_db: must be below sinr_max_db");
}

double olla_estimate(const OllaState& state) {
    return std::clamp(state.theta0_db - state.delta_db, state.sinr_min_db, state.sinr_max_db);
}

int olla_propose(const OllaState& state, const Olm& olm, const McsTable& table) {
    return select_mcs(olm, table, olla_estimate(state));
}

OllaState olla_update(OllaState state, bool ack) {
    if (ack)
        state.delta_db -= state.eta * state.step_db;
    else
        state.delta_db += (1.0 - state.eta) * state.step_db;
    return state;
}

UtsState::UtsState(int num_arms, std::uint64_t window_capacity, bool per_arm_window)
    : num_arms_(num_arms),
      capacity_(window_capacity),
      per_arm_(per_arm_window),
      successes_(num_arms, 0),
      failures_(num_arms, 0),
      leader_visits_(num_arms, 0) {
    if (num_arms < 1) throw ConfigError("uts: need at least one arm");
    if (per_arm_) arm_windows_.resize(num_arms);
}

void UtsState::push(int mcs, bool ack) {
    auto& succ = successes_[mcs - 1];
    auto& fail = failures_[mcs - 1];
    if (ack)
        ++succ;
    else
        ++fail;
    if (per_arm_) {
        auto& w = arm_windows_[mcs - 1];
        w.push_back(ack);
        if (capacity_ != 0 && w.size() > capacity_) {
            if (w.front())
                --succ;
            else
                --fail;
            w.pop_front();
        }
    } else {
        window_.emplace_back(mcs, ack);
        if (capacity_ != 0 && window_.size() > capacity_) {
            auto [old_mcs, old_ack] = window_.front();
            if (old_ack)
                --successes_[old_mcs - 1];
            else
                --failures_[old_mcs - 1];
            window_.pop_front();
        }
    }
}

std::size_t UtsState::window_size() const {
    if (!per_arm_) return window_.size();
    std::size_t n = 0;
    for (const auto& w : arm_windows_) n += w.size();
    return n;
}

double UtsState::empirical_mean(int mcs) const {
    const std::int64_t n = successes_[mcs - 1] + failures_[mcs - 1];
    if (n == 0) return 0.5;
    return static_cast<double>(successes_[mcs - 1]) / static_cast<double>(n);
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> UtsState::recount_from_window()
    const {
    std::vector<std::int64_t> succ(num_arms_, 0), fail(num_arms_, 0);
    if (per_arm_) {
        for (int m = 0; m < num_arms_; ++m)
            for (bool ack : arm_windows_[m]) (ack ? succ[m] : fail[m])++;
    } else {
        for (auto [mcs, ack] : window_) (ack ? succ[mcs - 1] : fail[mcs - 1])++;
    }
    return {std::move(succ), std::move(fail)};
}

int uts_leader(const UtsState& state, const McsTable& table) {
    int best = 1;
    double best_score = table.rate(1) * state.empirical_mean(1);
    for (int m = 2; m <= state.num_arms(); ++m) {
        const double score = table.rate(m) * state.empirical_mean(m);
        if (score > best_score) {
            best_score = score;
            best = m;
        }
    }
    return best;
}

namespace {

double sample_beta(double a, double b, Rng& rng) {
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

}  // namespace

int uts_propose(UtsState& state, const McsTable& table, Rng& rng) {
    const int leader = uts_leader(state, table);
    const std::uint64_t visits = ++state.leader_visits_mut(leader);

    std::vector<int> candidates;
    candidates.push_back(leader);
    if (leader > 1) candidates.push_back(leader - 1);
    if (leader < state.num_arms()) candidates.push_back(leader + 1);
    const std::uint64_t cycle = candidates.size();  // neighborhood size + 1

    if (visits % cycle == 0) return leader;

    std::sort(candidates.begin(), candidates.end());  // lowest-index tie-break
    int best = candidates.front();
    double best_score = -1.0;
    for (int m : candidates) {
        const double draw = sample_beta(1.0 + static_cast<double>(state.successes(m)),
                                        1.0 + static_cast<double>(state.failures(m)), rng);
        const double score = table.rate(m) * draw;
        if (score > best_score) {
            best_score = score;
            best = m;
        }
    }
    return best;
}

void uts_update(UtsState& state, int mcs, bool ack) { state.push(mcs, ack); }

}  // namespace lasim
