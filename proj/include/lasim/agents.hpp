#pragma once

#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include "lasim/mcs_olm.hpp"
#include "lasim/rng.hpp"

namespace lasim {

// Outer-loop link adaptation: track the SINR with a fixed-ratio up/down
// offset walk calibrated to a target BLER.
struct OllaState {
    double theta0_db = 0.0;   // initial SINR estimate
    double delta_db = 0.0;    // current offset
    double eta = 0.1;         // target BLER
    double step_db = 0.1;     // step size parameter
    double sinr_min_db = -8.5;
    double sinr_max_db = 18.0;

    void validate() const;
};

// Clamped SINR estimate theta0 - delta.
double olla_estimate(const OllaState& state);

int olla_propose(const OllaState& state, const Olm& olm, const McsTable& table);

// ACK steps the offset down by eta*step, NACK steps it up by (1-eta)*step.
OllaState olla_update(OllaState state, bool ack);

// Unimodal Thompson sampling over the MCS ladder with a sliding window of
// (mcs, outcome) pairs. window_capacity 0 means unbounded (stationary mode).
// per_arm_window switches from one global FIFO to a FIFO per arm.
class UtsState {
public:
    UtsState(int num_arms, std::uint64_t window_capacity, bool per_arm_window = false);

    void push(int mcs, bool ack);

    int num_arms() const { return num_arms_; }
    std::uint64_t window_capacity() const { return capacity_; }
    bool per_arm_window() const { return per_arm_; }
    std::int64_t successes(int mcs) const { return successes_[mcs - 1]; }
    std::int64_t failures(int mcs) const { return failures_[mcs - 1]; }
    std::uint64_t leader_visits(int mcs) const { return leader_visits_[mcs - 1]; }
    std::size_t window_size() const;

    // Empirical success rate from the window; 0/0 falls back to the
    // Beta(1,1) prior mean 0.5.
    double empirical_mean(int mcs) const;

    // Recomputes per-arm counts from the raw window contents (test hook for
    // the count/window consistency invariant).
    std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> recount_from_window() const;

    std::uint64_t& leader_visits_mut(int mcs) { return leader_visits_[mcs - 1]; }

private:
    int num_arms_;
    std::uint64_t capacity_;
    bool per_arm_;
    std::deque<std::pair<int, bool>> window_;             // global FIFO
    std::vector<std::deque<bool>> arm_windows_;           // per-arm FIFOs
    std::vector<std::int64_t> successes_;
    std::vector<std::int64_t> failures_;
    std::vector<std::uint64_t> leader_visits_;
};

// Throughput leader: argmax of rate * empirical mean, ties toward the lowest
// index.
int uts_leader(const UtsState& state, const McsTable& table);

// One UTS decision. Every (|neighborhood|+1)-th visit of the current leader
// plays the leader outright; other visits Thompson-sample the leader and its
// index-adjacent neighbors from Beta(1+successes, 1+failures).
int uts_propose(UtsState& state, const McsTable& table, Rng& rng);

void uts_update(UtsState& state, int mcs, bool ack);

}  // namespace lasim
