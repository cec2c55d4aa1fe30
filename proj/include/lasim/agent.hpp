#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "lasim/agents.hpp"
#include "lasim/channel.hpp"
#include "lasim/ltsla.hpp"
#include "lasim/mcs_olm.hpp"

namespace lasim {

// Sequential per-link adaptation agent: one propose per TTI, followed by one
// observe with the HARQ outcome. CQI reports may arrive between cycles.
class LinkAgent {
public:
    virtual ~LinkAgent() = default;

    virtual int propose(Rng& rng) = 0;
    virtual void observe(int mcs, bool ack) = 0;
    virtual void on_cqi(const CqiReport& report) { (void)report; }

    // SINR estimate backing the most recent proposal, when the scheme has one.
    virtual std::optional<double> sinr_estimate() const { return std::nullopt; }
};

class OllaAgent : public LinkAgent {
public:
    // theta0 is drawn uniformly inside [sinr_min, sinr_max] on first propose
    // when no CQI has arrived.
    OllaAgent(OllaState initial, const Olm& tx_olm, const McsTable& table);

    int propose(Rng& rng) override;
    void observe(int mcs, bool ack) override;
    void on_cqi(const CqiReport& report) override;
    std::optional<double> sinr_estimate() const override { return last_estimate_; }

    const OllaState& state() const { return state_; }

private:
    OllaState state_;
    const Olm& tx_olm_;
    const McsTable& table_;
    bool theta0_set_ = false;
    std::optional<double> last_estimate_;
};

class UtsAgent : public LinkAgent {
public:
    UtsAgent(int num_arms, std::uint64_t window, bool per_arm_window, const McsTable& table);

    int propose(Rng& rng) override;
    void observe(int mcs, bool ack) override;

    const UtsState& state() const { return state_; }

private:
    UtsState state_;
    const McsTable& table_;
};

class LtslaAgent : public LinkAgent {
public:
    LtslaAgent(const SinrGrid& grid, double sigma2, double cqi_std_db, const Olm& tx_olm,
               const McsTable& table);

    int propose(Rng& rng) override;
    void observe(int mcs, bool ack) override;
    void on_cqi(const CqiReport& report) override;
    std::optional<double> sinr_estimate() const override { return last_estimate_; }

    const SinrPmf& pmf() const { return pmf_; }
    std::int64_t belief_collapses() const { return belief_collapses_; }

private:
    SinrPmf pmf_;
    double sigma2_;
    double cqi_std_db_;
    const Olm& tx_olm_;
    const McsTable& table_;
    std::optional<double> last_estimate_;
    std::int64_t belief_collapses_ = 0;
};

}  // namespace lasim
