#include "lasim/agent.hpp"

namespace lasim {

OllaAgent::OllaAgent(OllaState initial, const Olm& tx_olm, const McsTable& table)
    : state_(initial), tx_olm_(tx_olm), table_(table) {
    state_.validate();
}

int OllaAgent::propose(Rng& rng) {
    if (!theta0_set_) {
        state_.theta0_db = std::uniform_real_distribution<double>(state_.sinr_min_db,
                                                                  state_.sinr_max_db)(rng);
        theta0_set_ = true;
    }
    last_estimate_ = olla_estimate(state_);
    return select_mcs(tx_olm_, table_, *last_estimate_);
}

void OllaAgent::observe(int /*mcs*/, bool ack) { state_ = olla_update(state_, ack); }

void OllaAgent::on_cqi(const CqiReport& report) {
    // restart the offset walk from the CQI-implied SINR
    state_.theta0_db = cqi_to_sinr(tx_olm_, table_, report.cqi_index);
    state_.delta_db = 0.0;
    theta0_set_ = true;
}

UtsAgent::UtsAgent(int num_arms, std::uint64_t window, bool per_arm_window, const McsTable& table)
    : state_(num_arms, window, per_arm_window), table_(table) {}

int UtsAgent::propose(Rng& rng) { return uts_propose(state_, table_, rng); }

void UtsAgent::observe(int mcs, bool ack) { uts_update(state_, mcs, ack); }

LtslaAgent::LtslaAgent(const SinrGrid& grid, double sigma2, double cqi_std_db, const Olm& tx_olm,
                       const McsTable& table)
    : pmf_(pmf_init_uniform(grid)),
      sigma2_(sigma2),
      cqi_std_db_(cqi_std_db),
      tx_olm_(tx_olm),
      table_(table) {
    if (sigma2 < 0.0) throw ConfigError("ltsla.sigma2: must be >= 0");
}

int LtslaAgent::propose(Rng& rng) {
    auto [mcs, theta_hat] = ltsla_propose(pmf_, tx_olm_, table_, rng);
    last_estimate_ = theta_hat;
    return mcs;
}

void LtslaAgent::observe(int mcs, bool ack) {
    if (ltsla_update(pmf_, tx_olm_, mcs, ack) == BeliefUpdate::collapsed_reset)
        ++belief_collapses_;
    pmf_relax(pmf_, sigma2_);
}

void LtslaAgent::on_cqi(const CqiReport& report) {
    if (ltsla_absorb_cqi(pmf_, report, tx_olm_, table_, cqi_std_db_) ==
        BeliefUpdate::collapsed_reset)
        ++belief_collapses_;
}

}  // namespace lasim
